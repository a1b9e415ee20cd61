use serde::Serialize;

use crate::tensor_calculus::{multi_indices_of_order, DerivativeTable, MultiIndex};

/// Diagonal weights `m!/γ!` that turn the full contraction `D^m u : D^m v`
/// into a sum over multi-indices `|γ| = m`.
#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusWeights {
    pub m: usize,
    pub dim: usize,
    pub weights: Vec<(MultiIndex, f64)>,
}

pub fn frobenius_weights(m: usize, dim: usize) -> FrobeniusWeights {
    assert!(m >= 1 && dim >= 1, "frobenius_weights needs m >= 1 and N >= 1");
    let mf = crate::tensor_calculus::factorial(m);
    let weights = multi_indices_of_order(dim, m)
        .into_iter()
        .map(|g| {
            let w = mf / g.factorial();
            (g, w)
        })
        .collect();
    FrobeniusWeights { m, dim, weights }
}

impl FrobeniusWeights {
    pub fn weight(&self, gamma: &MultiIndex) -> Option<f64> {
        self.weights.iter().find(|(g, _)| g == gamma).map(|(_, w)| *w)
    }

    /// `Σ_{|γ|=m} (m!/γ!) ∂^γ u ∂^γ v` from two jets of order at least `m`.
    pub fn contract(&self, u: &DerivativeTable, v: &DerivativeTable) -> f64 {
        self.weights
            .iter()
            .map(|(g, w)| w * u.get(g) * v.get(g))
            .sum()
    }
}

/// Direct sum over all `N^m` ordered index tuples; used to cross-check the
/// diagonal weights.
pub fn repeated_index_sum(m: usize, u: &DerivativeTable, v: &DerivativeTable) -> f64 {
    let dim = u.dim();
    let total = dim.pow(m as u32);
    let mut tuple = vec![0usize; m];
    let mut s = 0.0;
    for mut code in 0..total {
        for t in tuple.iter_mut() {
            *t = code % dim;
            code /= dim;
        }
        s += u.get_tuple(&tuple) * v.get_tuple(&tuple);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let w = frobenius_weights(2, 2);
        let got: Vec<(Vec<usize>, f64)> = w.weights.iter().map(|(g, w)| (g.exponents().to_vec(), *w)).collect();
        assert!(got.contains(&(vec![2, 0], 1.0)));
        assert!(got.contains(&(vec![1, 1], 2.0)));
        assert!(got.contains(&(vec![0, 2], 1.0)));
        let w = frobenius_weights(3, 2);
        assert_eq!(w.weight(&MultiIndex::new(vec![2, 1])), Some(3.0));
        assert_eq!(w.weight(&MultiIndex::new(vec![1, 2])), Some(3.0));
        assert!(frobenius_weights(1, 4).weights.iter().all(|(_, w)| *w == 1.0));
    }
}
