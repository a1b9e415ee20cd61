use super::jet::DerivativeTable;
use super::multi_index::{jet_layout, MultiIndex};
use super::partitions::{cached_partitions, MAX_PARTITION_SIZE};
use crate::error::{arg_err, Result};

fn check_tuple(tuple: &[usize], dim: usize) -> Result<()> {
    if let Some(&i) = tuple.iter().find(|&&i| i >= dim) {
        return Err(arg_err!("coordinate index {i} out of range for dimension {dim}"));
    }
    if tuple.len() > MAX_PARTITION_SIZE {
        return Err(arg_err!("derivative order {} too large", tuple.len()));
    }
    Ok(())
}

fn sub_tuple_exps(dim: usize, tuple: &[usize], positions: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut e = vec![0; dim];
    for p in positions {
        e[tuple[p]] += 1;
    }
    e
}

/// `∂^n (u v) / ∂x_{i_1} ⋯ ∂x_{i_n}` as the sum over subsets `S` of the
/// positions of `∂^S u · ∂^{S^c} v`.
pub fn leibniz_product(index_tuple: &[usize], u: &DerivativeTable, v: &DerivativeTable) -> Result<f64> {
    let n = index_tuple.len();
    let dim = u.dim();
    if v.dim() != dim {
        return Err(arg_err!("leibniz_product: jets in {} and {} variables", dim, v.dim()));
    }
    if u.order_cap() < n || v.order_cap() < n {
        return Err(arg_err!(
            "leibniz_product: order caps {}/{} below derivative order {n}",
            u.order_cap(),
            v.order_cap()
        ));
    }
    check_tuple(index_tuple, dim)?;
    let mut sum = 0.0;
    for mask in 0u32..(1 << n) {
        let su = sub_tuple_exps(dim, index_tuple, (0..n).filter(|p| mask & (1 << p) != 0));
        let sv = sub_tuple_exps(dim, index_tuple, (0..n).filter(|p| mask & (1 << p) == 0));
        sum += u.get_exps(&su) * v.get_exps(&sv);
    }
    Ok(sum)
}

/// Coefficients `c_β` such that `∂^n (f∘Φ) / ∂x_{i_1} ⋯ ∂x_{i_n} = Σ_β c_β D^β f(Φ(x))`
/// for any outer `f` of `r = inner.len()` variables. The vector is laid out
/// like a jet table in `r` variables of order `n`; `c_β` vanishes for `|β| = 0`
/// unless `n = 0`.
pub fn faa_di_bruno_coefficients(index_tuple: &[usize], inner: &[DerivativeTable]) -> Result<Vec<f64>> {
    let n = index_tuple.len();
    let r = inner.len();
    if r == 0 {
        return Err(arg_err!("faa_di_bruno: empty inner map"));
    }
    let dim = inner[0].dim();
    if inner.iter().any(|t| t.dim() != dim) {
        return Err(arg_err!("faa_di_bruno: inner jets over different dimensions"));
    }
    if inner.iter().any(|t| t.order_cap() < n) {
        return Err(arg_err!("faa_di_bruno: inner order cap below {n}"));
    }
    check_tuple(index_tuple, dim)?;
    let out_layout = jet_layout(r, n);
    let mut coeffs = vec![0.0; out_layout.len()];
    if n == 0 {
        coeffs[0] = 1.0;
        return Ok(coeffs);
    }

    let mut outer_exps = vec![0usize; r];
    for pi in cached_partitions(n) {
        let blocks = pi.blocks();
        let k = blocks.len();
        // inner factor D^{S_l} Φ^{(j)} for each block and component
        let factors: Vec<Vec<f64>> = blocks
            .iter()
            .map(|s| {
                let e = sub_tuple_exps(dim, index_tuple, s.iter().copied());
                inner.iter().map(|t| t.get_exps(&e)).collect()
            })
            .collect();
        // sum over (j_1..j_k) in [0,r)^k
        let mut js = vec![0usize; k];
        loop {
            let prod: f64 = js.iter().enumerate().map(|(l, &j)| factors[l][j]).product();
            if prod != 0.0 {
                outer_exps.iter_mut().for_each(|e| *e = 0);
                for &j in &js {
                    outer_exps[j] += 1;
                }
                let pos = out_layout.position(&outer_exps).expect("order within cap");
                coeffs[pos] += prod;
            }
            let mut l = 0;
            loop {
                if l == k {
                    break;
                }
                js[l] += 1;
                if js[l] < r {
                    break;
                }
                js[l] = 0;
                l += 1;
            }
            if l == k {
                break;
            }
        }
    }
    Ok(coeffs)
}

/// `∂^n (f∘Φ) / ∂x_{i_1} ⋯ ∂x_{i_n}` from the jets of `f` at `Φ(x)` (in `r`
/// variables) and the jets of the `r` components of `Φ` at `x`.
pub fn faa_di_bruno_compose(index_tuple: &[usize], outer: &DerivativeTable, inner: &[DerivativeTable]) -> Result<f64> {
    if outer.dim() != inner.len() {
        return Err(arg_err!(
            "faa_di_bruno: outer function of {} variables composed with {} components",
            outer.dim(),
            inner.len()
        ));
    }
    if outer.order_cap() < index_tuple.len() {
        return Err(arg_err!(
            "faa_di_bruno: outer order cap {} below {}",
            outer.order_cap(),
            index_tuple.len()
        ));
    }
    let coeffs = faa_di_bruno_coefficients(index_tuple, inner)?;
    Ok(coeffs.iter().zip(outer.values()).map(|(c, f)| c * f).sum())
}

/// Full jet of `u v`.
pub fn product_jets(u: &DerivativeTable, v: &DerivativeTable) -> Result<DerivativeTable> {
    let cap = u.order_cap().min(v.order_cap());
    let layout = jet_layout(u.dim(), cap);
    let mut out = DerivativeTable::zeros(u.dim(), cap);
    for (pos, mi) in layout.indices().iter().enumerate() {
        out.values_mut()[pos] = leibniz_product(&mi.to_tuple(), u, v)?;
    }
    Ok(out)
}

/// Full jet of `f∘Φ`.
pub fn compose_jets(outer: &DerivativeTable, inner: &[DerivativeTable]) -> Result<DerivativeTable> {
    let cap = inner
        .iter()
        .map(|t| t.order_cap())
        .min()
        .unwrap_or(0)
        .min(outer.order_cap());
    let dim = inner.first().map(|t| t.dim()).unwrap_or(1);
    let layout = jet_layout(dim, cap);
    let mut out = DerivativeTable::zeros(dim, cap);
    for (pos, mi) in layout.indices().iter().enumerate() {
        out.values_mut()[pos] = faa_di_bruno_compose(&mi.to_tuple(), outer, inner)?;
    }
    Ok(out)
}

/// Jet of a univariate outer function given its derivatives `f^{(k)}(s)`,
/// composed with a scalar inner jet.
pub fn compose_scalar(outer_derivs: &[f64], inner: &DerivativeTable) -> Result<DerivativeTable> {
    let cap = inner.order_cap().min(outer_derivs.len().saturating_sub(1));
    let outer = DerivativeTable::from_fn(1, cap, |m| outer_derivs[m.order()]);
    let inner = inner.truncate(cap)?;
    compose_jets(&outer, std::slice::from_ref(&inner))
}

/// The identity map's component jets at `x`.
pub fn identity_jets(x: &[f64], order_cap: usize) -> Vec<DerivativeTable> {
    (0..x.len())
        .map(|i| DerivativeTable::coordinate(x, order_cap, i))
        .collect()
}

/// Unit jet `e_β` (used to read off chain-rule coefficients).
pub fn unit_jet(dim: usize, order_cap: usize, beta: &MultiIndex) -> DerivativeTable {
    let mut t = DerivativeTable::zeros(dim, order_cap);
    t.set(beta, 1.0);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_calculus::jet::{JetField, Polynomial};

    #[test]
    fn leibniz_small_cases() {
        let x = [1.0];
        let u = Polynomial::univariate(1, 0, &[0.0, 1.0]).jet(&x, 2);
        let v = u.clone();
        assert_eq!(leibniz_product(&[], &u, &v).unwrap(), 1.0);
        assert_eq!(leibniz_product(&[0], &u, &v).unwrap(), 2.0);
        assert!(leibniz_product(&[0, 0, 0], &u, &v).is_err());
    }

    #[test]
    fn chain_rule_cases() {
        // f(t) = t^2, Φ(x) = x at x = 3
        let x = [3.0];
        let inner = identity_jets(&x, 2);
        let f = Polynomial::univariate(1, 0, &[0.0, 0.0, 1.0]).jet(&x, 2);
        assert_eq!(faa_di_bruno_compose(&[0, 0], &f, &inner).unwrap(), 2.0);
        // dimension mismatch
        let two = identity_jets(&[1.0, 2.0], 2);
        assert!(faa_di_bruno_compose(&[0], &f, &two).is_err());
    }

    #[test]
    fn identity_inner_reproduces_outer() {
        let x = [0.3, -0.4];
        let f = Polynomial::new(
            2,
            vec![
                (MultiIndex::new(vec![3, 1]), 1.5),
                (MultiIndex::new(vec![0, 2]), -2.0),
            ],
        )
        .jet(&x, 4);
        let c = compose_jets(&f, &identity_jets(&x, 4)).unwrap();
        assert!(c.max_abs_diff(&f) < 1e-14);
    }
}
