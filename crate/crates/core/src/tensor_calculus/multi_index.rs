use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Exponent vector `γ = (γ_1, …, γ_N)` of a partial derivative `∂^γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        assert!(!exponents.is_empty(), "multi-index needs dimension >= 1");
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex::new(vec![0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex::new(e)
    }

    /// Counts how often each coordinate occurs in an index tuple `(i_1, …, i_n)`.
    pub fn from_tuple(dim: usize, tuple: &[usize]) -> Self {
        let mut e = vec![0; dim];
        for &i in tuple {
            e[i] += 1;
        }
        MultiIndex::new(e)
    }

    /// Sorted index tuple with `γ_i` copies of `i`.
    pub fn to_tuple(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat(i).take(k))
            .collect()
    }

    pub fn exponents(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    /// `γ! = γ_1! ⋯ γ_N!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if componentwise non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut e = Vec::with_capacity(self.dim());
        for (a, b) in self.0.iter().zip(&other.0) {
            e.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex::new(e))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All multi-indices of exactly `order` in `dim` variables, ordered
/// lexicographically descending (`(2,0), (1,1), (0,2)`).
pub fn multi_indices_of_order(dim: usize, order: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == dim {
            prefix.push(remaining);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            rec(dim, remaining - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, order, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Dense layout of all multi-indices up to a given order: graded by order,
/// lexicographically descending within an order.
#[derive(Debug)]
pub struct JetLayout {
    dim: usize,
    order_cap: usize,
    indices: Vec<MultiIndex>,
    lookup: Vec<usize>,
}

impl JetLayout {
    fn build(dim: usize, order_cap: usize) -> Self {
        let indices: Vec<MultiIndex> = (0..=order_cap)
            .flat_map(|n| multi_indices_of_order(dim, n))
            .collect();
        let base = order_cap + 1;
        let mut lookup = vec![usize::MAX; base.pow(dim as u32)];
        for (pos, mi) in indices.iter().enumerate() {
            lookup[key(mi.exponents(), base)] = pos;
        }
        JetLayout {
            dim,
            order_cap,
            indices,
            lookup,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Position of an exponent vector, `None` if its order exceeds the cap.
    #[inline]
    pub fn position(&self, exps: &[usize]) -> Option<usize> {
        debug_assert_eq!(exps.len(), self.dim);
        if exps.iter().sum::<usize>() > self.order_cap {
            return None;
        }
        Some(self.lookup[key(exps, self.order_cap + 1)])
    }

    /// Number of entries of order strictly less than `n`.
    pub fn offset_of_order(&self, n: usize) -> usize {
        // C(n + dim - 1, dim)
        if n == 0 {
            0
        } else {
            binomial(n + self.dim - 1, self.dim).round() as usize
        }
    }
}

#[inline]
fn key(exps: &[usize], base: usize) -> usize {
    exps.iter().rev().fold(0, |acc, &e| acc * base + e)
}

thread_local! {
    static LAYOUTS: RefCell<HashMap<(usize, usize), Arc<JetLayout>>> = RefCell::new(HashMap::new());
}

/// Shared layout for `dim` variables up to `order_cap`.
pub fn jet_layout(dim: usize, order_cap: usize) -> Arc<JetLayout> {
    assert!(dim >= 1, "jet layout needs dimension >= 1");
    LAYOUTS.with(|cache| {
        cache
            .borrow_mut()
            .entry((dim, order_cap))
            .or_insert_with(|| Arc::new(JetLayout::build(dim, order_cap)))
            .clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_graded_and_invertible() {
        let l = jet_layout(3, 4);
        assert_eq!(l.len(), 35);
        for (pos, mi) in l.indices().iter().enumerate() {
            assert_eq!(l.position(mi.exponents()), Some(pos));
        }
        assert_eq!(l.offset_of_order(2), 4);
        assert_eq!(l.indices()[l.offset_of_order(2)], MultiIndex::new(vec![2, 0, 0]));
        assert_eq!(l.position(&[3, 2, 0]), None);
    }

    #[test]
    fn tuple_round_trip() {
        let mi = MultiIndex::from_tuple(3, &[2, 0, 2, 1]);
        assert_eq!(mi.exponents(), &[1, 1, 2]);
        assert_eq!(mi.to_tuple(), vec![0, 1, 2, 2]);
        assert_eq!(mi.factorial(), 2.0);
    }

    #[test]
    fn order_two_in_plane() {
        let got: Vec<_> = multi_indices_of_order(2, 2)
            .into_iter()
            .map(|m| m.exponents().to_vec())
            .collect();
        assert_eq!(got, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }
}
