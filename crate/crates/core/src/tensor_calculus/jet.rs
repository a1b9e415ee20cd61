use std::sync::Arc;

use super::multi_index::{jet_layout, JetLayout, MultiIndex};
use crate::error::{arg_err, Result};

/// All partial derivatives `D^β f(x)` of a function at one point, for every
/// multi-index with `|β| <= order_cap`.
#[derive(Clone, Debug)]
pub struct DerivativeTable {
    layout: Arc<JetLayout>,
    values: Vec<f64>,
}

impl DerivativeTable {
    pub fn zeros(dim: usize, order_cap: usize) -> Self {
        let layout = jet_layout(dim, order_cap);
        let values = vec![0.0; layout.len()];
        DerivativeTable { layout, values }
    }

    /// Table of a constant function.
    pub fn constant(dim: usize, order_cap: usize, value: f64) -> Self {
        let mut t = Self::zeros(dim, order_cap);
        t.values[0] = value;
        t
    }

    /// Jet of the coordinate function `x ↦ x_axis` at `point`.
    pub fn coordinate(point: &[f64], order_cap: usize, axis: usize) -> Self {
        let dim = point.len();
        let mut t = Self::constant(dim, order_cap, point[axis]);
        if order_cap >= 1 {
            t.set(&MultiIndex::unit(dim, axis), 1.0);
        }
        t
    }

    pub fn from_fn(dim: usize, order_cap: usize, mut f: impl FnMut(&MultiIndex) -> f64) -> Self {
        let layout = jet_layout(dim, order_cap);
        let values = layout.indices().iter().map(&mut f).collect();
        DerivativeTable { layout, values }
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn order_cap(&self) -> usize {
        self.layout.order_cap()
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self) -> f64 {
        self.values[0]
    }

    /// `D^β f`; panics if `|β|` exceeds the cap.
    #[inline]
    pub fn get(&self, beta: &MultiIndex) -> f64 {
        self.get_exps(beta.exponents())
    }

    #[inline]
    pub fn get_exps(&self, exps: &[usize]) -> f64 {
        match self.layout.position(exps) {
            Some(p) => self.values[p],
            None => panic!("derivative {exps:?} beyond order cap {}", self.order_cap()),
        }
    }

    /// Like [`get_exps`](Self::get_exps) but returns `None` beyond the cap.
    pub fn try_get_exps(&self, exps: &[usize]) -> Option<f64> {
        self.layout.position(exps).map(|p| self.values[p])
    }

    /// `∂^n f / ∂x_{i_1} ⋯ ∂x_{i_n}`.
    pub fn get_tuple(&self, tuple: &[usize]) -> f64 {
        self.get(&MultiIndex::from_tuple(self.dim(), tuple))
    }

    pub fn set(&mut self, beta: &MultiIndex, v: f64) {
        let p = self
            .layout
            .position(beta.exponents())
            .unwrap_or_else(|| panic!("derivative {beta} beyond order cap"));
        self.values[p] = v;
    }

    /// Restriction to a lower order cap.
    pub fn truncate(&self, order_cap: usize) -> Result<Self> {
        if order_cap > self.order_cap() {
            return Err(arg_err!(
                "cannot raise jet order from {} to {order_cap}",
                self.order_cap()
            ));
        }
        let layout = jet_layout(self.dim(), order_cap);
        let values = self.values[..layout.len()].to_vec();
        Ok(DerivativeTable { layout, values })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `self + s * other` on the common layout.
    pub fn axpy(&mut self, s: f64, other: &DerivativeTable) {
        assert!(Arc::ptr_eq(&self.layout, &other.layout) || self.layout.len() == other.layout.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    pub fn max_abs_diff(&self, other: &DerivativeTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.layout.indices().iter().zip(self.values.iter().copied())
    }
}

/// A smooth field whose jets can be evaluated pointwise.
pub trait JetField {
    fn dim(&self) -> usize;

    /// Jets up to `order` at `x`.
    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable;

    fn value(&self, x: &[f64]) -> f64 {
        self.jet(x, 0).value()
    }

    /// Highest derivative order the field can provide, if limited.
    fn max_order(&self) -> Option<usize> {
        None
    }
}

impl<F: JetField + ?Sized> JetField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        (**self).jet(x, order)
    }
    fn max_order(&self) -> Option<usize> {
        (**self).max_order()
    }
}

/// Multivariate polynomial `Σ c_γ x^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(MultiIndex, f64)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(MultiIndex, f64)>) -> Self {
        assert!(terms.iter().all(|(m, _)| m.dim() == dim));
        let mut p = Polynomial { dim, terms };
        p.normalize();
        p
    }

    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: vec![] }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial::new(dim, vec![(MultiIndex::zero(dim), c)])
    }

    /// Univariate polynomial from ascending coefficients, embedded as a
    /// function of coordinate `axis` in `dim` variables.
    pub fn univariate(dim: usize, axis: usize, coeffs: &[f64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let mut e = vec![0; dim];
                e[axis] = k;
                (MultiIndex::new(e), c)
            })
            .collect();
        Polynomial::new(dim, terms)
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(MultiIndex, f64)> = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => merged.push((m, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        self.terms = merged;
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.order()).max().unwrap_or(0)
    }

    /// Largest exponent of coordinate `axis`.
    pub fn degree_in(&self, axis: usize) -> usize {
        self.terms.iter().map(|(m, _)| m.exponents()[axis]).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial::new(self.dim, terms)
    }

    pub fn scaled(&self, s: f64) -> Polynomial {
        Polynomial::new(
            self.dim,
            self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.add(mb), ca * cb));
            }
        }
        Polynomial::new(self.dim, terms)
    }

    /// `∂^β p` as a polynomial.
    pub fn derivative(&self, beta: &MultiIndex) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let rest = m.checked_sub(beta)?;
                let mut coef = *c;
                for (e, b) in m.exponents().iter().zip(beta.exponents()) {
                    coef *= falling(*e, *b);
                }
                Some((rest, coef))
            })
            .collect();
        Polynomial::new(self.dim, terms)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c * m.exponents().iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }
}

/// `e (e-1) ⋯ (e-b+1)`
fn falling(e: usize, b: usize) -> f64 {
    if b > e {
        return 0.0;
    }
    ((e - b + 1)..=e).map(|k| k as f64).product()
}

impl JetField for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        // powers x_i^k for k up to the max exponent
        let maxe = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.exponents().iter().copied())
            .max()
            .unwrap_or(0);
        let pows: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| (0..=maxe).map(|k| xi.powi(k as i32)).collect())
            .collect();
        DerivativeTable::from_fn(self.dim, order, |beta| {
            self.terms
                .iter()
                .map(|(m, c)| {
                    let mut v = *c;
                    for (i, (&e, &b)) in m.exponents().iter().zip(beta.exponents()).enumerate() {
                        if b > e {
                            return 0.0;
                        }
                        v *= falling(e, b) * pows[i][e - b];
                    }
                    v
                })
                .sum()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_jet_matches_derivative() {
        // p = 3 x^2 y - y^3 + 2
        let p = Polynomial::new(
            2,
            vec![
                (MultiIndex::new(vec![2, 1]), 3.0),
                (MultiIndex::new(vec![0, 3]), -1.0),
                (MultiIndex::new(vec![0, 0]), 2.0),
            ],
        );
        let x = [0.7, -1.3];
        let j = p.jet(&x, 3);
        for (beta, v) in j.iter() {
            let d = p.derivative(beta).eval(&x);
            assert!((v - d).abs() < 1e-12, "{beta}: {v} vs {d}");
        }
        assert_eq!(j.get_exps(&[1, 1]), 6.0 * 0.7);
        assert_eq!(j.get_exps(&[0, 3]), -6.0);
    }

    #[test]
    fn truncate_keeps_prefix() {
        let t = DerivativeTable::from_fn(2, 3, |m| m.order() as f64 + m.exponents()[0] as f64);
        let s = t.truncate(1).unwrap();
        assert_eq!(s.values(), &[0.0, 2.0, 1.0]);
        assert!(t.truncate(4).is_err());
    }
}
