use std::f64::consts::FRAC_PI_2;

use super::jet::{DerivativeTable, JetField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RidgeKind {
    Exp,
    Sin { phase: f64 },
}

/// `Σ w · r(a · x)` with `r` an exponential or a shifted sine, so every
/// derivative is known in closed form: `D^β = a^β w r^{(|β|)}(a · x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeSum {
    dim: usize,
    terms: Vec<(RidgeKind, f64, Vec<f64>)>,
}

impl RidgeSum {
    pub fn new(dim: usize) -> Self {
        RidgeSum { dim, terms: Vec::new() }
    }

    pub fn with(mut self, kind: RidgeKind, weight: f64, direction: Vec<f64>) -> Self {
        assert_eq!(direction.len(), self.dim);
        self.terms.push((kind, weight, direction));
        self
    }
}

impl JetField for RidgeSum {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        let mut out = DerivativeTable::zeros(self.dim, order);
        for (kind, w, a) in &self.terms {
            let s: f64 = a.iter().zip(x).map(|(a, x)| a * x).sum();
            let t = DerivativeTable::from_fn(self.dim, order, |beta| {
                let mono: f64 = a.iter().zip(beta.exponents()).map(|(a, &e)| a.powi(e as i32)).product();
                let r = match kind {
                    RidgeKind::Exp => s.exp(),
                    RidgeKind::Sin { phase } => (s + phase + beta.order() as f64 * FRAC_PI_2).sin(),
                };
                w * mono * r
            });
            out.axpy(1.0, &t);
        }
        out
    }
}
