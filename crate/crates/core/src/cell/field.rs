use std::f64::consts::FRAC_PI_2;

use super::CellSolution;
use crate::error::{Error, Result};
use crate::geometry::TrigPolynomial;
use crate::tensor_calculus::{factorial, DerivativeTable, JetField};

/// `e (e-1) ⋯ (e-q+1) t^{e-q}`, the `q`-th derivative of `t^e`.
fn power_derivative(e: usize, q: usize, t: f64) -> f64 {
    if q > e {
        return 0.0;
    }
    let falling: f64 = ((e - q + 1)..=e).map(|k| k as f64).product();
    falling * t.powi((e - q) as i32)
}

/// The cell solution `V(ȳ, y_N)` as a smooth field on `Y × (-∞, 0]`.
#[derive(Clone, Copy, Debug)]
pub struct CellField<'a> {
    sol: &'a CellSolution,
}

impl<'a> CellField<'a> {
    pub fn new(sol: &'a CellSolution) -> Self {
        CellField { sol }
    }

    fn derivative(&self, y: f64, yn: f64, p: usize, q: usize) -> f64 {
        let m = self.sol.m;
        let mut v = 0.0;
        if p == 0 {
            v += self.sol.mean * power_derivative(m - 2, q, yn) / factorial(m - 2);
            v += self.sol.gauge * power_derivative(m - 1, q, yn);
        }
        for md in &self.sol.modes {
            let mu = md.solution.mu;
            let theta = mu * y + p as f64 * FRAC_PI_2;
            let tangential = mu.powi(p as i32) * (md.cos * theta.cos() + md.sin * theta.sin());
            v += tangential * md.solution.profile().derivative(q).eval(yn);
        }
        v
    }
}

impl JetField for CellField<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        DerivativeTable::from_fn(2, order, |mi| {
            let e = mi.exponents();
            self.derivative(x[0], x[1], e[0], e[1])
        })
    }
}

/// Jets of `V` of order up to `order <= 2m` at points of `Y × (-∞, 0]`.
pub fn evaluate_v(solution: &CellSolution, points: &[[f64; 2]], order: usize) -> Result<Vec<DerivativeTable>> {
    if order > 2 * solution.m {
        return Err(Error::Argument(format!(
            "jet order {order} exceeds 2m = {}",
            2 * solution.m
        )));
    }
    let field = solution.field();
    points
        .iter()
        .map(|p| {
            if !(p[1] <= 0.0) {
                return Err(Error::Domain(format!("point {p:?} lies above the strip")));
            }
            Ok(field.jet(p, order))
        })
        .collect()
}

/// `g(y) = b(ȳ)(1 + y_N)^{m+1}`.
pub(crate) struct TestFunction {
    b: TrigPolynomial,
    m: usize,
}

impl TestFunction {
    pub(crate) fn new(b: TrigPolynomial, m: usize) -> Self {
        TestFunction { b, m }
    }
}

impl JetField for TestFunction {
    fn dim(&self) -> usize {
        2
    }

    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        DerivativeTable::from_fn(2, order, |mi| {
            let e = mi.exponents();
            self.b.derivative(x[0], e[0]) * power_derivative(self.m + 1, e[1], 1.0 + x[1])
        })
    }
}
