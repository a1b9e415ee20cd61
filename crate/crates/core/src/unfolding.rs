//! Periodic unfolding `û(x̄, ȳ, y_N) = u(ε[x̄/ε] + εȳ, ε y_N)` on the strip
//! `W × (-1, 0)` with `W = (0, width)` and `Y = (-1/2, 1/2)`, together with
//! the polynomial moment projector acting on traces at `y_N = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spline::{QuadratureRule, TensorQuadrature};
use crate::tensor_calculus::{
    compose_jets, factorial, multi_indices_of_order, DerivativeTable, JetField, MultiIndex, Polynomial,
};

const ALIGNMENT_TOL: f64 = 1e-12;

/// Cells `C^k = εk + εY` inside `W`; `ε` must divide the width.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnfoldGrid {
    pub epsilon: f64,
    pub width: f64,
    /// Indices `k` with `C^k ⊂ W`, ascending.
    pub cells: Vec<i64>,
}

impl UnfoldGrid {
    pub fn new(epsilon: f64, width: f64) -> Result<Self> {
        if !(epsilon > 0.0 && width > 0.0) {
            return Err(Error::Argument(format!("need positive ε and width, got {epsilon}, {width}")));
        }
        let ratio = width / epsilon;
        if (ratio - ratio.round()).abs() > ALIGNMENT_TOL * ratio.max(1.0) {
            return Err(Error::Configuration(format!(
                "ε = {epsilon} does not divide the width {width}; cells would be cut"
            )));
        }
        let n = ratio.round() as i64;
        if n < 2 {
            return Err(Error::Configuration(format!("ε = {epsilon} leaves no interior cell")));
        }
        // C^k = (ε(k - 1/2), ε(k + 1/2)) ⊂ (0, nε) iff 1 <= k <= n - 1
        Ok(UnfoldGrid { epsilon, width, cells: (1..n).collect() })
    }

    /// `ε = 1/n` on the unit interval.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(1.0 / n as f64, 1.0)
    }

    /// The covered interval `Ŵ_ε`.
    pub fn covered(&self) -> (f64, f64) {
        let e = self.epsilon;
        let first = *self.cells.first().expect("grid has cells") as f64;
        let last = *self.cells.last().expect("grid has cells") as f64;
        (e * (first - 0.5), e * (last + 0.5))
    }

    /// `[x̄/ε]`, the cell containing `x̄`.
    pub fn cell_of(&self, x: f64) -> Result<i64> {
        let (lo, hi) = self.covered();
        if !(x >= lo && x < hi) {
            return Err(Error::Domain(format!("x̄ = {x} lies outside the covered region [{lo}, {hi})")));
        }
        let k = (x / self.epsilon + 0.5).floor() as i64;
        Ok(k.clamp(self.cells[0], *self.cells.last().unwrap()))
    }

    /// Cell boundaries of `Ŵ_ε`.
    pub fn cell_breaks(&self) -> Vec<f64> {
        let (lo, _) = self.covered();
        (0..=self.cells.len()).map(|i| lo + i as f64 * self.epsilon).collect()
    }
}

/// `û` as a function of `(ȳ, y_N)` for a fixed cell.
pub struct UnfoldedCell<'a> {
    u: &'a dyn JetField,
    epsilon: f64,
    origin: f64,
}

impl<'a> UnfoldedCell<'a> {
    pub fn new(u: &'a dyn JetField, grid: &UnfoldGrid, k: i64) -> Self {
        UnfoldedCell { u, epsilon: grid.epsilon, origin: grid.epsilon * k as f64 }
    }
}

impl JetField for UnfoldedCell<'_> {
    fn dim(&self) -> usize {
        2
    }

    /// Jets in `(ȳ, y_N)` through the chain rule with the affine cell map.
    fn jet(&self, y: &[f64], order: usize) -> DerivativeTable {
        let e = self.epsilon;
        let x = [self.origin + e * y[0], e * y[1]];
        let mut inner = vec![DerivativeTable::constant(2, order, x[0]), DerivativeTable::constant(2, order, x[1])];
        if order >= 1 {
            inner[0].set(&MultiIndex::unit(2, 0), e);
            inner[1].set(&MultiIndex::unit(2, 1), e);
        }
        compose_jets(&self.u.jet(&x, order), &inner).expect("matching dimensions")
    }

    fn max_order(&self) -> Option<usize> {
        self.u.max_order()
    }
}

fn check_sample(grid: &UnfoldGrid, p: &[f64; 3]) -> Result<i64> {
    let k = grid.cell_of(p[0])?;
    if !(p[1] >= -0.5 && p[1] <= 0.5) {
        return Err(Error::Domain(format!("ȳ = {} lies outside Y", p[1])));
    }
    if !(p[2] > -1.0 / grid.epsilon && p[2] <= 0.0) {
        return Err(Error::Domain(format!("y_N = {} lies outside (-1/ε, 0]", p[2])));
    }
    Ok(k)
}

/// `û` at points `(x̄, ȳ, y_N)` of `Ŵ_ε × Y × (-1/ε, 0]`.
pub fn unfold_sample(u: &dyn JetField, grid: &UnfoldGrid, points: &[[f64; 3]]) -> Result<Vec<f64>> {
    if u.dim() != 2 {
        return Err(Error::Argument("unfolding acts on planar fields".into()));
    }
    points
        .iter()
        .map(|p| {
            let k = check_sample(grid, p)?;
            let e = grid.epsilon;
            Ok(u.value(&[e * k as f64 + e * p[1], e * p[2]]))
        })
        .collect()
}

/// Both sides of the unfolding integration identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegrationIdentity {
    pub physical: f64,
    pub unfolded: f64,
    /// `|physical - unfolded| / max(1, |physical|)`.
    pub residual: f64,
}

/// For `l = 0` compares `∫_{Ŵ_ε×(a,0)} u` with `ε ∫ û`; for `l >= 1` compares
/// `Σ_{|β|=l} ∫ |D^β u|²` with `ε^{1-2l} Σ_{|β|=l} ∫ |D^β_y û|²`.
/// `breaks` lists the element boundaries of `u` along each axis so the
/// Gauss rules stay exact on each piece.
pub fn integration_identity_residual(
    u: &dyn JetField,
    grid: &UnfoldGrid,
    a: f64,
    l: usize,
    breaks: [&[f64]; 2],
    order: usize,
) -> Result<IntegrationIdentity> {
    if !(-1.0..0.0).contains(&a) {
        return Err(Error::Argument(format!("depth a = {a} must lie in [-1, 0)")));
    }
    if u.dim() != 2 {
        return Err(Error::Argument("unfolding acts on planar fields".into()));
    }
    if let Some(cap) = u.max_order() {
        if cap < l {
            return Err(Error::Argument(format!("field provides jets up to {cap}, need {l}")));
        }
    }
    let e = grid.epsilon;
    let (lo, hi) = grid.covered();
    let mut xcuts = grid.cell_breaks();
    xcuts.extend(breaks[0].iter().copied());
    let physical_rule = TensorQuadrature::new(vec![
        QuadratureRule::split_at(lo, hi, &xcuts, order),
        QuadratureRule::split_at(a, 0.0, breaks[1], order),
    ]);
    let density = |jet: &DerivativeTable| -> f64 {
        if l == 0 {
            jet.value()
        } else {
            multi_indices_of_order(2, l).iter().map(|b| jet.get(b).powi(2)).sum()
        }
    };
    let physical = physical_rule.integrate(|x| density(&u.jet(x, l)));

    // û does not depend on x̄ inside a cell, so the x̄ integral is ε times a sum
    let mut unfolded = 0.0;
    for &k in &grid.cells {
        let origin = e * k as f64;
        let ycuts: Vec<f64> = breaks[0].iter().map(|b| (b - origin) / e).collect();
        let ncuts: Vec<f64> = breaks[1].iter().map(|b| b / e).collect();
        let rule = TensorQuadrature::new(vec![
            QuadratureRule::split_at(-0.5, 0.5, &ycuts, order),
            QuadratureRule::split_at(a / e, 0.0, &ncuts, order),
        ]);
        let cell = UnfoldedCell::new(u, grid, k);
        unfolded += e * rule.integrate(|y| density(&cell.jet(y, l)));
    }
    let unfolded = e.powi(1 - 2 * l as i32) * unfolded;
    let residual = (physical - unfolded).abs() / physical.abs().max(1.0);
    Ok(IntegrationIdentity { physical, unfolded, residual })
}

/// Moments `∫_Y D^η ψ(ζ̄, 0) dζ̄` of a polynomial, exactly.
fn polynomial_moment(p: &Polynomial, eta: &MultiIndex) -> f64 {
    let d = p.derivative(eta);
    let n = eta.dim();
    d.terms()
        .iter()
        .filter(|(mi, _)| mi.exponents()[n - 1] == 0)
        .map(|(mi, c)| {
            c * mi.exponents()[..n - 1]
                .iter()
                .map(|&q| if q % 2 == 1 { 0.0 } else { 2.0 * 0.5f64.powi(q as i32 + 1) / (q + 1) as f64 })
                .product::<f64>()
        })
        .sum()
}

fn homogeneous(dim: usize, moments: impl Fn(&MultiIndex) -> f64, degree: usize) -> Polynomial {
    let terms = multi_indices_of_order(dim, degree)
        .into_iter()
        .map(|eta| {
            let c = moments(&eta) / eta.exponents().iter().map(|&q| factorial(q)).product::<f64>();
            (eta, c)
        })
        .collect();
    Polynomial::new(dim, terms)
}

/// `Q_0, …, Q_{m-1}` of `ψ`: `Q_{m-1} = P_{m-1}ψ` and
/// `Q_i = P_i(ψ - Σ_{j>i} Q_j)`, where `P_i` keeps the Y-averaged order-`i`
/// jets at `y_N = 0` as a homogeneous polynomial.
pub fn moment_components(psi: &dyn JetField, m: usize, y_rule: &QuadratureRule) -> Result<Vec<Polynomial>> {
    if m == 0 {
        return Err(Error::Argument("moment projector needs m >= 1".into()));
    }
    let dim = psi.dim();
    if dim < 2 {
        return Err(Error::Argument("ψ needs at least one periodic variable and y_N".into()));
    }
    if let Some(cap) = psi.max_order() {
        if cap + 1 < m {
            return Err(Error::Argument(format!("ψ provides jets up to {cap}, need {}", m - 1)));
        }
    }
    let quad = TensorQuadrature::new(vec![y_rule.clone(); dim - 1]);
    // Y-averaged jets of ψ at y_N = 0
    let mut averaged = DerivativeTable::zeros(dim, m - 1);
    quad.for_each(|z, w| {
        let mut x = z.to_vec();
        x.push(0.0);
        averaged.axpy(w, &psi.jet(&x, m - 1));
    });
    let mut q = vec![Polynomial::zero(dim); m];
    let mut higher = Polynomial::zero(dim);
    for i in (0..m).rev() {
        let qi = homogeneous(dim, |eta| averaged.get(eta) - polynomial_moment(&higher, eta), i);
        higher = higher.add(&qi);
        q[i] = qi;
    }
    Ok(q)
}

/// `𝒫ψ = Q_0 + … + Q_{m-1}`, a polynomial of degree at most `m - 1` in `y`.
pub fn moment_projector(psi: &dyn JetField, m: usize, y_rule: &QuadratureRule) -> Result<Polynomial> {
    Ok(moment_components(psi, m, y_rule)?
        .iter()
        .fold(Polynomial::zero(psi.dim()), |acc, q| acc.add(q)))
}

/// Default Gauss rule on `Y`.
pub fn y_rule() -> QuadratureRule {
    QuadratureRule::uniform(-0.5, 0.5, 16, 12)
}
