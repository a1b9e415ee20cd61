//! The `m`-harmonic cell problem on the periodic half strip `Y × (-∞, 0)`
//! and the boundary constant `K` it produces.
//!
//! Each Fourier mode `k ≠ 0` of the datum `b` gives a profile
//! `e^{μ y_N} Σ_j c_j y_N^j` with `μ = 2π k`; the mean of `b` only feeds an
//! energy-free polynomial.

mod expoly;
mod field;
mod oracle;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::qy_evaluate;
use crate::geometry::TrigPolynomial;
use crate::spline::{QuadratureRule, TensorQuadrature};
use crate::tensor_calculus::{binomial, factorial, JetField};

pub use expoly::ExpPoly;
pub use field::{evaluate_v, CellField};
pub use oracle::{truncated_cell_constant, truncation_study, TruncationMesh, TruncationReport};

/// Boundary systems with a worse condition number are reported as singular.
const MAX_CONDITION: f64 = 1e13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    pub m: usize,
    pub b: TrigPolynomial,
    /// Restrict `K` to these modes; all modes of `b` when absent.
    #[serde(default)]
    pub modes: Option<Vec<u32>>,
}

impl CellConfig {
    pub fn new(m: usize, b: TrigPolynomial) -> Self {
        CellConfig { m, b, modes: None }
    }
}

/// Decaying solution of `(∂² - μ²)^m v = 0` with the cell boundary conditions
/// for one Fourier mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeSolution {
    pub k: u32,
    pub mu: f64,
    /// `c_0 … c_{m-1}` of `e^{μ y} Σ c_j y^j` for the datum passed to [`solve_mode`].
    pub coeffs: Vec<f64>,
    pub condition: f64,
}

impl ModeSolution {
    pub fn profile(&self) -> ExpPoly {
        ExpPoly::new(self.mu, self.coeffs.clone())
    }

    /// Largest violation of the boundary conditions at `y_N = 0` for `datum`.
    pub fn boundary_residual(&self, m: usize, datum: f64) -> f64 {
        let p = self.profile();
        boundary_orders(m)
            .iter()
            .map(|&l| {
                let target = if l == m - 2 { datum } else { 0.0 };
                (p.derivative(l).eval(0.0) - target).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Orders `0..=m-2` and `m` of the normal derivatives fixed at the top.
fn boundary_orders(m: usize) -> Vec<usize> {
    (0..=m - 2).chain(std::iter::once(m)).collect()
}

/// Solves for the mode `k ≠ 0` with `∂^l v(0) = 0` (`l <= m-3`),
/// `∂^{m-2} v(0) = datum` and `∂^m v(0) = 0`.
pub fn solve_mode(m: usize, k: u32, datum: f64) -> Result<ModeSolution> {
    if m < 2 {
        return Err(Error::Argument(format!("cell problem needs m >= 2, got {m}")));
    }
    if k == 0 {
        return Err(Error::Argument("the zero mode has no decaying solution".into()));
    }
    let mu = 2.0 * PI * k as f64;
    let orders = boundary_orders(m);
    // ∂^l (y^j e^{μy}) at 0 = C(l, j) j! μ^{l-j}
    let sys = DMatrix::from_fn(m, m, |r, j| {
        let l = orders[r];
        if j > l {
            0.0
        } else {
            binomial(l, j) * factorial(j) * mu.powi((l - j) as i32)
        }
    });
    let sv = sys.clone().singular_values();
    let condition = sv.max() / sv.min();
    if !(condition.is_finite() && condition < MAX_CONDITION) {
        return Err(Error::Numerical(format!("mode {k} boundary system has condition number {condition:e}")));
    }
    let mut rhs = DVector::zeros(m);
    rhs[m - 2] = datum;
    let coeffs = sys
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical(format!("mode {k} boundary system is singular")))?;
    Ok(ModeSolution { k, mu, coeffs: coeffs.iter().copied().collect(), condition })
}

/// A non-zero Fourier mode of `b` with its unit-datum profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellMode {
    #[serde(flatten)]
    pub solution: ModeSolution,
    /// Cosine and sine amplitudes of `b` in this mode.
    pub cos: f64,
    pub sin: f64,
}

impl CellMode {
    fn amplitude_sq(&self) -> f64 {
        0.5 * (self.cos * self.cos + self.sin * self.sin)
    }
}

/// Residuals recorded alongside a solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CellResiduals {
    /// Worst boundary-condition violation over the modes.
    pub boundary: f64,
    pub qy: Option<f64>,
    pub trace: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSolution {
    pub m: usize,
    pub b: TrigPolynomial,
    pub modes: Vec<CellMode>,
    /// Mean of `b`; the zero mode is `mean · y_N^{m-2}/(m-2)!`.
    pub mean: f64,
    /// Coefficient `a` of the free monomial `a y_N^{m-1}`.
    pub gauge: f64,
    #[serde(rename = "K")]
    pub k_value: f64,
    pub residuals: CellResiduals,
}

impl CellSolution {
    /// The same solution with the free monomial `a y_N^{m-1}` added.
    pub fn with_gauge(&self, a: f64) -> Self {
        CellSolution { gauge: a, ..self.clone() }
    }

    pub fn field(&self) -> CellField<'_> {
        CellField::new(self)
    }

    /// `K` from the boundary trace `-∫_Y (∂^{m-1}_N ΔV + (m-1) Δ_{N-1} ∂^{m-1}_N V) b`.
    pub fn trace_constant(&self) -> f64 {
        let m = self.m;
        self.modes
            .iter()
            .map(|md| {
                let p = md.solution.profile();
                let mu2 = md.solution.mu * md.solution.mu;
                let t = p.derivative(m + 1).eval(0.0) - m as f64 * mu2 * p.derivative(m - 1).eval(0.0);
                -md.amplitude_sq() * t
            })
            .sum()
    }

    /// `∫ |D^m V|²` over `Y × (depth, 0)` by tensor Gauss quadrature of the
    /// pointwise jets (all modes at once).
    pub fn energy_by_quadrature(&self, depth: f64) -> Result<f64> {
        if !(depth < 0.0) {
            return Err(Error::Argument(format!("depth {depth} must be negative")));
        }
        let weights = crate::forms::frobenius_weights(self.m, 2);
        let quad = TensorQuadrature::new(vec![
            QuadratureRule::uniform(-0.5, 0.5, 16, 12),
            decay_rule(depth),
        ]);
        let field = self.field();
        let mut total = 0.0;
        quad.for_each(|x, w| {
            let jet = field.jet(x, self.m);
            let e: f64 = weights.weights.iter().map(|(g, wt)| wt * jet.get(g).powi(2)).sum();
            total += w * e;
        });
        Ok(total)
    }

    /// `q_Y(V, g)` with `g = b(ȳ)(1 + y_N)^{m+1}` on `Y × (-1, 0)`.
    pub fn qy_value(&self) -> Result<f64> {
        let quad = TensorQuadrature::new(vec![
            QuadratureRule::uniform(-0.5, 0.5, 16, 12),
            QuadratureRule::uniform(-1.0, 0.0, 8, 12),
        ]);
        let g = field::TestFunction::new(self.b.clone(), self.m);
        qy_evaluate(self.m, &self.field(), &g, &quad)
    }
}

/// Composite Gauss rule on `(depth, 0)` with elements shrinking toward 0,
/// where the modes are concentrated.
fn decay_rule(depth: f64) -> QuadratureRule {
    let mut breaks = vec![0.0];
    let mut h = 1.0 / 16.0;
    let mut y = 0.0;
    while y - h > depth {
        y -= h;
        breaks.push(y);
        h *= 1.5;
    }
    breaks.push(depth);
    breaks.reverse();
    QuadratureRule::composite(&breaks, 16)
}

/// Energy `∫_{-∞}^0` of the `m`-th derivative tensor of one unit mode, in
/// closed form.
fn mode_energy(m: usize, sol: &ModeSolution) -> f64 {
    let p = sol.profile();
    (0..=m)
        .map(|g1| {
            let g2 = m - g1;
            let w = factorial(m) / (factorial(g1) * factorial(g2));
            w * sol.mu.powi(2 * g1 as i32) * p.derivative(g2).square_integral()
        })
        .sum()
}

/// Solves every mode of `b` and sums the closed-form energies into `K`.
pub fn strange_constant(config: &CellConfig) -> Result<CellSolution> {
    let m = config.m;
    if m < 2 {
        return Err(Error::Argument(format!("cell problem needs m >= 2, got {m}")));
    }
    let mut modes = Vec::new();
    let mut mean = 0.0;
    for &(k, c, s) in config.b.terms() {
        if k == 0 {
            mean = c;
            continue;
        }
        if let Some(list) = &config.modes {
            if !list.contains(&k) {
                continue;
            }
        }
        let solution = solve_mode(m, k, 1.0)?;
        modes.push(CellMode { solution, cos: c, sin: s });
    }
    let k_value = modes.iter().fold(0.0, |acc, md| acc + md.amplitude_sq() * mode_energy(m, &md.solution));
    let boundary = modes
        .iter()
        .map(|md| md.solution.boundary_residual(m, 1.0))
        .fold(0.0, f64::max);
    Ok(CellSolution {
        m,
        b: config.b.clone(),
        modes,
        mean,
        gauge: 0.0,
        k_value,
        residuals: CellResiduals { boundary, qy: None, trace: None },
    })
}

/// Relative discrepancies of the two alternative characterizations of `K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub energy: f64,
    pub qy: f64,
    pub trace: f64,
    pub qy_residual: f64,
    pub trace_residual: f64,
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Compares the closed-form energy with `q_Y(V, g)` (quadrature) and the
/// boundary-trace expression.
pub fn verify_identities(solution: &CellSolution) -> Result<IdentityReport> {
    let qy = solution.qy_value()?;
    let trace = solution.trace_constant();
    let energy = solution.k_value;
    Ok(IdentityReport {
        energy,
        qy,
        trace,
        qy_residual: relative(energy, qy),
        trace_residual: relative(energy, trace),
    })
}

impl CellSolution {
    /// Records the identity residuals in [`CellSolution::residuals`].
    pub fn with_identities(mut self) -> Result<Self> {
        let r = verify_identities(&self)?;
        self.residuals.qy = Some(r.qy_residual);
        self.residuals.trace = Some(r.trace_residual);
        Ok(self)
    }

    /// Contribution of each mode to `K`, as `(k, energy)`.
    pub fn mode_energies(&self) -> Vec<(u32, f64)> {
        self.modes
            .iter()
            .map(|md| (md.solution.k, md.amplitude_sq() * mode_energy(self.m, &md.solution)))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biharmonic_mode_by_hand() {
        let s = solve_mode(2, 1, 3.0).unwrap();
        let mu = 2.0 * PI;
        assert!((s.coeffs[0] - 3.0).abs() < 1e-14);
        assert!((s.coeffs[1] + 1.5 * mu).abs() < 1e-12);
        let k = strange_constant(&CellConfig::new(2, TrigPolynomial::two_plus_cos())).unwrap();
        assert!((k.k_value - 6.0 * PI.powi(3)).abs() < 1e-9);
        assert!((k.trace_constant() - 6.0 * PI.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_requests() {
        assert!(solve_mode(2, 0, 1.0).is_err());
        assert!(solve_mode(1, 1, 1.0).is_err());
        assert!(strange_constant(&CellConfig::new(1, TrigPolynomial::constant(1.0))).is_err());
    }
}
