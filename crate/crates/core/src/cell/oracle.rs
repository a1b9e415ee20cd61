use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{strange_constant, CellConfig};
use crate::error::{Error, Result};
use crate::forms::frobenius_weights;
use crate::geometry::TrigPolynomial;
use crate::spline::{graded_breaks, uniform_breaks, BSplineBasis1D, ConstrainedSpace, ConstraintSet, Side, TensorSplineSpace};
use crate::tensor_calculus::{factorial, JetField, Polynomial};

/// Spline mesh for the truncated strip `Y × (depth, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationMesh {
    pub degree: usize,
    /// Periodic elements across `Y`.
    pub tangential: usize,
    /// Uniform elements on `(depth, -1)`.
    pub deep: usize,
    /// Graded elements on `(-1, 0)`.
    pub top: usize,
    pub top_grading: f64,
}

impl TruncationMesh {
    pub fn default_for(m: usize) -> Self {
        TruncationMesh { degree: m + 1, tangential: 12, deep: 6, top: 12, top_grading: 0.85 }
    }

    pub fn refined(&self) -> Self {
        TruncationMesh {
            degree: self.degree,
            tangential: 2 * self.tangential,
            deep: 2 * self.deep,
            top: 2 * self.top,
            top_grading: self.top_grading.sqrt(),
        }
    }
}

fn power(p: &Polynomial, n: usize) -> Polynomial {
    (0..n).fold(Polynomial::constant(1, 1.0), |acc, _| acc.mul(p))
}

/// `K` from a Galerkin solve on `Y × (depth, 0)` with all jets below order
/// `m` vanishing at the bottom. The mean of `b` is energy-free on the half
/// strip and is left out of the datum, which is lifted by
/// `(b - b̄) y^{m-2}/(m-2)! (1 + y)^{m+1}` on `(-1, 0)`.
pub fn truncated_cell_constant(m: usize, b: &TrigPolynomial, depth: f64, mesh: &TruncationMesh) -> Result<f64> {
    if m < 2 {
        return Err(Error::Argument(format!("cell problem needs m >= 2, got {m}")));
    }
    if !(depth <= -2.0) {
        return Err(Error::Argument(format!("truncation depth {depth} must be at most -2")));
    }
    let p = mesh.degree;
    let tang = BSplineBasis1D::periodic_uniform(-0.5, 0.5, p, mesh.tangential)?;
    let mut breaks = uniform_breaks(depth, -1.0, mesh.deep)?;
    breaks.pop();
    breaks.extend(graded_breaks(-1.0, 0.0, mesh.top, mesh.top_grading)?);
    let normal = BSplineBasis1D::clamped(p, breaks)?;
    let constraints = ConstraintSet::none(2).with(1, Side::Low, m).with(1, Side::High, m - 1);
    let space = ConstrainedSpace::new(TensorSplineSpace::new(vec![tang, normal]), constraints)?;

    let oscillating = TrigPolynomial::new(b.terms().iter().copied().filter(|t| t.0 != 0).collect());
    let lift = power(&Polynomial::univariate(1, 0, &[0.0, 1.0]), m - 2)
        .mul(&power(&Polynomial::univariate(1, 0, &[1.0, 1.0]), m + 1))
        .scaled(1.0 / factorial(m - 2));

    let weights = frobenius_weights(m, 2);
    let n = space.free_dim();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut f = DVector::<f64>::zeros(n);
    let mut lift_energy = 0.0;
    let quad = space.space().quadrature(p + m + 2);
    let mut failure = None;
    quad.for_each(|x, w| {
        if failure.is_some() {
            return;
        }
        let ev = match space.space().eval_basis(x, m) {
            Ok(ev) => ev,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let lift_jet = (x[1] > -1.0).then(|| lift.jet(&[x[1]], m));
        let phi: Vec<f64> = weights
            .weights
            .iter()
            .map(|(g, _)| {
                let e = g.exponents();
                lift_jet
                    .as_ref()
                    .map_or(0.0, |lj| oscillating.derivative(x[0], e[0]) * lj.get_exps(&[e[1]]))
            })
            .collect();
        lift_energy += w * weights.weights.iter().zip(&phi).map(|((_, wt), v)| wt * v * v).sum::<f64>();
        let active: Vec<(usize, Vec<f64>)> = ev
            .indices
            .iter()
            .zip(&ev.jets)
            .filter_map(|(&g, jet)| {
                space
                    .free_of(g)
                    .map(|i| (i, weights.weights.iter().map(|(gam, _)| jet.get(gam)).collect()))
            })
            .collect();
        for (i, di) in &active {
            let mut fi = 0.0;
            for (q, (_, wt)) in weights.weights.iter().enumerate() {
                fi += wt * phi[q] * di[q];
            }
            f[*i] += w * fi;
            for (j, dj) in &active {
                let mut s = 0.0;
                for (q, (_, wt)) in weights.weights.iter().enumerate() {
                    s += wt * di[q] * dj[q];
                }
                a[(*i, *j)] += w * s;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let a = 0.5 * (&a + a.transpose());
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Solver("truncated cell stiffness is not positive definite".into()))?;
    let psi = chol.solve(&(-&f));
    Ok(lift_energy + f.dot(&psi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationReport {
    pub semi_analytic: f64,
    /// Depth `-6` on the given mesh and on its refinement.
    pub deep: f64,
    pub deep_refined: f64,
    /// Depth `-4` on the refined mesh.
    pub shallow_refined: f64,
    /// `|deep_refined - semi_analytic| / semi_analytic`.
    pub relative_error: f64,
    /// `|shallow_refined - deep_refined| / deep_refined`.
    pub depth_sensitivity: f64,
}

/// Compares the semi-analytic `K` with truncated-strip Galerkin values.
pub fn truncation_study(m: usize, b: &TrigPolynomial, mesh: &TruncationMesh) -> Result<TruncationReport> {
    let semi_analytic = strange_constant(&CellConfig::new(m, b.clone()))?.k_value;
    let deep = truncated_cell_constant(m, b, -6.0, mesh)?;
    let fine = mesh.refined();
    let deep_refined = truncated_cell_constant(m, b, -6.0, &fine)?;
    let mut shallow_mesh = fine.clone();
    shallow_mesh.deep = fine.deep * 3 / 5;
    let shallow_refined = truncated_cell_constant(m, b, -4.0, &shallow_mesh)?;
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b.abs() };
    Ok(TruncationReport {
        semi_analytic,
        deep,
        deep_refined,
        shallow_refined,
        relative_error: rel(deep_refined, semi_analytic),
        depth_sensitivity: rel(shallow_refined, deep_refined),
    })
}
