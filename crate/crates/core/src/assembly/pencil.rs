use nalgebra::{DMatrix, DVector};

use super::variant::{ProblemVariant, VariantTag};
use crate::error::{Error, Result};
use crate::forms::frobenius_weights;
use crate::geometry::ChainMatrix;
use crate::spline::{ConstrainedSpace, TensorQuadrature};
use crate::tensor_calculus::{jet_layout, DerivativeTable};

/// Stiffness-plus-mass matrix `A` of the full form and mass matrix `B`.
#[derive(Clone, Debug)]
pub struct SymmetricPencil {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl SymmetricPencil {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

const ASYMMETRY_GUARD: f64 = 1e-10;

/// Averages `M` with its transpose after checking the asymmetry is rounding-level.
pub fn symmetrize(m: &mut DMatrix<f64>, name: &str) -> Result<()> {
    let n = m.nrows();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (m[(i, j)], m[(j, i)]);
            worst = worst.max((x - y).abs());
            let avg = 0.5 * (x + y);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    if worst > ASYMMETRY_GUARD * scale {
        return Err(Error::Assembly(format!("{name} asymmetric: {worst:e} relative to {scale:e}")));
    }
    Ok(())
}

/// Physical data of the active basis functions at one quadrature point.
struct PointData {
    free: Vec<usize>,
    /// `D^γ φ` for `|γ| = m`, per active free function.
    top: Vec<Vec<f64>>,
    values: Vec<f64>,
    weight: f64,
}

fn point_data(
    variant: &ProblemVariant,
    space: &ConstrainedSpace,
    x: &[f64],
    w: f64,
    mapped: bool,
) -> Result<PointData> {
    let m = variant.m;
    let ev = space.space().eval_basis(x, m)?;
    let (jac, chain) = if mapped {
        let map = &variant.map;
        let jac = map.jacobian(x[0])?;
        let xn = map.ell(x[0], x[1])?;
        let inv = map.inverse_jets(x[0], xn, m)?;
        (jac, Some(ChainMatrix::new(&inv, m)?))
    } else {
        (1.0, None)
    };
    let layout = jet_layout(2, m);
    let top_start = layout.offset_of_order(m);
    let mut free = Vec::new();
    let mut top = Vec::new();
    let mut values = Vec::new();
    for (&g, jet) in ev.indices.iter().zip(&ev.jets) {
        let Some(f) = space.free_of(g) else { continue };
        let phys: DerivativeTable = match &chain {
            Some(c) => c.apply(jet),
            None => jet.clone(),
        };
        free.push(f);
        top.push(phys.values()[top_start..].to_vec());
        values.push(phys.value());
    }
    Ok(PointData { free, top, values, weight: w * jac })
}

fn assemble(variant: &ProblemVariant, space: &ConstrainedSpace, quad: &TensorQuadrature, mapped: bool) -> Result<SymmetricPencil> {
    let m = variant.m;
    if space.space().dim() != 2 {
        return Err(Error::Configuration("pencils are assembled on planar rectangles".into()));
    }
    let n = space.free_dim();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    let weights: Vec<f64> = frobenius_weights(m, 2).weights.iter().map(|(_, w)| *w).collect();
    // frobenius_weights and the jet layout list order-m indices in the same order
    debug_assert!(frobenius_weights(m, 2)
        .weights
        .iter()
        .zip(&jet_layout(2, m).indices()[jet_layout(2, m).offset_of_order(m)..])
        .all(|((g, _), h)| g == h));
    if quad.dim() != 2 {
        return Err(Error::Configuration("quadrature must be two-dimensional".into()));
    }
    let mut failure = None;
    quad.for_each(|x, w| {
        if failure.is_some() {
            return;
        }
        let pd = match point_data(variant, space, x, w, mapped) {
            Ok(pd) => pd,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let k = pd.free.len();
        for i in 0..k {
            let (fi, ti, vi) = (pd.free[i], &pd.top[i], pd.values[i]);
            for j in 0..k {
                let fj = pd.free[j];
                let tj = &pd.top[j];
                let mut s = 0.0;
                for q in 0..weights.len() {
                    s += weights[q] * ti[q] * tj[q];
                }
                let mass = vi * pd.values[j];
                a[(fi, fj)] += pd.weight * (s + mass);
                b[(fi, fj)] += pd.weight * mass;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if let (VariantTag::CriticalLimit, Some(kc)) = (variant.tag, variant.strange_k) {
        a += strange_term(variant.m, space, kc, quad)?;
    }
    symmetrize(&mut a, "A")?;
    symmetrize(&mut b, "B")?;
    if b.clone().cholesky().is_none() {
        return Err(Error::Assembly("mass matrix is not positive definite".into()));
    }
    Ok(SymmetricPencil { a, b })
}

/// Pencil of `∫ D^m u : D^m v + u v` (matrix `A`) and `∫ u v` (matrix `B`)
/// on the physical domain, with reference basis functions pulled back
/// through the vertical map. A map with `1 + g <= 0` at a quadrature point
/// is reported as a geometry error.
pub fn assemble_pencil(variant: &ProblemVariant, space: &ConstrainedSpace, quad_order: usize) -> Result<SymmetricPencil> {
    assemble(variant, space, &space.space().quadrature(quad_order), true)
}

/// [`assemble_pencil`] with an explicit quadrature; the boundary term of the
/// critical variant uses its vertical-face restriction.
pub fn assemble_pencil_with(variant: &ProblemVariant, space: &ConstrainedSpace, quad: &TensorQuadrature) -> Result<SymmetricPencil> {
    assemble(variant, space, quad, true)
}

/// The same pencil computed directly on the reference rectangle, without
/// the map. Agrees with [`assemble_pencil`] when the profile is flat.
pub fn assemble_pencil_unmapped(
    variant: &ProblemVariant,
    space: &ConstrainedSpace,
    quad_order: usize,
) -> Result<SymmetricPencil> {
    assemble(variant, space, &space.space().quadrature(quad_order), false)
}

/// `S_ij = K ∫_W ∂_N^{m-1} φ_i(x̄, 0) ∂_N^{m-1} φ_j(x̄, 0) dx̄` on the limit domain.
pub fn assemble_strange_term(m: usize, space: &ConstrainedSpace, k: f64, quad_order: usize) -> Result<DMatrix<f64>> {
    strange_term(m, space, k, &space.space().quadrature(quad_order))
}

fn strange_term(m: usize, space: &ConstrainedSpace, k: f64, quad: &TensorQuadrature) -> Result<DMatrix<f64>> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Argument(format!("strange constant K = {k} must be non-negative")));
    }
    let n = space.free_dim();
    let mut s = DMatrix::<f64>::zeros(n, n);
    if k == 0.0 {
        return Ok(s);
    }
    let top = space.space().bases()[1].interval().1;
    let mut failure = None;
    quad.for_each_on_face(1, top, |x, w| {
        let ev = match space.space().eval_basis(x, m - 1) {
            Ok(ev) => ev,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let traces: Vec<(usize, f64)> = ev
            .indices
            .iter()
            .zip(&ev.jets)
            .filter_map(|(&g, jet)| space.free_of(g).map(|f| (f, jet.get_exps(&[0, m - 1]))))
            .collect();
        for &(i, ti) in &traces {
            for &(j, tj) in &traces {
                s[(i, j)] += k * w * ti * tj;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    symmetrize(&mut s, "S")?;
    Ok(s)
}

/// Load vector `F_i = ∫ f φ_i` over the physical domain of `variant`.
pub fn load_vector(
    variant: &ProblemVariant,
    space: &ConstrainedSpace,
    f: &dyn Fn(&[f64]) -> f64,
    quad_order: usize,
) -> Result<DVector<f64>> {
    let mut load = DVector::<f64>::zeros(space.free_dim());
    let quad = space.space().quadrature(quad_order);
    let mut failure = None;
    quad.for_each(|x, w| {
        if failure.is_some() {
            return;
        }
        let res = (|| -> Result<()> {
            let ev = space.space().eval_basis(x, 0)?;
            let jac = variant.map.jacobian(x[0])?;
            let xn = variant.map.ell(x[0], x[1])?;
            let fx = f(&[x[0], xn]);
            for (&g, jet) in ev.indices.iter().zip(&ev.jets) {
                if let Some(i) = space.free_of(g) {
                    load[i] += w * jac * fx * jet.value();
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            failure = Some(e);
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(load),
    }
}
