use serde::Serialize;

use super::boundary::{boundary_operator_bt, DiffOperator};
use super::weights::frobenius_weights;
use crate::error::{Error, Result};
use crate::spline::{Rect, TensorQuadrature};
use crate::tensor_calculus::{DerivativeTable, JetField};

/// Sides of both integrals in a Green identity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GreenReport {
    /// `∫ D^m f : D^m φ`
    pub lhs: f64,
    /// Volume term on the right.
    pub volume: f64,
    /// Boundary terms on the right.
    pub boundary: f64,
    pub residual: f64,
}

/// The box `(-L, L)^{N-1} × (-L, 0)` whose top face is `{x_N = 0}`.
pub fn flat_box(dim: usize, half_width: f64) -> Rect {
    let mut hi = vec![half_width; dim];
    hi[dim - 1] = 0.0;
    Rect::new(vec![-half_width; dim], hi)
}

const SAMPLES_PER_DIR: usize = 7;
const VANISH_TOL: f64 = 1e-9;

fn face_samples(rect: &Rect, axis: usize, value: f64) -> Vec<Vec<f64>> {
    let d = rect.dim();
    let free: Vec<usize> = (0..d).filter(|&k| k != axis).collect();
    let count = SAMPLES_PER_DIR.pow(free.len() as u32);
    (0..count)
        .map(|mut code| {
            let mut x = vec![0.0; d];
            x[axis] = value;
            for &k in &free {
                let i = code % SAMPLES_PER_DIR;
                code /= SAMPLES_PER_DIR;
                let s = i as f64 / (SAMPLES_PER_DIR - 1) as f64;
                x[k] = rect.lo[k] + s * (rect.hi[k] - rect.lo[k]);
            }
            x
        })
        .collect()
}

fn interior_scale(field: &dyn JetField, rect: &Rect, order: usize) -> f64 {
    let d = rect.dim();
    let count = 5usize.pow(d as u32);
    let mut scale: f64 = 0.0;
    for mut code in 0..count {
        let x: Vec<f64> = (0..d)
            .map(|k| {
                let i = code % 5;
                code /= 5;
                rect.lo[k] + (i as f64 + 0.5) / 5.0 * (rect.hi[k] - rect.lo[k])
            })
            .collect();
        let jet = field.jet(&x, order);
        scale = scale.max(jet.values().iter().fold(0.0, |a, v| a.max(v.abs())));
    }
    scale
}

/// Checks that all jets of order `<= order` vanish on the listed faces.
fn check_vanishing(
    name: &str,
    field: &dyn JetField,
    rect: &Rect,
    faces: &[(usize, f64)],
    order: usize,
) -> Result<()> {
    let tol = VANISH_TOL * interior_scale(field, rect, order).max(f64::MIN_POSITIVE);
    for &(axis, value) in faces {
        for x in face_samples(rect, axis, value) {
            let jet = field.jet(&x, order);
            let bad = jet.iter().find(|(_, v)| v.abs() > tol).map(|(b, v)| (b.clone(), v));
            if let Some((beta, v)) = bad {
                return Err(Error::Precondition(format!(
                    "{name}: D^{beta} = {v:e} on face x_{axis} = {value} at {x:?}"
                )));
            }
        }
    }
    Ok(())
}

fn check_dims(f: &dyn JetField, phi: &dyn JetField, rect: &Rect, quad: &TensorQuadrature) -> Result<()> {
    let d = rect.dim();
    if f.dim() != d || phi.dim() != d || quad.dim() != d {
        return Err(Error::Argument("Green verifier: dimension mismatch".into()));
    }
    Ok(())
}

/// Both sides of
/// `∫ D^m f : D^m φ = (-1)^m ∫ Δ^m f φ + Σ_t ∫_{x_N=0} B_t(f) ∂_N^t φ`
/// on the box `(-L, L)^{N-1} × (-L, 0)`, for `φ` vanishing to order `m - 1`
/// on every other face.
pub fn green_flat_terms(
    m: usize,
    f: &dyn JetField,
    phi: &dyn JetField,
    rect: &Rect,
    quad: &TensorQuadrature,
) -> Result<GreenReport> {
    check_dims(f, phi, rect, quad)?;
    let d = rect.dim();
    let mut faces: Vec<(usize, f64)> = Vec::new();
    for k in 0..d {
        faces.push((k, rect.lo[k]));
        if k + 1 < d {
            faces.push((k, rect.hi[k]));
        }
    }
    check_vanishing("phi", phi, rect, &faces, m - 1)?;

    let weights = frobenius_weights(m, d);
    let polyharmonic = DiffOperator::laplacian(d).pow(m);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut lhs = 0.0;
    let mut volume = 0.0;
    let mut err = None;
    quad.for_each(|x, w| {
        let fj = f.jet(x, 2 * m);
        let pj = phi.jet(x, m);
        lhs += w * weights.contract(&fj, &pj);
        match polyharmonic.apply(&fj) {
            Ok(v) => volume += w * sign * v * pj.value(),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let ops: Vec<DiffOperator> = (0..m)
        .map(|t| boundary_operator_bt(m, t).map(|b| b.expand(d)))
        .collect::<Result<_>>()?;
    let mut boundary = 0.0;
    quad.for_each_on_face(d - 1, rect.hi[d - 1], |x, w| {
        let fj = f.jet(x, 2 * m);
        let pj = phi.jet(x, m);
        for (t, op) in ops.iter().enumerate() {
            let mut e = vec![0; d];
            e[d - 1] = t;
            boundary += w * op.apply(&fj).unwrap_or(f64::NAN) * pj.get_exps(&e);
        }
    });
    let residual = (lhs - volume - boundary).abs();
    Ok(GreenReport { lhs, volume, boundary, residual })
}

pub fn green_flat_residual(
    m: usize,
    f: &dyn JetField,
    phi: &dyn JetField,
    rect: &Rect,
    quad: &TensorQuadrature,
) -> Result<f64> {
    Ok(green_flat_terms(m, f, phi, rect, quad)?.residual)
}

/// Both sides of
/// `∫ D^m f : D^m φ = (-1)^m ∫ Δ^m f φ + ∫_∂ ∂_n^m f ∂_n^{m-1} φ`
/// on a box, for `f` and `φ` whose jets of order `<= m - 2` vanish on the
/// whole boundary.
pub fn green_strong_terms(
    m: usize,
    f: &dyn JetField,
    phi: &dyn JetField,
    rect: &Rect,
    quad: &TensorQuadrature,
) -> Result<GreenReport> {
    check_dims(f, phi, rect, quad)?;
    let d = rect.dim();
    let faces: Vec<(usize, f64)> = (0..d).flat_map(|k| [(k, rect.lo[k]), (k, rect.hi[k])]).collect();
    if m >= 2 {
        check_vanishing("f", f, rect, &faces, m - 2)?;
        check_vanishing("phi", phi, rect, &faces, m - 2)?;
    }
    let weights = frobenius_weights(m, d);
    let polyharmonic = DiffOperator::laplacian(d).pow(m);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut lhs = 0.0;
    let mut volume = 0.0;
    quad.for_each(|x, w| {
        let fj = f.jet(x, 2 * m);
        let pj = phi.jet(x, m);
        lhs += w * weights.contract(&fj, &pj);
        volume += w * sign * polyharmonic.apply(&fj).unwrap_or(f64::NAN) * pj.value();
    });
    let mut boundary = 0.0;
    for (k, value, outward) in (0..d).flat_map(|k| [(k, rect.lo[k], -1.0), (k, rect.hi[k], 1.0)]) {
        let mut em = vec![0; d];
        em[k] = m;
        let mut em1 = vec![0; d];
        em1[k] = m - 1;
        // (±1)^m (±1)^{m-1} = ±1
        quad.for_each_on_face(k, value, |x, w| {
            let fj: DerivativeTable = f.jet(x, m);
            let pj = phi.jet(x, m);
            boundary += w * outward * fj.get_exps(&em) * pj.get_exps(&em1);
        });
    }
    let residual = (lhs - volume - boundary).abs();
    Ok(GreenReport { lhs, volume, boundary, residual })
}

pub fn green_strong_residual(
    m: usize,
    f: &dyn JetField,
    phi: &dyn JetField,
    rect: &Rect,
    quad: &TensorQuadrature,
) -> Result<f64> {
    Ok(green_strong_terms(m, f, phi, rect, quad)?.residual)
}
