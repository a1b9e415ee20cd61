use serde::Serialize;

use super::bspline::{BSplineBasis1D, KnotKind};
use super::quadrature::{QuadratureRule, TensorQuadrature};
use crate::error::{Error, Result};
use crate::tensor_calculus::{jet_layout, DerivativeTable, JetField};

/// Side of a coordinate interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Low,
    High,
}

/// Tensor product of univariate bases; the last axis varies fastest in the
/// global numbering.
#[derive(Clone, Debug, Serialize)]
pub struct TensorSplineSpace {
    bases: Vec<BSplineBasis1D>,
}

/// Active tensor basis functions at one point with all jets up to an order.
#[derive(Clone, Debug)]
pub struct TensorBasisEval {
    pub indices: Vec<usize>,
    /// One jet table per active function, same order as `indices`.
    pub jets: Vec<DerivativeTable>,
}

impl TensorSplineSpace {
    pub fn new(bases: Vec<BSplineBasis1D>) -> Self {
        assert!(!bases.is_empty(), "tensor space needs at least one factor");
        TensorSplineSpace { bases }
    }

    pub fn bases(&self) -> &[BSplineBasis1D] {
        &self.bases
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn len(&self) -> usize {
        self.bases.iter().map(|b| b.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.bases).fold(0, |acc, (&i, b)| acc * b.len() + i)
    }

    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for (k, b) in self.bases.iter().enumerate().rev() {
            out[k] = lin % b.len();
            lin /= b.len();
        }
        out
    }

    /// Tensor Gauss rule with `order` points per element and direction.
    pub fn quadrature(&self, order: usize) -> TensorQuadrature {
        TensorQuadrature::new(
            self.bases
                .iter()
                .map(|b| QuadratureRule::composite(b.breakpoints(), order.max(1)))
                .collect(),
        )
    }

    pub fn eval_basis(&self, x: &[f64], order: usize) -> Result<TensorBasisEval> {
        let per_axis: Vec<_> = self
            .bases
            .iter()
            .zip(x)
            .map(|(b, &xi)| b.basis_derivatives(xi, order))
            .collect::<Result<_>>()?;
        let d = self.dim();
        let layout = jet_layout(d, order);
        let counts: Vec<usize> = per_axis.iter().map(|e| e.indices.len()).collect();
        let total: usize = counts.iter().product();
        let mut indices = Vec::with_capacity(total);
        let mut jets = Vec::with_capacity(total);
        let mut loc = vec![0usize; d];
        let mut glob = vec![0usize; d];
        for _ in 0..total {
            for k in 0..d {
                glob[k] = per_axis[k].indices[loc[k]];
            }
            indices.push(self.linear_index(&glob));
            let mut t = DerivativeTable::zeros(d, order);
            for (pos, beta) in layout.indices().iter().enumerate() {
                let mut v = 1.0;
                for k in 0..d {
                    v *= per_axis[k].ders[beta.exponents()[k]][loc[k]];
                }
                t.values_mut()[pos] = v;
            }
            jets.push(t);
            for k in (0..d).rev() {
                loc[k] += 1;
                if loc[k] < counts[k] {
                    break;
                }
                loc[k] = 0;
            }
        }
        Ok(TensorBasisEval { indices, jets })
    }

    /// Jets of `Σ c_i B_i` at `x`.
    pub fn evaluate(&self, coeffs: &[f64], x: &[f64], order: usize) -> Result<DerivativeTable> {
        let ev = self.eval_basis(x, order)?;
        let mut out = DerivativeTable::zeros(self.dim(), order);
        for (i, jet) in ev.indices.iter().zip(&ev.jets) {
            out.axpy(coeffs[*i], jet);
        }
        Ok(out)
    }

    /// Space with every element halved in every direction.
    pub fn refined(&self) -> Result<Self> {
        Ok(TensorSplineSpace::new(
            self.bases.iter().map(|b| b.refined()).collect::<Result<_>>()?,
        ))
    }
}

/// Number of coefficient layers zeroed on each side of each axis. Zeroing
/// `j` layers on a clamped side kills the trace and the first `j - 1`
/// normal derivatives there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintSet {
    layers: Vec<[usize; 2]>,
}

impl ConstraintSet {
    pub fn none(dim: usize) -> Self {
        ConstraintSet { layers: vec![[0, 0]; dim] }
    }

    /// `j` layers on every side.
    pub fn all_sides(dim: usize, j: usize) -> Self {
        ConstraintSet { layers: vec![[j, j]; dim] }
    }

    pub fn with(mut self, axis: usize, side: Side, j: usize) -> Self {
        self.layers[axis][side as usize] = j;
        self
    }

    pub fn layers(&self, axis: usize, side: Side) -> usize {
        self.layers[axis][side as usize]
    }

    pub fn dim(&self) -> usize {
        self.layers.len()
    }
}

/// A tensor space restricted to the coefficients left free by a constraint set.
#[derive(Clone, Debug, Serialize)]
pub struct ConstrainedSpace {
    space: TensorSplineSpace,
    constraints: ConstraintSet,
    free: Vec<usize>,
    #[serde(skip)]
    full_to_free: Vec<Option<usize>>,
}

/// Axis-aligned box `[lo_0, hi_0] × … `.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Rect { lo, hi }
    }

    pub fn unit_square() -> Self {
        Rect::new(vec![0.0, 0.0], vec![1.0, 1.0])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Clamped tensor space on `rect` of degree `p` with the given element
/// counts, restricted by `constraints`.
pub fn build_constrained_space(
    rect: &Rect,
    p: usize,
    elements: &[usize],
    constraints: ConstraintSet,
) -> Result<ConstrainedSpace> {
    if elements.len() != rect.dim() || constraints.dim() != rect.dim() {
        return Err(Error::Configuration("dimension mismatch between box, elements and constraints".into()));
    }
    let bases = (0..rect.dim())
        .map(|k| BSplineBasis1D::clamped_uniform(rect.lo[k], rect.hi[k], p, elements[k]))
        .collect::<Result<_>>()?;
    ConstrainedSpace::new(TensorSplineSpace::new(bases), constraints)
}

impl ConstrainedSpace {
    pub fn new(space: TensorSplineSpace, constraints: ConstraintSet) -> Result<Self> {
        if constraints.dim() != space.dim() {
            return Err(Error::Configuration("constraint set dimension mismatch".into()));
        }
        for (k, b) in space.bases().iter().enumerate() {
            let [lo, hi] = constraints.layers[k];
            if b.kind() == KnotKind::Periodic && (lo > 0 || hi > 0) {
                return Err(Error::Configuration(format!("axis {k} is periodic and cannot be constrained")));
            }
            if lo > b.degree() || hi > b.degree() {
                return Err(Error::Configuration(format!(
                    "axis {k}: {lo}/{hi} layers exceed degree {}",
                    b.degree()
                )));
            }
            if lo + hi >= b.len() {
                return Err(Error::Configuration(format!(
                    "axis {k}: {} layers leave no free functions among {}",
                    lo + hi,
                    b.len()
                )));
            }
        }
        let mut free = Vec::new();
        let mut full_to_free = vec![None; space.len()];
        for lin in 0..space.len() {
            let mi = space.multi_index(lin);
            let ok = mi.iter().enumerate().all(|(k, &i)| {
                let [lo, hi] = constraints.layers[k];
                i >= lo && i + hi < space.bases()[k].len()
            });
            if ok {
                full_to_free[lin] = Some(free.len());
                free.push(lin);
            }
        }
        Ok(ConstrainedSpace { space, constraints, free, full_to_free })
    }

    pub fn space(&self) -> &TensorSplineSpace {
        &self.space
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn free_dim(&self) -> usize {
        self.free.len()
    }

    pub fn free_indices(&self) -> &[usize] {
        &self.free
    }

    pub fn free_of(&self, full: usize) -> Option<usize> {
        self.full_to_free[full]
    }

    /// Full coefficient vector from free coefficients.
    pub fn expand(&self, free_coeffs: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.space.len()];
        for (&g, &v) in self.free.iter().zip(free_coeffs) {
            c[g] = v;
        }
        c
    }

    pub fn function(&self, free_coeffs: &[f64]) -> SplineFunction {
        SplineFunction::new(self.space.clone(), self.expand(free_coeffs))
    }

    pub fn refined(&self) -> Result<Self> {
        ConstrainedSpace::new(self.space.refined()?, self.constraints.clone())
    }
}

/// A tensor spline `Σ c_i B_i`.
#[derive(Clone, Debug)]
pub struct SplineFunction {
    space: TensorSplineSpace,
    coeffs: Vec<f64>,
}

impl SplineFunction {
    pub fn new(space: TensorSplineSpace, coeffs: Vec<f64>) -> Self {
        assert_eq!(space.len(), coeffs.len());
        SplineFunction { space, coeffs }
    }

    pub fn space(&self) -> &TensorSplineSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl JetField for SplineFunction {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn jet(&self, x: &[f64], order: usize) -> DerivativeTable {
        self.space
            .evaluate(&self.coeffs, x, order)
            .unwrap_or_else(|e| panic!("spline evaluation at {x:?}: {e}"))
    }
}
