use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{OscillatingProfile, VerticalMap};
use crate::spline::{graded_breaks, uniform_breaks, BSplineBasis1D, ConstrainedSpace, ConstraintSet, Side, TensorSplineSpace};

/// Which problem a pencil discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VariantTag {
    /// Strong intermediate conditions on the perturbed domain `Ω_ε`.
    SibcOnOmegaEps,
    /// Strong intermediate conditions on the limit domain `Ω`.
    SibcLimit,
    /// Additionally `∂_N^{m-1} u = 0` on the top edge `W`.
    DirichletOnWLimit,
    /// Strong intermediate conditions plus the boundary term `K ∫_W ∂_N^{m-1}u ∂_N^{m-1}v`.
    CriticalLimit,
    /// All jets of order `< m` vanish on the whole boundary.
    FullDirichlet,
}

/// Problem description: operator order, geometry, boundary conditions.
#[derive(Clone, Debug)]
pub struct ProblemVariant {
    pub tag: VariantTag,
    pub m: usize,
    /// Width of the chart `W = (0, width)`.
    pub width: f64,
    pub map: VerticalMap,
    pub strange_k: Option<f64>,
}

impl ProblemVariant {
    fn limit(tag: VariantTag, m: usize) -> Self {
        ProblemVariant { tag, m, width: 1.0, map: VerticalMap::identity(), strange_k: None }
    }

    pub fn sibc_on(profile: OscillatingProfile, m: usize) -> Self {
        ProblemVariant {
            tag: VariantTag::SibcOnOmegaEps,
            m,
            width: 1.0,
            map: VerticalMap::new(profile),
            strange_k: None,
        }
    }

    pub fn sibc_limit(m: usize) -> Self {
        Self::limit(VariantTag::SibcLimit, m)
    }

    pub fn dirichlet_on_w(m: usize) -> Self {
        Self::limit(VariantTag::DirichletOnWLimit, m)
    }

    pub fn critical(m: usize, k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Argument(format!("strange constant K = {k} must be non-negative")));
        }
        Ok(ProblemVariant { strange_k: Some(k), ..Self::limit(VariantTag::CriticalLimit, m) })
    }

    pub fn full_dirichlet(m: usize) -> Self {
        Self::limit(VariantTag::FullDirichlet, m)
    }

    pub fn with_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }

    /// Coefficient layers removed on each edge; axis 0 is `x̄`, axis 1 is
    /// the vertical reference variable with the top edge on the high side.
    pub fn constraints(&self) -> ConstraintSet {
        let m = self.m;
        match self.tag {
            VariantTag::SibcOnOmegaEps | VariantTag::SibcLimit | VariantTag::CriticalLimit => {
                ConstraintSet::all_sides(2, m - 1)
            }
            VariantTag::DirichletOnWLimit => ConstraintSet::all_sides(2, m - 1).with(1, Side::High, m),
            VariantTag::FullDirichlet => ConstraintSet::all_sides(2, m),
        }
    }
}

/// Mesh parameters for the reference rectangle `(0, width) × (-1, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discretization {
    pub degree: usize,
    pub elements: [usize; 2],
    /// Ratio of consecutive vertical element sizes toward the top edge
    /// (`1` is uniform, `< 1` refines near the top).
    pub vertical_grading: f64,
}

impl Discretization {
    pub fn uniform(degree: usize, nx: usize, ny: usize) -> Self {
        Discretization { degree, elements: [nx, ny], vertical_grading: 1.0 }
    }

    pub fn refined(&self) -> Self {
        Discretization {
            degree: self.degree,
            elements: [2 * self.elements[0], 2 * self.elements[1]],
            vertical_grading: self.vertical_grading.sqrt(),
        }
    }
}

/// Constrained spline space on the reference rectangle for `variant`.
pub fn build_space(variant: &ProblemVariant, disc: &Discretization) -> Result<ConstrainedSpace> {
    if disc.degree < variant.m {
        return Err(Error::Configuration(format!(
            "degree {} is below the order m = {} needed for conformity",
            disc.degree, variant.m
        )));
    }
    let bx = BSplineBasis1D::clamped(disc.degree, uniform_breaks(0.0, variant.width, disc.elements[0])?)?;
    let by = BSplineBasis1D::clamped(disc.degree, graded_breaks(-1.0, 0.0, disc.elements[1], disc.vertical_grading)?)?;
    ConstrainedSpace::new(TensorSplineSpace::new(vec![bx, by]), variant.constraints())
}
