//! Conforming B-spline spaces and Gauss quadrature.

mod bspline;
mod quadrature;
mod space;

pub use bspline::{graded_breaks, uniform_breaks, BSplineBasis1D, BasisEval, KnotKind};
pub use quadrature::{gauss_legendre, quadrature_rule, QuadratureRule, TensorQuadrature};
pub use space::{
    build_constrained_space, ConstrainedSpace, ConstraintSet, Rect, Side, SplineFunction, TensorBasisEval,
    TensorSplineSpace,
};
