//! The polyharmonic form `∫ D^m u : D^m v + u v`, its flat-boundary Green
//! operators and the `q_Y` functional.

mod boundary;
mod green;
mod qy;
mod weights;

pub use boundary::{boundary_operator_bt, BoundaryOperatorSpec, BoundaryTerm, DiffOperator};
pub use green::{
    flat_box, green_flat_residual, green_flat_terms, green_strong_residual, green_strong_terms, GreenReport,
};
pub use qy::{qy_evaluate, qy_spec, QYSpec, QYTerm};
pub use weights::{frobenius_weights, repeated_index_sum, FrobeniusWeights};
