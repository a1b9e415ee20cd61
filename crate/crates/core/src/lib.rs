//! Numerical laboratory for polyharmonic operators `(-Δ)^m + I` with strong
//! intermediate boundary conditions on domains with a rapidly oscillating
//! boundary `x_N < ε^α b(x̄/ε)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor_calculus`]: multi-indices, set partitions, jets, Leibniz and
//!   Faà di Bruno formulas.
//! * [`forms`]: Frobenius weights of `D^m u : D^m v`, the flat-boundary
//!   Green operators `B_t`, Green-identity verifiers and the `q_Y` functional.
//! * [`geometry`]: oscillating profiles, the vertical graph map, the
//!   flattening map `h_ε`, profile distances and the stability classifier.
//! * [`spline`]: B-spline bases, constrained tensor spaces and Gauss rules.
//! * [`assembly`]: pencils for the mapped and limit problems, the strange
//!   boundary term, generalized eigensolvers and Poisson solves.
//! * [`cell`]: the semi-infinite periodic cell problem and the constant `K`.
//! * [`unfolding`]: the periodic unfolding operator and moment projector.
//! * [`experiments`]: batch drivers behind the `polylab` binary.

pub mod assembly;
pub mod cell;
pub mod error;
pub mod experiments;
pub mod forms;
pub mod geometry;
pub mod spline;
pub mod tensor_calculus;
pub mod unfolding;

pub use error::{Error, Result};
