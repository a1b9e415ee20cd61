//! Pencils of the polyharmonic form on mapped and limit domains, the strange
//! boundary term, and dense symmetric solvers.

mod eigen;
mod pencil;
mod variant;

pub use eigen::{pencil_residual, solve_generalized_eigen, solve_poisson, EigenSolution};
pub use pencil::{
    assemble_pencil, assemble_pencil_with, assemble_pencil_unmapped, assemble_strange_term, load_vector, symmetrize, SymmetricPencil,
};
pub use variant::{build_space, Discretization, ProblemVariant, VariantTag};
