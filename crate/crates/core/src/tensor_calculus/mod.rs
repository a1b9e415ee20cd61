//! Multi-indices, set partitions and exact derivative formulas for products
//! and compositions.

mod finite_difference;
mod formulas;
mod jet;
mod multi_index;
mod partitions;
mod ridge;

pub use finite_difference::{finite_difference_jet, FD_STEP};
pub use formulas::{
    compose_jets, compose_scalar, faa_di_bruno_coefficients, faa_di_bruno_compose, identity_jets, leibniz_product,
    product_jets, unit_jet,
};
pub use jet::{DerivativeTable, JetField, Polynomial};
pub use multi_index::{binomial, factorial, jet_layout, multi_indices_of_order, JetLayout, MultiIndex};
pub use ridge::{RidgeKind, RidgeSum};
pub use partitions::{set_partitions, subsets, SetPartition, MAX_PARTITION_SIZE, MAX_SUBSET_SIZE};
