//! Dense complex linear algebra on finite-dimensional Hilbert spaces.
//!
//! Every operator is a [`ComplexMatrix`]; composite spaces are described by
//! a [`CompositeSpace`] whose leg order is always explicit.

pub mod eig;
pub mod matrix;
pub mod random;
pub mod state;

pub use eig::{herm_eig, herm_op_norm, mat_exp_i, min_eigenvalue, op_norm, op_norm_implicit, psd_sqrt, HermEig};
pub use matrix::{apply_left_factor, apply_right_factor, commutator, inner, kron_vec, norm, pauli, tensor, ComplexMatrix};
pub use state::{partial_trace, partial_trace_matrix, CompositeSpace, DensityOperator, StateVector};
