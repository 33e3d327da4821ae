//! Dense complex linear algebra primitives.

mod basis;
mod decomp;
mod matrix;
mod ops;
pub mod random;

pub use basis::{elementary_basis, hermitian_basis, OperatorBasis};
pub(crate) use decomp::check_tol;
pub use decomp::{
    eigh, numerical_rank, pseudo_inverse, pseudo_inverse_from_svd, row_space_projector, singular_values, svd, Eigh,
    Svd, DEFAULT_REL_TOL, HERMITIAN_TOL,
};
pub use matrix::ComplexMatrix;
pub use ops::{identity_vector, kron, partial_trace, partial_transpose, swap_operator, unvec, vec, Factor};
