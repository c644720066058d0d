//! Sparse and dense linear-algebra kernels used by the assembly and the
//! inf-sup eigensolver.

mod cholesky;
mod jacobi;
mod sparse;

pub use cholesky::SparseCholesky;
pub use jacobi::sym_eigenvalues;
pub use sparse::{CscMatrix, Triplets};
