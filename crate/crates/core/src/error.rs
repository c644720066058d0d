//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("parameter {xi} outside the parametric domain [{lo}, {hi}]")]
    OutOfDomain { xi: f64, lo: f64, hi: f64 },

    #[error("non-finite value while assembling element {element}: {context}")]
    NonFiniteAssembly { element: usize, context: String },

    #[error("source field out of declared bounds: {0}")]
    SourceBounds(String),

    #[error("matrix is not positive definite (pivot {pivot:.3e} at column {column})")]
    NotPositiveDefinite { column: usize, pivot: f64 },

    #[error(
        "inf-sup violated / multiplier space too rich: \
         Schur complement numerically rank deficient \
         (eigenvalue ratio {ratio:.3e} below {threshold:.3e})"
    )]
    InfSupViolated { ratio: f64, threshold: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigNotConverged { sweeps: usize },

    #[error("{0}")]
    Incompatible(String),
}
