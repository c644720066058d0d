//! Harmonic mortar coupling for two-domain Poisson problems on annular
//! stator/rotor geometry.
//!
//! The library discretizes the magnetostatic vector-potential equation on two
//! concentric annuli (stator and rotor) with independent tensor-product spline
//! spaces, couples them weakly across the circular air-gap interface through a
//! trigonometric Lagrange-multiplier space, and solves the resulting
//! saddle-point system by a Schur-complement reduction onto the multiplier.
//!
//! The same Schur complement, paired against the `H^{-1/2}` Gram matrix of the
//! multiplier basis, yields the discrete inf-sup constant of the coupling as
//! the smallest generalized eigenvalue; [`infsup`] computes it and compares it
//! against the closed-form constant of the continuous problem on the annulus.
//!
//! ```
//! use harmonic_mortar::geometry::AnnulusGeometry;
//! use harmonic_mortar::infsup::{analytic_beta_min, discrete_infsup, DiscretizationParams, Scope};
//!
//! let geom = AnnulusGeometry::default();
//! let (beta, mode) = analytic_beta_min(&geom, 40);
//! assert_eq!(mode, 0);
//! assert!((beta - 0.13573).abs() < 1e-5);
//!
//! let params = DiscretizationParams { base_n_theta: 16, base_n_r: Some(4), ..Default::default() };
//! let r = discrete_infsup(&geom, &params, 1, 1, 4, Scope::StatorOnly).unwrap();
//! assert!(r.stable && r.beta_discrete <= beta);
//! ```

pub use nalgebra;

pub mod error;
pub mod geometry;
pub mod harmonics;
pub mod infsup;
pub mod linalg;
pub mod quadrature;
pub mod saddle;
pub mod spline;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
