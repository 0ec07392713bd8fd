//! # qdiv
//!
//! Divergences between positive matrices under the normalized trace
//! `τ = (1/n)·Tr`, and the tooling needed to check their metric behaviour.
//!
//! | Quantity | Definition |
//! |----------|------------|
//! | [`divergence::d_tau_sq`] | `τ log((A+B)/2) − ½τ log A − ½τ log B` |
//! | [`divergence::d_tau_shifted_sq`] | `d_τ(A+tI, B+tI)²` |
//! | [`divergence::qjsd`] | trace Jensen gap of `η(x) = x log x` |
//! | [`divergence::jensen_f`] | trace Jensen gap of an operator convex generator given by its Nevanlinna data |
//! | [`scalar::delta_s_sq`] | scalar divergence `log((x+y)/2) − ½log x − ½log y` |
//!
//! Alongside the divergences:
//!
//! - [`linalg`]: dense Hermitian matrices, a cyclic Jacobi eigensolver and
//!   spectral functional calculus.
//! - [`rearrange`]: eigenvalue step profiles and the rearrangement
//!   inequalities they satisfy.
//! - [`kernel`]: conditional negative definiteness, Schoenberg tests and
//!   Hilbert embeddings of finite kernels.
//! - [`certify`]: outward-rounded interval arithmetic over exact rational
//!   inputs, producing machine-checkable positivity certificates.
//! - [`opgen`]: a registry of operator convex generators and the check that
//!   their Jensen gap splits into shifted trace-log distances.
//! - [`verify`]: seeded randomized property suites with JSON reports.

use thiserror::Error;

pub mod certify;
pub mod divergence;
pub mod kernel;
pub mod linalg;
pub mod opgen;
pub mod quadrature;
pub mod random;
pub mod rearrange;
pub mod scalar;
pub mod verify;
pub mod witness;

pub use divergence::{DivergenceValue, JensenGenerator};
pub use linalg::{HermitianMatrix, Matrix, PositivityClass, SpectralDecomposition};

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    EigFailure { sweeps: usize },

    #[error("argument outside the function domain: {0}")]
    DomainError(String),

    #[error("matrix is not positive definite (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid dimension: {0}")]
    DimensionError(String),

    #[error("adaptive quadrature exceeded {intervals} subintervals (error estimate {error:e})")]
    QuadratureFailure { intervals: usize, error: f64 },

    #[error("squared divergence {0:e} is negative beyond tolerance")]
    NumericalInconsistency(f64),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("coefficients must sum to zero (sum = {0})")]
    CoeffSumNonzero(String),

    #[error("kernel is not conditionally negative definite")]
    NotCnd,

    #[error("trace budget exceeded: Tr(X) = {trace} but T = {budget}")]
    TraceBudgetError { trace: f64, budget: f64 },

    #[error("interval computation overflowed the double range")]
    CertifyOverflow,

    #[error("interval division by an interval containing zero")]
    DivisionByIntervalContainingZero,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
