//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A rescaled-time argument fell outside the unit interval.
    #[error("time argument {0} outside [0, 1]")]
    TimeOutOfRange(f64),

    /// A lag index was outside the fitted order.
    #[error("lag index {j} outside 0..={b}")]
    LagOutOfRange { j: usize, b: usize },

    /// Unsupported Daubechies wavelet order.
    #[error("unsupported Daubechies order {0}; supported orders are 1..=10")]
    UnsupportedWavelet(usize),

    /// The basis specification violates its invariants.
    #[error("invalid basis spec: {0}")]
    InvalidBasis(String),

    /// The series is too short for the requested design.
    #[error("series too short: need length > {need}, got {got}")]
    SeriesTooShort { need: usize, got: usize },

    /// The sieve design matrix is numerically rank deficient.
    #[error("design matrix numerically rank deficient in lag block j={block} (column {column})")]
    SingularDesign { block: usize, column: usize },

    /// The moment matrix YᵀY/n is not positive definite.
    #[error("moment matrix YᵀY/n is numerically singular")]
    SingularMoment,

    /// The variance-regression design is singular.
    #[error("variance regression design is numerically singular")]
    SingularVarianceDesign,

    /// The local autocovariance matrix failed the positive-definiteness check.
    #[error("local autocovariance matrix at t={t} not positive definite (UPDC violation; min eigenvalue {min_eig:e})")]
    UpdcViolation { t: f64, min_eig: f64 },

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data is malformed (non-finite values, bad CSV, ...).
    #[error("data error: {0}")]
    Data(String),
}
