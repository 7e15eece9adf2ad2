//! Time-varying AR sieve approximations to locally stationary time series.
//!
//! The crate fits AR(b) approximations whose coefficient functions φ_j(t) are
//! expanded in a sieve basis and estimated by a single OLS regression, tests
//! stability of the coefficient functions (equivalently, correlation
//! stationarity) with a multiplier bootstrap, and produces one-step forecasts
//! with an estimated MSE. A covariance-level oracle, simulation-model
//! generators and a Monte Carlo harness support validation.
//!
//! Parallelism: the bootstrap replicates, Monte Carlo replicates and tuning
//! candidates run on rayon when the default `parallel` feature is enabled,
//! with a sequential fallback otherwise. Results are bit-identical across
//! thread counts; all randomness flows through counter-based ChaCha streams.

pub mod basis;
pub mod cov_oracle;
pub mod error;
pub mod exec;
pub mod forecast;
pub mod rng;
pub mod series;
pub mod sieve_fit;
pub mod simgen;
pub mod tuning;

pub use basis::{basis_matrices, eval_basis, BasisFamily, BasisMatrices, BasisSpec};
pub use error::{Error, Result};
pub use series::TimeSeries;
pub use sieve_fit::{build_design, fit, h_sequence, SieveFit};
pub use stability_test::{run_test, StabilityResult, TestConfig};
