//! One-step-ahead forecasting with sieve coefficients evaluated at the right
//! boundary, and sieve estimation of the forecast MSE.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::sieve_fit::SieveFit;

/// Floor applied to the variance estimate, as a fraction of the mean squared
/// residual.
const MSE_FLOOR_FRACTION: f64 = 0.01;

/// Forecast output: the point forecast, the estimated forecast MSE and the
/// boundary coefficient values.
#[derive(Debug, Clone, Serialize)]
pub struct ForecastReport {
    /// x̂_{n+1} = φ̂_0(1) + Σ_j φ̂_j(1)·x_{n+1−j}
    pub point: f64,
    /// φ̂(1), floored at max(1e−12, 1% of the mean squared residual)
    pub mse_hat: f64,
    /// (φ̂_0(1), ..., φ̂_b(1))
    pub phi_at_one: Vec<f64>,
    pub b: usize,
    pub c: usize,
    pub basis: String,
    pub diagnostics: ForecastDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastDiagnostics {
    /// ‖(ε̂²) − V·𝔟̂‖ of the variance regression.
    pub variance_residual_norm: f64,
    /// True when the raw boundary value fell below the floor.
    pub floored: bool,
}

/// x̂_{n+1} from the fitted coefficient functions evaluated at t = 1.
pub fn forecast_one_step(fit: &SieveFit, x: &TimeSeries) -> Result<f64> {
    if x.len() != fit.n() {
        return Err(Error::Config(format!(
            "fit was built from a series of length {}, got {}",
            fit.n(),
            x.len()
        )));
    }
    let phi = fit.phi_hat_all(1.0)?;
    let n = x.len();
    let mut point = phi[0];
    for j in 1..=fit.b() {
        point += phi[j] * x[n - j];
    }
    Ok(point)
}

/// Estimated forecast MSE φ̂(1): OLS of the squared residuals on the basis,
/// evaluated at the boundary and floored.
pub fn estimate_mse(fit: &SieveFit) -> Result<(f64, ForecastDiagnostics)> {
    let residuals = fit.residuals();
    let n = fit.n();
    let b = fit.b();
    let c = fit.c();
    let spec = fit.spec();
    let rows = residuals.len();

    let mut design = DMatrix::<f64>::zeros(rows, c);
    let mut buf = vec![0.0; c];
    for r in 0..rows {
        let t = (b + 1 + r) as f64 / n as f64;
        spec.eval_into(t, &mut buf);
        for (k, &v) in buf.iter().enumerate() {
            design[(r, k)] = v;
        }
    }
    let response = DVector::<f64>::from_fn(rows, |r, _| residuals[r] * residuals[r]);

    let qr = design.clone().qr();
    let r_mat = qr.r();
    let norm = design.norm();
    for k in 0..c {
        if r_mat[(k, k)].abs() < 1e-10 * norm {
            return Err(Error::SingularVarianceDesign);
        }
    }
    let mut qty = response.clone();
    qr.q_tr_mul(&mut qty);
    let coeffs = r_mat
        .solve_upper_triangular(&qty.rows(0, c).into_owned())
        .ok_or(Error::SingularVarianceDesign)?;

    let basis_at_one = spec.eval(1.0)?;
    let raw: f64 = coeffs
        .iter()
        .zip(basis_at_one.iter())
        .map(|(a, b)| a * b)
        .sum();
    let mean_sq = response.iter().sum::<f64>() / rows as f64;
    let floor = (MSE_FLOOR_FRACTION * mean_sq).max(1e-12);
    let floored = raw < floor;
    let mse = if floored { floor } else { raw };
    let variance_residual_norm = (&response - &design * &coeffs).norm();
    Ok((mse, ForecastDiagnostics { variance_residual_norm, floored }))
}

/// Full forecast report for a fitted model.
pub fn forecast_report(fit: &SieveFit, x: &TimeSeries) -> Result<ForecastReport> {
    let point = forecast_one_step(fit, x)?;
    let (mse_hat, diagnostics) = estimate_mse(fit)?;
    Ok(ForecastReport {
        point,
        mse_hat,
        phi_at_one: fit.phi_hat_all(1.0)?,
        b: fit.b(),
        c: fit.c(),
        basis: fit.spec().family_name(),
        diagnostics,
    })
}
