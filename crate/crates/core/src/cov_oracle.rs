//! Covariance-level oracle for models with known local autocovariance:
//! Yule-Walker solutions, local spectral density and UPDC checks. The
//! statistical estimators elsewhere in the crate are validated against this
//! module.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

type GammaFn = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;
type MeanFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Declared polynomial tail bound |γ(t,j)| ≤ scale·j^{−decay} for j ≥ 1.
#[derive(Debug, Clone, Copy)]
pub struct TailBound {
    pub scale: f64,
    pub decay: f64,
}

/// Local autocovariance function γ(t, j) of a locally stationary model, with
/// trend μ(t) and a declared covariance tail bound.
#[derive(Clone)]
pub struct LocalAcov {
    gamma: GammaFn,
    mu: MeanFn,
    tail: TailBound,
}

impl std::fmt::Debug for LocalAcov {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalAcov").field("tail", &self.tail).finish()
    }
}

impl LocalAcov {
    pub fn new(
        gamma: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
        mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail: TailBound,
    ) -> Self {
        Self { gamma: Arc::new(gamma), mu: Arc::new(mu), tail }
    }

    pub fn gamma(&self, t: f64, j: usize) -> f64 {
        (self.gamma)(t, j)
    }

    pub fn mu(&self, t: f64) -> f64 {
        (self.mu)(t)
    }

    pub fn tail(&self) -> TailBound {
        self.tail
    }

    /// White noise with variance `sigma2`.
    pub fn white_noise(sigma2: f64) -> Self {
        Self::new(
            move |_, j| if j == 0 { sigma2 } else { 0.0 },
            |_| 0.0,
            TailBound { scale: 0.0, decay: 10.0 },
        )
    }

    /// Stationary AR(1): γ(j) = σ²·a^j/(1−a²).
    pub fn stationary_ar1(a: f64, sigma2: f64) -> Self {
        let var = sigma2 / (1.0 - a * a);
        Self::new(
            move |_, j| var * a.powi(j as i32),
            |_| 0.0,
            geometric_tail(a.abs(), var),
        )
    }

    /// Stationary MA(1): γ(0) = (1+θ²)σ², γ(1) = θσ², zero beyond.
    pub fn stationary_ma1(theta: f64, sigma2: f64) -> Self {
        Self::new(
            move |_, j| match j {
                0 => (1.0 + theta * theta) * sigma2,
                1 => theta * sigma2,
                _ => 0.0,
            },
            |_| 0.0,
            TailBound { scale: theta.abs() * sigma2, decay: 10.0 },
        )
    }

    /// Stationary ARMA(1,1): x_i − φ·x_{i−1} = ε_i + θ·ε_{i−1}.
    pub fn stationary_arma11(phi: f64, theta: f64, sigma2: f64) -> Self {
        let g0 = sigma2 * (1.0 + 2.0 * phi * theta + theta * theta) / (1.0 - phi * phi);
        let g1 = sigma2 * (1.0 + phi * theta) * (phi + theta) / (1.0 - phi * phi);
        Self::new(
            move |_, j| match j {
                0 => g0,
                _ => g1 * phi.powi(j as i32 - 1),
            },
            |_| 0.0,
            geometric_tail(phi.abs(), g1.abs().max(g0)),
        )
    }

    /// Locally stationary AR(1) with coefficient a(t) and innovation variance
    /// σ²(t): γ(t,j) = σ²(t)·a(t)^j/(1−a(t)²).
    pub fn local_ar1(
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sigma2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail: TailBound,
    ) -> Self {
        Self::new(
            move |t, j| {
                let at = a(t);
                sigma2(t) * at.powi(j as i32) / (1.0 - at * at)
            },
            |_| 0.0,
            tail,
        )
    }

    /// Locally stationary AR(2) with coefficients a1(t), a2(t) and innovation
    /// variance σ²(t); γ(t,·) from the frozen-t stationary AR(2) recursion.
    pub fn local_ar2(
        a1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sigma2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail: TailBound,
    ) -> Self {
        Self::new(
            move |t, j| {
                let (p1, p2, s2) = (a1(t), a2(t), sigma2(t));
                let g0 = s2 * (1.0 - p2)
                    / ((1.0 + p2) * ((1.0 - p2) * (1.0 - p2) - p1 * p1));
                let g1 = p1 / (1.0 - p2) * g0;
                match j {
                    0 => g0,
                    1 => g1,
                    _ => {
                        let (mut gm2, mut gm1) = (g0, g1);
                        for _ in 2..=j {
                            let g = p1 * gm1 + p2 * gm2;
                            gm2 = gm1;
                            gm1 = g;
                        }
                        gm1
                    }
                }
            },
            |_| 0.0,
            tail,
        )
    }

    /// Locally stationary MA(2) with coefficients a1(t), a2(t) and innovation
    /// variance σ²(t), frozen-t approximation.
    pub fn local_ma2(
        a1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        a2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sigma2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tail: TailBound,
    ) -> Self {
        Self::new(
            move |t, j| {
                let (b1, b2, s2) = (a1(t), a2(t), sigma2(t));
                match j {
                    0 => s2 * (1.0 + b1 * b1 + b2 * b2),
                    1 => s2 * (b1 + b1 * b2),
                    2 => s2 * b2,
                    _ => 0.0,
                }
            },
            |_| 0.0,
            tail,
        )
    }
}

/// Represents a geometric covariance decay C·a^j as a polynomial tail bound
/// with a fixed reference exponent.
fn geometric_tail(a: f64, c0: f64) -> TailBound {
    const DECAY: f64 = 6.0;
    // scale = max_j c0·a^j·j^decay, maximized near j = decay/ln(1/a)
    let mut scale: f64 = 0.0;
    for j in 1..200usize {
        scale = scale.max(c0 * a.powi(j as i32) * (j as f64).powf(DECAY));
    }
    TailBound { scale, decay: DECAY }
}

/// Solution of the order-b Yule-Walker system at rescaled time t.
#[derive(Debug, Clone)]
pub struct YwSolution {
    pub t: f64,
    pub b: usize,
    /// (φ_1(t), ..., φ_b(t))
    pub phi: Vec<f64>,
    /// φ_0(t) = μ(t)·(1 − Σ_j φ_j(t))
    pub phi0: f64,
    /// Condition estimate λ_max/λ_min of Γ(t).
    pub cond: f64,
    /// ‖Γ(t)·φ − γ(t)‖ of the accepted solve.
    pub residual: f64,
}

/// Relative eigenvalue floor below which Γ(t) is declared not positive
/// definite.
pub const UPDC_EIG_FLOOR: f64 = 1e-12;

/// Solves Γ(t)·φ = γ(t) for the order-b prediction coefficients, where Γ(t)
/// is the b×b Toeplitz matrix with entries γ(t, |i−j|).
pub fn yule_walker(acov: &LocalAcov, t: f64, b: usize) -> Result<YwSolution> {
    if b == 0 {
        return Err(Error::Config("Yule-Walker order b must be >= 1".into()));
    }
    let gamma0 = acov.gamma(t, 0);
    let mut toeplitz = DMatrix::<f64>::zeros(b, b);
    for i in 0..b {
        for j in 0..b {
            toeplitz[(i, j)] = acov.gamma(t, i.abs_diff(j));
        }
    }
    let rhs = DVector::<f64>::from_fn(b, |i, _| acov.gamma(t, i + 1));

    let eig = toeplitz.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.min();
    let max_eig = eig.eigenvalues.max();
    if min_eig <= UPDC_EIG_FLOOR * gamma0 {
        return Err(Error::UpdcViolation { t, min_eig });
    }
    let chol = toeplitz
        .clone()
        .cholesky()
        .ok_or(Error::UpdcViolation { t, min_eig })?;
    let phi = chol.solve(&rhs);
    let residual = (&toeplitz * &phi - &rhs).norm();
    let phi0 = acov.mu(t) * (1.0 - phi.iter().sum::<f64>());
    Ok(YwSolution {
        t,
        b,
        phi: phi.iter().copied().collect(),
        phi0,
        cond: max_eig / min_eig,
        residual,
    })
}

/// Truncated local spectral density with its truncation-error bound.
#[derive(Debug, Clone, Copy)]
pub struct SpectralValue {
    /// γ(t,0) + 2·Σ_{j=1}^{J} γ(t,j)·cos(jω)
    pub value: f64,
    /// 2·C·Σ_{j>J} j^{−τ} bounded through the declared tail.
    pub truncation_bound: f64,
}

/// Local spectral density f(t, ω) truncated at lag J.
pub fn local_spectral_density(acov: &LocalAcov, t: f64, omega: f64, lag: usize) -> SpectralValue {
    let mut value = acov.gamma(t, 0);
    for j in 1..=lag {
        value += 2.0 * acov.gamma(t, j) * (j as f64 * omega).cos();
    }
    let tail = acov.tail();
    // Σ_{j>J} j^{−τ} ≤ J^{1−τ}/(τ−1)
    let truncation_bound = if tail.decay > 1.0 {
        2.0 * tail.scale * (lag as f64).powf(1.0 - tail.decay) / (tail.decay - 1.0)
    } else {
        f64::INFINITY
    };
    SpectralValue { value, truncation_bound }
}

/// Result of the UPDC grid check.
#[derive(Debug, Clone, Copy)]
pub struct UpdcReport {
    pub kappa_min: f64,
    pub pass: bool,
}

/// Minimizes the truncated local spectral density over the given grids;
/// UPDC holds when the minimum is positive.
pub fn updc_check(
    acov: &LocalAcov,
    t_grid: &[f64],
    omega_grid: &[f64],
    lag: usize,
) -> Result<UpdcReport> {
    if t_grid.is_empty() || omega_grid.is_empty() {
        return Err(Error::Config("updc_check needs nonempty grids".into()));
    }
    let mut kappa_min = f64::INFINITY;
    for &t in t_grid {
        for &omega in omega_grid {
            let f = local_spectral_density(acov, t, omega, lag).value;
            kappa_min = kappa_min.min(f);
        }
    }
    Ok(UpdcReport { kappa_min, pass: kappa_min > 0.0 })
}

/// One row of the coefficient-decay diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct DecayEntry {
    pub lag: usize,
    pub magnitude: f64,
    /// ((log j + 1)/j)^{τ−1}
    pub envelope: f64,
}

/// Reports |φ_j(t)| next to the theoretical decay envelope for j = 1..=b.
/// Diagnostic only; no pass/fail.
pub fn coefficient_decay_report(acov: &LocalAcov, t: f64, b: usize) -> Result<Vec<DecayEntry>> {
    let sol = yule_walker(acov, t, b)?;
    let tau = acov.tail().decay;
    Ok(sol
        .phi
        .iter()
        .enumerate()
        .map(|(idx, &phi)| {
            let j = (idx + 1) as f64;
            DecayEntry {
                lag: idx + 1,
                magnitude: phi.abs(),
                envelope: ((j.ln() + 1.0) / j).powf(tau - 1.0),
            }
        })
        .collect())
}

/// Uniform grid of `len` points spanning [lo, hi] inclusive.
pub fn uniform_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![lo];
    }
    (0..len)
        .map(|i| lo + (hi - lo) * i as f64 / (len - 1) as f64)
        .collect()
}
