//! Sieve basis families on [0, 1] and the derived integral matrices.
//!
//! Three families are supported:
//! - normalized Fourier: {1, √2·cos(2πt), √2·sin(2πt), √2·cos(4πt), ...}
//! - normalized Legendre: √(2n+1)·P_n(2t−1), degree-ascending, orthonormal
//!   on [0, 1] (P_0* = 1 included)
//! - periodized Daubechies scaling functions at a single scale J:
//!   φ_{J,k}(t) = 2^{J/2}·Σ_l φ(2^J·t + 2^J·l − k), k = 0..2^J−1, with c = 2^J

mod daubechies;

pub use daubechies::{filter_coefficients, CASCADE_DEPTH, ScalingTable};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Basis family identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisFamily {
    Fourier,
    Legendre,
    DaubechiesPeriodized,
}

/// A sieve basis: family plus number of basis functions c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    family: BasisFamily,
    c: usize,
    /// Daubechies class D-N; ignored by the other families.
    wavelet_order: usize,
}

/// Default Daubechies class used when none is requested.
pub const DEFAULT_WAVELET_ORDER: usize = 9;

impl BasisSpec {
    pub fn fourier(c: usize) -> Result<Self> {
        Self::new(BasisFamily::Fourier, c, DEFAULT_WAVELET_ORDER)
    }

    pub fn legendre(c: usize) -> Result<Self> {
        Self::new(BasisFamily::Legendre, c, DEFAULT_WAVELET_ORDER)
    }

    /// Periodized Daubechies D-N basis with c = 2^{J_n} functions.
    pub fn daubechies(order: usize, c: usize) -> Result<Self> {
        Self::new(BasisFamily::DaubechiesPeriodized, c, order)
    }

    pub fn new(family: BasisFamily, c: usize, wavelet_order: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidBasis("c must be >= 1".into()));
        }
        if family == BasisFamily::DaubechiesPeriodized {
            if !c.is_power_of_two() {
                return Err(Error::InvalidBasis(format!(
                    "wavelet basis needs c = 2^J, got c = {c}"
                )));
            }
            if wavelet_order == 0 || wavelet_order > 10 {
                return Err(Error::UnsupportedWavelet(wavelet_order));
            }
        }
        Ok(Self { family, c, wavelet_order })
    }

    /// Parses "fourier", "legendre" or "daub<N>" (e.g. "daub9").
    pub fn parse(name: &str, c: usize) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "fourier" => Self::fourier(c),
            "legendre" => Self::legendre(c),
            _ => {
                if let Some(num) = lower.strip_prefix("daub") {
                    let order: usize = num
                        .parse()
                        .map_err(|_| Error::InvalidBasis(format!("bad basis name {name:?}")))?;
                    Self::daubechies(order, c)
                } else {
                    Err(Error::InvalidBasis(format!(
                        "unknown basis family {name:?}; expected fourier, legendre or daub<N>"
                    )))
                }
            }
        }
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn wavelet_order(&self) -> usize {
        self.wavelet_order
    }

    /// Resolution J_n with c = 2^{J_n}, for the wavelet family.
    pub fn resolution(&self) -> Option<u32> {
        (self.family == BasisFamily::DaubechiesPeriodized).then(|| self.c.trailing_zeros())
    }

    /// CLI/config name of the family.
    pub fn family_name(&self) -> String {
        match self.family {
            BasisFamily::Fourier => "fourier".into(),
            BasisFamily::Legendre => "legendre".into(),
            BasisFamily::DaubechiesPeriodized => format!("daub{}", self.wavelet_order),
        }
    }

    /// Evaluates the basis vector B(t) = (α_1(t), ..., α_c(t)).
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        let mut out = vec![0.0; self.c];
        self.eval_into(t, &mut out);
        Ok(out)
    }

    /// Evaluation into a caller-provided buffer; `t` must already lie in
    /// [0, 1] and `out` have length c. Hot loops use this to skip the
    /// re-validation and allocation.
    pub(crate) fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert!((0.0..=1.0).contains(&t));
        debug_assert_eq!(out.len(), self.c);
        match self.family {
            BasisFamily::Fourier => fourier_into(t, out),
            BasisFamily::Legendre => legendre_into(t, out),
            BasisFamily::DaubechiesPeriodized => {
                let table = cached_scaling_table(self.wavelet_order);
                periodized_into(&table, self.c.trailing_zeros(), t, out);
            }
        }
    }
}

/// eval_basis(spec, t) — free-function form of [`BasisSpec::eval`].
pub fn eval_basis(spec: &BasisSpec, t: f64) -> Result<Vec<f64>> {
    spec.eval(t)
}

fn fourier_into(t: f64, out: &mut [f64]) {
    use std::f64::consts::PI;
    out[0] = 1.0;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut k = 1;
    let mut freq = 1.0;
    while k < out.len() {
        let arg = 2.0 * PI * freq * t;
        out[k] = sqrt2 * arg.cos();
        k += 1;
        if k < out.len() {
            out[k] = sqrt2 * arg.sin();
            k += 1;
        }
        freq += 1.0;
    }
}

// Three-term recurrence (n+1)P_{n+1}(x) = (2n+1)x·P_n(x) − n·P_{n−1}(x),
// normalized by √(2n+1) so the family is orthonormal on [0,1].
fn legendre_into(t: f64, out: &mut [f64]) {
    let x = 2.0 * t - 1.0;
    let c = out.len();
    let mut p_prev = 1.0;
    let mut p_cur = x;
    out[0] = 1.0;
    if c > 1 {
        out[1] = 3.0_f64.sqrt() * x;
    }
    for (n, slot) in out.iter_mut().enumerate().skip(2) {
        let nf = n as f64;
        let p_next = ((2.0 * nf - 1.0) * x * p_cur - (nf - 1.0) * p_prev) / nf;
        p_prev = p_cur;
        p_cur = p_next;
        *slot = (2.0 * nf + 1.0).sqrt() * p_cur;
    }
}

fn periodized_into(table: &ScalingTable, j_n: u32, t: f64, out: &mut [f64]) {
    let scale = (1u64 << j_n) as f64;
    let amp = scale.sqrt();
    let support = table.support() as f64;
    for (k, slot) in out.iter_mut().enumerate() {
        // sum over l with 0 <= 2^J(t+l) − k < 2N−1
        let base = scale * t - k as f64;
        let l_min = ((-base) / scale).floor() as i64;
        let l_max = ((support - base) / scale).ceil() as i64;
        let mut acc = 0.0;
        for l in l_min..=l_max {
            acc += table.eval(base + scale * l as f64);
        }
        *slot = amp * acc;
    }
}

fn cached_scaling_table(order: usize) -> Arc<ScalingTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ScalingTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(order)
        .or_insert_with(|| {
            Arc::new(ScalingTable::new(order, CASCADE_DEPTH).expect("validated order"))
        })
        .clone()
}

/// daubechies_scaling_table(N, depth) — dyadic table of the order-N scaling
/// function computed by the cascade refinement.
pub fn daubechies_scaling_table(order: usize, depth: u32) -> Result<ScalingTable> {
    ScalingTable::new(order, depth)
}

/// Integral matrices of a basis: Gram = ∫B·Bᵀ, B̄ = ∫B and W = I − B̄·B̄ᵀ,
/// all by composite trapezoid quadrature on a uniform grid.
#[derive(Debug, Clone)]
pub struct BasisMatrices {
    pub gram: nalgebra::DMatrix<f64>,
    pub bbar: nalgebra::DVector<f64>,
    pub w: nalgebra::DMatrix<f64>,
    /// Quadrature abscissae used.
    pub grid: Vec<f64>,
}

impl BasisMatrices {
    /// The centering weight Gram − B̄·B̄ᵀ = ∫(B−B̄)(B−B̄)ᵀ used by the test
    /// statistics. Uses the quadrature Gram rather than assuming Gram = I.
    pub fn centering(&self) -> nalgebra::DMatrix<f64> {
        &self.gram - &self.bbar * self.bbar.transpose()
    }
}

/// Default quadrature grid size for a basis with c functions.
pub fn default_grid_size(c: usize) -> usize {
    4096.max(8 * c)
}

/// basis_matrices(spec, grid_size): trapezoid quadrature of Gram, B̄ and W on
/// the uniform grid {0, 1/G, ..., 1}. Deterministic for fixed inputs.
pub fn basis_matrices(spec: &BasisSpec, grid_size: usize) -> Result<BasisMatrices> {
    let c = spec.c();
    if grid_size < 4 * c {
        return Err(Error::Config(format!(
            "grid_size {grid_size} below 4c = {}",
            4 * c
        )));
    }
    let g = grid_size;
    let step = 1.0 / g as f64;
    let mut gram = nalgebra::DMatrix::<f64>::zeros(c, c);
    let mut bbar = nalgebra::DVector::<f64>::zeros(c);
    let mut grid = Vec::with_capacity(g + 1);
    let mut b = vec![0.0; c];
    for i in 0..=g {
        let t = i as f64 * step;
        grid.push(t);
        spec.eval_into(t, &mut b);
        let weight = if i == 0 || i == g { 0.5 * step } else { step };
        for row in 0..c {
            bbar[row] += weight * b[row];
            for col in row..c {
                gram[(row, col)] += weight * b[row] * b[col];
            }
        }
    }
    // fill the strict lower triangle so symmetry holds exactly as stored
    for row in 0..c {
        for col in 0..row {
            gram[(row, col)] = gram[(col, row)];
        }
    }
    let w = nalgebra::DMatrix::<f64>::identity(c, c) - &bbar * bbar.transpose();
    Ok(BasisMatrices { gram, bbar, w, grid })
}
