//! Data-driven tuning: (b, c) by train/validation forecast MSE, block size m
//! by the minimum-volatility rule.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{BasisFamily, BasisSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::series::TimeSeries;
use crate::sieve_fit::{fit, HSequence};
use crate::stability_test::mbar_omega_hat;

/// Default validation length l = ⌊3·log2 n⌋.
pub fn default_l(n: usize) -> usize {
    (3.0 * (n as f64).log2()).floor() as usize
}

/// Default (b, c) candidate grids for forecasting: b = 1..⌈2·ln n⌉,
/// c ∈ {1, 2, 4, 8, 16} (powers of two to accommodate the wavelet family).
pub fn default_b_candidates(n: usize) -> Vec<usize> {
    let hi = (2.0 * (n as f64).ln()).ceil() as usize;
    (1..=hi.max(1)).collect()
}

pub fn default_c_candidates() -> Vec<usize> {
    vec![1, 2, 4, 8, 16]
}

/// Default m candidates: unit steps around n^{1/3}, kept tight because the
/// volatility surface is noise-flat for large m.
pub fn default_m_candidates(n: usize, b: usize, h0: usize) -> Vec<usize> {
    let root = (n as f64).powf(1.0 / 3.0);
    let lo = ((root / 2.0).floor() as usize).max(h0 + 1);
    let hi = ((2.0 * root).ceil() as usize)
        .min(n.saturating_sub(b + 2 + h0))
        .max(lo + 2 * h0);
    (lo..=hi).collect()
}

/// Cross-validation selection of (b, c).
#[derive(Debug, Clone, Serialize)]
pub struct CvResult {
    pub b_opt: usize,
    pub c_opt: usize,
    pub b_candidates: Vec<usize>,
    pub c_candidates: Vec<usize>,
    /// Validation MSEs, rows indexed by b candidate, columns by c candidate;
    /// failed fits hold +∞.
    pub cv_table: Vec<Vec<f64>>,
    pub l: usize,
}

/// Fits each candidate pair on x_1..x_{n−l} and scores one-step forecasts on
/// the validation tail using φ̂ at t = 1 of the training clock and realized
/// lags (no refit inside the window). Singular candidates score +∞.
pub fn cv_select(
    x: &TimeSeries,
    b_candidates: &[usize],
    c_candidates: &[usize],
    family: BasisFamily,
    wavelet_order: usize,
    l: usize,
) -> Result<CvResult> {
    let n = x.len();
    if l < 4 {
        return Err(Error::Config(format!("validation length l = {l} below 4")));
    }
    if n <= l + 8 {
        return Err(Error::SeriesTooShort { need: l + 8, got: n });
    }
    if b_candidates.is_empty() || c_candidates.is_empty() {
        return Err(Error::Config("empty candidate list".into()));
    }
    let train = x.prefix(n - l);
    let pairs: Vec<(usize, usize)> = b_candidates
        .iter()
        .flat_map(|&b| c_candidates.iter().map(move |&c| (b, c)))
        .collect();

    let scores = exec::map_indexed(pairs.len(), |idx| {
        let (b, c) = pairs[idx];
        candidate_mse(x, &train, b, c, family, wavelet_order, l)
    });

    let cols = c_candidates.len();
    let mut table = vec![vec![f64::INFINITY; cols]; b_candidates.len()];
    for (idx, score) in scores.iter().enumerate() {
        table[idx / cols][idx % cols] = *score;
    }

    // first minimum in row-major order: ties break toward smaller (b, c)
    let mut best = (0usize, 0usize);
    let mut best_val = f64::INFINITY;
    for (bi, row) in table.iter().enumerate() {
        for (cj, &val) in row.iter().enumerate() {
            if val < best_val {
                best_val = val;
                best = (bi, cj);
            }
        }
    }
    if !best_val.is_finite() {
        return Err(Error::Config(
            "every (b, c) candidate failed to fit".into(),
        ));
    }
    Ok(CvResult {
        b_opt: b_candidates[best.0],
        c_opt: c_candidates[best.1],
        b_candidates: b_candidates.to_vec(),
        c_candidates: c_candidates.to_vec(),
        cv_table: table,
        l,
    })
}

fn candidate_mse(
    x: &TimeSeries,
    train: &TimeSeries,
    b: usize,
    c: usize,
    family: BasisFamily,
    wavelet_order: usize,
    l: usize,
) -> f64 {
    let spec = match BasisSpec::new(family, c, wavelet_order) {
        Ok(s) => s,
        Err(_) => return f64::INFINITY,
    };
    let fitted = match fit(train, b, &spec) {
        Ok(f) => f,
        Err(_) => return f64::INFINITY,
    };
    let phi = match fitted.phi_hat_all(1.0) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    let n = x.len();
    let mut err = 0.0;
    for k in (n - l)..n {
        if k < b {
            return f64::INFINITY;
        }
        let mut pred = phi[0];
        for j in 1..=b {
            pred += phi[j] * x[k - j];
        }
        let diff = x[k] - pred;
        err += diff * diff;
    }
    err / l as f64
}

/// Minimum-volatility selection of m.
#[derive(Debug, Clone, Serialize)]
pub struct MvResult {
    pub m_opt: usize,
    /// (m, se(m)) per candidate.
    pub mv_table: Vec<(usize, f64)>,
    pub h0: usize,
}

/// se(m_j) over the unit-step window m_j−h0..m_j+h0:
/// [(2h0)⁻¹·Σ_k ‖Ω̄̂ − Ω̂_{m_j+k}‖²_F]^{1/2} with Ω̄̂ the window average.
pub fn mv_select(
    h: &HSequence,
    spec: &BasisSpec,
    m_candidates: &[usize],
    h0: usize,
) -> Result<MvResult> {
    if h0 == 0 {
        return Err(Error::Config("h0 must be >= 1".into()));
    }
    if m_candidates.len() < 2 * h0 + 1 {
        return Err(Error::Config(format!(
            "need at least {} candidates, got {}",
            2 * h0 + 1,
            m_candidates.len()
        )));
    }
    if m_candidates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("m candidates must be strictly ascending".into()));
    }
    let n = h.n();
    let b = h.b();
    let lo = m_candidates[0];
    let hi = m_candidates[m_candidates.len() - 1];
    if lo <= h0 || hi + h0 > n.saturating_sub(b + 2) {
        return Err(Error::Config(format!(
            "candidates extended by h0 = {h0} must satisfy 1 <= m <= n − b − 2"
        )));
    }

    // Ω̂ at every window position
    let mut needed: Vec<usize> = Vec::new();
    for &m in m_candidates {
        for w in (m - h0)..=(m + h0) {
            needed.push(w);
        }
    }
    needed.sort_unstable();
    needed.dedup();
    let omegas_vec = exec::map_indexed(needed.len(), |idx| {
        mbar_omega_hat(h, spec, needed[idx]).expect("window feasibility checked")
    });
    let omegas: BTreeMap<usize, DMatrix<f64>> =
        needed.into_iter().zip(omegas_vec).collect();

    Ok(mv_from_omegas(&omegas, m_candidates, h0))
}

/// The MV rule on precomputed Ω̂ matrices. Split out so the windowing logic
/// can be tested with synthetic inputs.
pub fn mv_from_omegas(
    omegas: &BTreeMap<usize, DMatrix<f64>>,
    m_candidates: &[usize],
    h0: usize,
) -> MvResult {
    let mut table = Vec::with_capacity(m_candidates.len());
    let mut best = (m_candidates[0], f64::INFINITY);
    for &m in m_candidates {
        let window: Vec<&DMatrix<f64>> =
            ((m - h0)..=(m + h0)).map(|w| &omegas[&w]).collect();
        let dims = window[0].shape();
        let mut avg = DMatrix::<f64>::zeros(dims.0, dims.1);
        for w in &window {
            avg += *w;
        }
        avg /= window.len() as f64;
        let mut total = 0.0;
        for w in &window {
            let diff = &avg - *w;
            total += diff.norm_squared();
        }
        let se = (total / (2.0 * h0 as f64)).sqrt();
        table.push((m, se));
        if se < best.1 {
            best = (m, se);
        }
    }
    MvResult { m_opt: best.0, mv_table: table, h0 }
}

/// Combined tuning outcome.
#[derive(Debug, Clone, Serialize)]
pub struct TuningResult {
    pub b_opt: usize,
    pub c_opt: usize,
    pub m_opt: usize,
    pub cv: CvResult,
    pub mv: MvResult,
}

/// Full tuning pass with the default grids: CV for (b, c), then MV for m on
/// the h sequence of the selected fit.
pub fn tune(
    x: &TimeSeries,
    family: BasisFamily,
    wavelet_order: usize,
) -> Result<TuningResult> {
    let n = x.len();
    let cv = cv_select(
        x,
        &default_b_candidates(n),
        &default_c_candidates(),
        family,
        wavelet_order,
        default_l(n),
    )?;
    let spec = BasisSpec::new(family, cv.c_opt, wavelet_order)?;
    let fitted = fit(x, cv.b_opt, &spec)?;
    let h = crate::sieve_fit::h_sequence(&fitted);
    let h0 = 3;
    let mv = mv_select(&h, &spec, &default_m_candidates(n, cv.b_opt, h0), h0)?;
    Ok(TuningResult { b_opt: cv.b_opt, c_opt: cv.c_opt, m_opt: mv.m_opt, cv, mv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{self, Innovation};

    #[test]
    fn single_candidate_returned_unconditionally() {
        let x = simgen::simulate_tvar1(|_| 0.5, |_| 1.0, Innovation::Gaussian, 256, 128, 3);
        let cv = cv_select(&x, &[2], &[4], BasisFamily::Fourier, 9, default_l(256)).unwrap();
        assert_eq!((cv.b_opt, cv.c_opt), (2, 4));
        assert_eq!(cv.cv_table.len(), 1);
        assert_eq!(cv.cv_table[0].len(), 1);
        assert!(cv.cv_table[0][0].is_finite());
    }

    #[test]
    fn white_noise_cv_mse_near_variance() {
        let x = simgen::simulate_tvar1(|_| 0.0, |_| 1.0, Innovation::Gaussian, 2048, 64, 5);
        let cv =
            cv_select(&x, &[1, 2], &[1], BasisFamily::Fourier, 9, default_l(2048)).unwrap();
        for row in &cv.cv_table {
            for &v in row {
                // validation MSE within a few standard errors of Var = 1;
                // l = 33 points, se of the MSE ≈ √(2/33) ≈ 0.25
                assert!((v - 1.0).abs() < 0.8, "cv mse {v}");
            }
        }
    }

    #[test]
    fn infeasible_candidates_score_infinite() {
        let x = simgen::simulate_tvar1(|_| 0.5, |_| 1.0, Innovation::Gaussian, 64, 64, 7);
        let cv = cv_select(&x, &[1, 20], &[2], BasisFamily::Fourier, 9, 8).unwrap();
        assert!(cv.cv_table[0][0].is_finite());
        assert!(cv.cv_table[1][0].is_infinite());
        assert_eq!(cv.b_opt, 1);
    }

    #[test]
    fn candidate_order_only_affects_tie_break() {
        let x = simgen::simulate_tvar1(|_| 0.4, |_| 1.0, Innovation::Gaussian, 512, 128, 11);
        let a = cv_select(&x, &[1, 2, 3], &[1, 4], BasisFamily::Fourier, 9, 20).unwrap();
        let b = cv_select(&x, &[3, 2, 1], &[4, 1], BasisFamily::Fourier, 9, 20).unwrap();
        assert_eq!((a.b_opt, a.c_opt), (b.b_opt, b.c_opt));
    }

    #[test]
    fn mv_zero_h_gives_zero_se_and_first_candidate() {
        // h ≡ 0: every Ω̂ vanishes, se ≡ 0, tie-break to the first candidate
        let n = 256;
        let b = 1;
        let h = crate::sieve_fit::test_support::h_from_matrix(
            DMatrix::<f64>::zeros(n - b, b + 1),
            n,
            b,
        );
        let spec = BasisSpec::fourier(2).unwrap();
        let cands: Vec<usize> = (4..=16).collect();
        let mv = mv_select(&h, &spec, &cands, 3).unwrap();
        assert_eq!(mv.m_opt, 4);
        assert!(mv.mv_table.iter().all(|(_, se)| *se == 0.0));
    }

    #[test]
    fn mv_avoids_perturbed_candidate() {
        // two flat Ω̂ streams with one perturbed entry: the window containing
        // the perturbation scores higher
        let flat = DMatrix::<f64>::identity(3, 3);
        let mut spiked = flat.clone();
        spiked[(0, 0)] = 25.0;
        let mut omegas = BTreeMap::new();
        for m in 1..=20usize {
            omegas.insert(m, if m == 12 { spiked.clone() } else { flat.clone() });
        }
        let cands: Vec<usize> = (4..=16).collect();
        let mv = mv_from_omegas(&omegas, &cands, 3);
        assert!(mv.m_opt < 9 || mv.m_opt > 15, "picked {}", mv.m_opt);
        let se_at = |m: usize| mv.mv_table.iter().find(|(mm, _)| *mm == m).unwrap().1;
        assert_eq!(se_at(5), 0.0);
        assert!(se_at(12) > 0.0);
    }

    #[test]
    fn mv_candidate_count_checked() {
        let x = simgen::simulate_tvar1(|_| 0.4, |_| 1.0, Innovation::Gaussian, 128, 64, 2);
        let spec = BasisSpec::fourier(2).unwrap();
        let f = fit(&x, 1, &spec).unwrap();
        let h = crate::sieve_fit::h_sequence(&f);
        assert!(matches!(
            mv_select(&h, &spec, &[5, 6, 7], 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn default_l_matches_rule() {
        assert_eq!(default_l(256), 24);
        assert_eq!(default_l(512), 27);
    }
}
