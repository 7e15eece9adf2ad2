//! Daubechies scaling functions evaluated by the cascade algorithm.
//!
//! The scaling function of the order-N family is supported on [0, 2N−1) and
//! satisfies the two-scale relation φ(x) = √2·Σ_k h_k φ(2x−k). Values at the
//! integers form the eigenvector (eigenvalue 1) of M_{ij} = √2·h_{2i−j};
//! values at finer dyadic points then follow exactly from the two-scale
//! relation, level by level. Between dyadic points we interpolate linearly.

// the filter tables are generated data, pinned digit-for-digit
#![allow(clippy::excessive_precision, clippy::approx_constant)]

use crate::error::{Error, Result};

// Low-pass filter coefficients for D-1..D-10, extremal-phase ordering,
// normalized so that Σ h_k = √2 and Σ h_k h_{k−2l} = δ_{l0}.
const DB1: [f64; 2] = [0.70710678118654752, 0.70710678118654752];
const DB2: [f64; 4] = [
    0.48296291314453414,
    0.83651630373780791,
    0.22414386804201338,
    -0.12940952255126038,
];
const DB3: [f64; 6] = [
    0.33267055295008262,
    0.80689150931109258,
    0.45987750211849157,
    -0.13501102001025459,
    -0.085441273882026662,
    0.035226291885709537,
];
const DB4: [f64; 8] = [
    0.2303778133088965,
    0.71484657055291565,
    0.63088076792985891,
    -0.027983769416859854,
    -0.18703481171909308,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];
const DB5: [f64; 10] = [
    0.16010239797419291,
    0.60382926979718967,
    0.72430852843777293,
    0.13842814590132073,
    -0.24229488706638203,
    -0.032244869584638375,
    0.077571493840045714,
    -0.0062414902127982743,
    -0.012580751999081999,
    0.0033357252854737713,
];
const DB6: [f64; 12] = [
    0.11154074335010946,
    0.49462389039845309,
    0.75113390802109535,
    0.31525035170919763,
    -0.22626469396543982,
    -0.12976686756726194,
    0.097501605587323049,
    0.027522865530305729,
    -0.03158203931748603,
    0.00055384220116149614,
    0.0047772575109455106,
    -0.0010773010853084796,
];
const DB7: [f64; 14] = [
    0.077852054085009179,
    0.39653931948191731,
    0.72913209084623512,
    0.46978228740519312,
    -0.14390600392856498,
    -0.22403618499387498,
    0.071309219266830265,
    0.080612609151083072,
    -0.038029936935014414,
    -0.016574541630666881,
    0.012550998556099841,
    0.00042957797292136652,
    -0.0018016407040474909,
    0.00035371379997452025,
];
const DB8: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429997,
    0.67563073629728981,
    0.58535468365420671,
    -0.015829105256349306,
    -0.28401554296154693,
    0.00047248457391328277,
    0.12874742662047846,
    -0.017369301001807546,
    -0.044088253930794752,
    0.013981027917398282,
    0.0087460940474057767,
    -0.0048703529934515743,
    -0.00039174037337694705,
    0.00067544940645056937,
    -0.00011747678412476953,
];
const DB9: [f64; 18] = [
    0.038077947363878347,
    0.24383467461259035,
    0.60482312369011111,
    0.65728807805130054,
    0.13319738582500758,
    -0.29327378327917491,
    -0.096840783222976461,
    0.14854074933810638,
    0.030725681479333379,
    -0.067632829061329974,
    0.00025094711483145196,
    0.022361662123679097,
    -0.0047232047577513973,
    -0.0042815036824634298,
    0.0018476468830562265,
    0.00023038576352319597,
    -0.00025196318894271014,
    3.9347320316271599e-5,
];
const DB10: [f64; 20] = [
    0.026670057900555554,
    0.18817680007769149,
    0.52720118893172559,
    0.68845903945360357,
    0.28117234366057746,
    -0.24984642432731538,
    -0.19594627437737704,
    0.12736934033579326,
    0.093057364603572351,
    -0.071394147166397087,
    -0.029457536821875813,
    0.033212674059341002,
    0.0036065535669561697,
    -0.010733175483330575,
    0.0013953517470529012,
    0.0019924052951850561,
    -0.00068585669495971163,
    -0.00011646685512928545,
    9.3588670320069591e-5,
    -1.3264202894521245e-5,
];

/// Low-pass filter coefficients h_0..h_{2N−1} of the order-N family.
pub fn filter_coefficients(order: usize) -> Result<&'static [f64]> {
    Ok(match order {
        1 => &DB1,
        2 => &DB2,
        3 => &DB3,
        4 => &DB4,
        5 => &DB5,
        6 => &DB6,
        7 => &DB7,
        8 => &DB8,
        9 => &DB9,
        10 => &DB10,
        _ => return Err(Error::UnsupportedWavelet(order)),
    })
}

/// Fixed cascade depth used by basis evaluation; see the crate-level notes on
/// evaluation accuracy.
pub const CASCADE_DEPTH: u32 = 12;

/// Tabulated scaling function φ on the dyadic grid {k/2^depth} of [0, 2N−1).
#[derive(Debug, Clone)]
pub struct ScalingTable {
    order: usize,
    depth: u32,
    /// values[k] = φ(k / 2^depth), k = 0..(2N−1)·2^depth
    values: Vec<f64>,
}

impl ScalingTable {
    /// Runs the cascade refinement for the order-N scaling function down to
    /// `depth` dyadic levels.
    pub fn new(order: usize, depth: u32) -> Result<Self> {
        let h = filter_coefficients(order)?;
        if depth < 6 {
            return Err(Error::Config(format!(
                "cascade depth {depth} too small; need depth >= 6"
            )));
        }
        let support = 2 * order - 1;

        // Values at the integers 0..support−1 (φ vanishes at 0 and 2N−1 for
        // N ≥ 2). M has unit column sums, so iteration preserves Σv = 1 and
        // converges to the eigenvalue-1 eigenvector.
        let mut v = vec![1.0 / support as f64; support];
        if order == 1 {
            v = vec![1.0];
        } else {
            let sqrt2 = std::f64::consts::SQRT_2;
            let mut next = vec![0.0; support];
            for _ in 0..256 {
                for (i, slot) in next.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, &vj) in v.iter().enumerate() {
                        let idx = 2 * i as isize - j as isize;
                        if idx >= 0 && (idx as usize) < 2 * order {
                            acc += sqrt2 * h[idx as usize] * vj;
                        }
                    }
                    *slot = acc;
                }
                let sum: f64 = next.iter().sum();
                for s in next.iter_mut() {
                    *s /= sum;
                }
                std::mem::swap(&mut v, &mut next);
            }
        }

        // Exact dyadic refinement; values at level r follow from level r−1.
        let mut prev = v;
        for r in 1..=depth {
            let len = support << r;
            let mut cur = vec![0.0; len];
            let sqrt2 = std::f64::consts::SQRT_2;
            for (k, slot) in cur.iter_mut().enumerate() {
                if k % 2 == 0 {
                    *slot = prev[k / 2];
                    continue;
                }
                // φ(k/2^r) = √2·Σ_j h_j·φ(2·k/2^r − j); the argument
                // 2x − j sits on the level-(r−1) grid at index k − j·2^{r−1}
                let mut acc = 0.0;
                for (j, &hj) in h.iter().enumerate() {
                    let idx = k as isize - ((j as isize) << (r - 1));
                    if idx >= 0 && (idx as usize) < prev.len() {
                        acc += hj * prev[idx as usize];
                    }
                }
                *slot = sqrt2 * acc;
            }
            prev = cur;
        }

        Ok(Self { order, depth, values: prev })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Support endpoint 2N−1.
    pub fn support(&self) -> usize {
        2 * self.order - 1
    }

    /// Tabulated values φ(k/2^depth).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// φ(x) by linear interpolation between dyadic grid points; zero outside
    /// the support.
    pub fn eval(&self, x: f64) -> f64 {
        let support = self.support() as f64;
        if x < 0.0 || x >= support {
            return 0.0;
        }
        let u = x * (1u64 << self.depth) as f64;
        let i0 = u.floor() as usize;
        let frac = u - i0 as f64;
        let v0 = self.values[i0];
        let v1 = if i0 + 1 < self.values.len() { self.values[i0 + 1] } else { 0.0 };
        v0 * (1.0 - frac) + v1 * frac
    }

    /// Trapezoid-rule integral of the table over the support.
    pub fn integral(&self) -> f64 {
        let step = 1.0 / (1u64 << self.depth) as f64;
        // endpoints are zero (φ(0) = φ(2N−1) = 0 for N ≥ 2), so the plain sum
        // is the trapezoid rule
        self.values.iter().sum::<f64>() * step
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_indicator() {
        let t = ScalingTable::new(1, 8).unwrap();
        assert!(t.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert!((t.eval(0.3) - 1.0).abs() < 1e-14);
        assert_eq!(t.eval(1.0), 0.0);
    }

    #[test]
    fn filter_sum_rules() {
        for order in 1..=10 {
            let h = filter_coefficients(order).unwrap();
            let even: f64 = h.iter().step_by(2).sum();
            let odd: f64 = h.iter().skip(1).step_by(2).sum();
            let target = 1.0 / std::f64::consts::SQRT_2;
            assert!((even - target).abs() < 1e-12, "order {order} even sum");
            assert!((odd - target).abs() < 1e-12, "order {order} odd sum");
            for l in 0..order {
                let dot: f64 = (2 * l..2 * order).map(|k| h[k] * h[k - 2 * l]).sum();
                let want = if l == 0 { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12, "order {order} shift {l}");
            }
        }
    }

    #[test]
    fn unsupported_order_rejected() {
        assert!(matches!(filter_coefficients(11), Err(Error::UnsupportedWavelet(11))));
        assert!(matches!(filter_coefficients(0), Err(Error::UnsupportedWavelet(0))));
    }

    #[test]
    fn table_integrates_to_one() {
        for order in [1, 2, 5, 9] {
            let t = ScalingTable::new(order, 10).unwrap();
            assert!((t.integral() - 1.0).abs() < 1e-6, "order {order}");
        }
    }

    #[test]
    fn partition_of_unity_on_dyadic_grid() {
        let depth = 10;
        for order in [2, 9] {
            let t = ScalingTable::new(order, depth).unwrap();
            let step = 1.0 / (1u64 << depth) as f64;
            for k in (0..(1u64 << depth)).step_by(37) {
                let x = k as f64 * step;
                let total: f64 = (0..t.support()).map(|i| t.eval(x + i as f64)).sum();
                assert!((total - 1.0).abs() < 1e-6, "order {order} at x={x}");
            }
        }
    }
}
