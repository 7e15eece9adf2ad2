//! Sieve design construction and the single OLS fit.
//!
//! For a series x_1..x_n and order b, the design row for index i (i = b+1..n)
//! is the Kronecker-ordered vector (z_{1,0},...,z_{c,0}, z_{1,1},...,z_{c,b})
//! with z_{k,0} = α_k(i/n) and z_{k,j} = α_k(i/n)·x_{i−j}. The coefficient
//! vector β̂ ∈ R^{(b+1)c} is blocked the same way: block j holds the sieve
//! coefficients of φ_j(·).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Relative floor on the R diagonal of the QR factorization below which the
/// design is declared rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Design matrix Y of shape (n−b) × (b+1)c and the response (x_{b+1},...,x_n).
pub fn build_design(
    x: &TimeSeries,
    b: usize,
    spec: &BasisSpec,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = x.len();
    let c = spec.c();
    let p = (b + 1) * c;
    if b == 0 {
        return Err(Error::Config("sieve order b must be >= 1".into()));
    }
    // overdetermined: the (n−b)-row design needs more rows than columns
    if n <= p + b + 1 {
        return Err(Error::SeriesTooShort { need: p + b + 1, got: n });
    }
    let rows = n - b;
    let mut design = DMatrix::<f64>::zeros(rows, p);
    let mut basis_buf = vec![0.0; c];
    for r in 0..rows {
        // 1-based observation index i = b+1+r, rescaled time i/n
        let t = (b + 1 + r) as f64 / n as f64;
        spec.eval_into(t, &mut basis_buf);
        for (k, &bk) in basis_buf.iter().enumerate() {
            design[(r, k)] = bk;
        }
        for j in 1..=b {
            let lagged = x[b + r - j];
            for (k, &bk) in basis_buf.iter().enumerate() {
                design[(r, j * c + k)] = bk * lagged;
            }
        }
    }
    let response = DVector::<f64>::from_fn(rows, |r, _| x[b + r]);
    Ok((design, response))
}

/// A fitted sieve regression.
#[derive(Debug, Clone)]
pub struct SieveFit {
    n: usize,
    b: usize,
    spec: BasisSpec,
    beta: DVector<f64>,
    sigma_hat: DMatrix<f64>,
    residuals: Vec<f64>,
    /// Lag rows (1, x_{i−1}, ..., x_{i−b}) for i = b+1..n; kept for the
    /// bootstrap's h sequence.
    lags: DMatrix<f64>,
}

/// Fits the sieve regression by Householder QR. Never forms the normal
/// equations; rank deficiency is a hard error naming the offending block.
pub fn fit(x: &TimeSeries, b: usize, spec: &BasisSpec) -> Result<SieveFit> {
    let (design, response) = build_design(x, b, spec)?;
    let n = x.len();
    let c = spec.c();
    let p = (b + 1) * c;
    let design_norm = design.norm();

    let qr = design.clone().qr();
    let r = qr.r();
    for k in 0..p {
        if r[(k, k)].abs() < RANK_TOL * design_norm {
            return Err(Error::SingularDesign { block: k / c, column: k });
        }
    }
    let mut qty = response.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let beta = r
        .solve_upper_triangular(&rhs)
        .ok_or(Error::SingularDesign { block: p.saturating_sub(1) / c, column: p - 1 })?;

    let residual_vec = &response - &design * &beta;
    let sigma_hat = design.transpose() * &design / n as f64;

    let rows = n - b;
    let mut lags = DMatrix::<f64>::zeros(rows, b + 1);
    for row in 0..rows {
        lags[(row, 0)] = 1.0;
        for j in 1..=b {
            lags[(row, j)] = x[b + row - j];
        }
    }

    Ok(SieveFit {
        n,
        b,
        spec: *spec,
        beta,
        sigma_hat,
        residuals: residual_vec.iter().copied().collect(),
        lags,
    })
}

impl SieveFit {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn c(&self) -> usize {
        self.spec.c()
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// Fitted coefficient vector β̂, blocked [j=0 | j=1 | ... | j=b].
    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    /// Block j of β̂ (the sieve coefficients of φ_j).
    pub fn beta_block(&self, j: usize) -> Result<&[f64]> {
        if j > self.b {
            return Err(Error::LagOutOfRange { j, b: self.b });
        }
        let c = self.c();
        Ok(&self.beta.as_slice()[j * c..(j + 1) * c])
    }

    /// Σ̂ = YᵀY/n.
    pub fn sigma_hat(&self) -> &DMatrix<f64> {
        &self.sigma_hat
    }

    /// Residuals ε̂_i = x_i − φ̂_0(i/n) − Σ_j φ̂_j(i/n)·x_{i−j}, i = b+1..n.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// φ̂_j(t) = dot product of block j of β̂ with B(t).
    pub fn phi_hat(&self, j: usize, t: f64) -> Result<f64> {
        let block = self.beta_block(j)?;
        let basis = self.spec.eval(t)?;
        Ok(block.iter().zip(basis.iter()).map(|(a, b)| a * b).sum())
    }

    /// All coefficient functions evaluated at one time point,
    /// (φ̂_0(t), ..., φ̂_b(t)).
    pub fn phi_hat_all(&self, t: f64) -> Result<Vec<f64>> {
        let basis = self.spec.eval(t)?;
        let c = self.c();
        Ok((0..=self.b)
            .map(|j| {
                self.beta.as_slice()[j * c..(j + 1) * c]
                    .iter()
                    .zip(basis.iter())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Serializable mirror of the fit (matrices row-major).
    pub fn to_document(&self) -> SieveFitDocument {
        let p = self.sigma_hat.nrows();
        let mut sigma = Vec::with_capacity(p * p);
        for row in 0..p {
            for col in 0..p {
                sigma.push(self.sigma_hat[(row, col)]);
            }
        }
        SieveFitDocument {
            n: self.n,
            b: self.b,
            c: self.c(),
            basis: self.spec.family_name(),
            beta_hat: self.beta.iter().copied().collect(),
            sigma_hat: MatrixDocument { rows: p, cols: p, data: sigma },
            residuals: self.residuals.clone(),
            response_range: (self.b + 1, self.n),
        }
    }
}

/// Row-major dense matrix in serialized documents.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

/// JSON-facing mirror of [`SieveFit`].
#[derive(Debug, Clone, Serialize)]
pub struct SieveFitDocument {
    pub n: usize,
    pub b: usize,
    pub c: usize,
    pub basis: String,
    pub beta_hat: Vec<f64>,
    pub sigma_hat: MatrixDocument,
    pub residuals: Vec<f64>,
    /// 1-based indices (first, last) of the responses used.
    pub response_range: (usize, usize),
}

/// The sequence h_i = (1, x_{i−1}, ..., x_{i−b})ᵀ·ε̂_i, i = b+1..n, consumed
/// by the multiplier bootstrap.
#[derive(Debug, Clone)]
pub struct HSequence {
    /// Row r holds h_{b+1+r}; shape (n−b) × (b+1).
    values: DMatrix<f64>,
    n: usize,
    b: usize,
}

impl HSequence {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        self.values.row(r).iter().copied().collect()
    }
}


/// h_sequence(fit): lag vectors scaled by the fitted residuals.
pub fn h_sequence(fit: &SieveFit) -> HSequence {
    let rows = fit.lags.nrows();
    let mut values = fit.lags.clone();
    for r in 0..rows {
        let e = fit.residuals[r];
        for j in 0..=fit.b {
            values[(r, j)] *= e;
        }
    }
    HSequence { values, n: fit.n, b: fit.b }
}
