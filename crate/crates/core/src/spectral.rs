//! Dense symmetric eigendecomposition, the graph Fourier transform, and matrix
//! square roots of the normalized Laplacian (exact and Taylor-truncated).
//!
//! The truncated series expands `sqrt(x)` around `x = 1`:
//!
//! ```text
//! L^{1/2} = (I - A)^{1/2} = I - sum_{k>=1} c_k A^k,
//! c_k = (2k)! / (2^{2k} (k!)^2 (2k - 1))
//! ```

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated `|m_ij - m_ji|` for input to [`eig_sym`].
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero by [`sqrt_psd_exact`].
pub const PSD_TOL: f64 = 1e-9;
/// Laplacian eigenvalues below this are treated as zero by the remainder bound.
pub const ZERO_EIGENVALUE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    Ascending,
    Descending,
}

/// Eigenvalues and orthonormal eigenvectors (columns of `vectors`).
///
/// Each eigenvector is signed so that its entry of largest magnitude is
/// positive; near-ties (relative 1e-10) go to the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
    pub order: SortOrder,
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }

    /// The first `w` eigenvectors.
    pub fn leading(&self, w: usize) -> DMatrix<f64> {
        self.vectors.columns(0, w).into_owned()
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `(M + M^T) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Flips `v` so that its largest-magnitude entry is positive.
pub fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-10))
        .expect("max is attained");
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn eig_sym(matrix: &DMatrix<f64>, order: SortOrder) -> Result<SpectralBasis> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: matrix.ncols(),
        });
    }
    let asym = max_asymmetry(matrix);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::new(symmetrize(matrix));

    let mut idx: Vec<usize> = (0..n).collect();
    match order {
        SortOrder::Ascending => idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])),
        SortOrder::Descending => idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a])),
    }

    let values = DVector::from_iterator(n, idx.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        let mut col: Vec<f64> = eig.eigenvectors.column(src).iter().copied().collect();
        fix_sign(&mut col);
        vectors.set_column(dst, &DVector::from_vec(col));
    }
    Ok(SpectralBasis {
        values,
        vectors,
        order,
    })
}

/// Graph Fourier transform `x̂ = U^T x`.
pub fn gft(basis: &DMatrix<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    if basis.nrows() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.nrows(),
            found: x.len(),
        });
    }
    Ok(basis.tr_mul(x))
}

/// Inverse transform `x = U x̂`.
pub fn igft(basis: &DMatrix<f64>, x_hat: &DVector<f64>) -> Result<DVector<f64>> {
    if basis.ncols() != x_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.ncols(),
            found: x_hat.len(),
        });
    }
    Ok(basis * x_hat)
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn sqrt_psd_exact(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let basis = eig_sym(matrix, SortOrder::Ascending)?;
    let smallest = basis.values.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest < -PSD_TOL {
        return Err(Error::NotPsd(smallest));
    }
    let roots = basis.values.map(|v| v.max(0.0).sqrt());
    let s = &basis.vectors * DMatrix::from_diagonal(&roots) * basis.vectors.transpose();
    Ok(symmetrize(&s))
}

/// Taylor coefficient `c_k` of `sqrt(1 - a) = 1 - sum c_k a^k`, via
/// `c_k = c_{k-1} (2k - 3) / (2k)`.
///
/// # Panics
/// If `k == 0`.
pub fn taylor_coeff(k: usize) -> f64 {
    assert!(k >= 1, "Taylor coefficients start at k = 1");
    let mut c = 0.5;
    for j in 2..=k {
        c *= (2 * j - 3) as f64 / (2 * j) as f64;
    }
    c
}

/// `c_1, ..., c_order`.
pub fn taylor_coeffs(order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order);
    let mut c = 0.5;
    for j in 1..=order {
        if j > 1 {
            c *= (2 * j - 3) as f64 / (2 * j) as f64;
        }
        out.push(c);
    }
    out
}

/// Largest eigenvalue magnitude of a symmetric matrix.
pub fn spectral_radius(matrix: &DMatrix<f64>) -> Result<f64> {
    let basis = eig_sym(matrix, SortOrder::Ascending)?;
    Ok(basis.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Order-`order` truncation `I - sum_{k<=order} c_k A^k` of `(I - A)^{1/2}`.
pub fn sqrt_taylor(adjacency: &DMatrix<f64>, order: usize) -> Result<DMatrix<f64>> {
    let rho = spectral_radius(adjacency)?;
    if rho > 1.0 + 1e-9 {
        return Err(Error::SpectralRadiusExceeded(rho));
    }
    Ok(sqrt_taylor_unchecked(adjacency, order))
}

/// [`sqrt_taylor`] without the spectral-radius check.
pub(crate) fn sqrt_taylor_unchecked(adjacency: &DMatrix<f64>, order: usize) -> DMatrix<f64> {
    let n = adjacency.nrows();
    let mut out = DMatrix::identity(n, n);
    let mut power = DMatrix::identity(n, n);
    for c in taylor_coeffs(order) {
        power = adjacency * &power;
        out -= &power * c;
    }
    symmetrize(&out)
}

/// Lagrange remainder magnitude `|R_K(lambda)|` of the order-`order` expansion
/// of `sqrt` around 1, using the supremum of `|f^{(K+1)}|` between `lambda`
/// and 1. Infinite for `lambda < ZERO_EIGENVALUE_EPS`.
pub fn remainder_term(order: usize, lambda: f64) -> f64 {
    if lambda < ZERO_EIGENVALUE_EPS {
        return f64::INFINITY;
    }
    let dist = (lambda - 1.0).abs();
    if dist == 0.0 {
        return 0.0;
    }
    // |f^{(n)}(y)| / n! = c_n y^{1/2 - n}, decreasing in y, so the supremum
    // over [min(lambda, 1), max(lambda, 1)] sits at the left end.
    let y = lambda.min(1.0);
    let n = order + 1;
    taylor_coeff(n) * y.powf(0.5 - n as f64) * dist.powi(n as i32)
}

/// Bound on `||L^{1/2} - sqrt_taylor(A, order)||_F`: the sum of remainder terms
/// over the Laplacian spectrum. Any eigenvalue below `ZERO_EIGENVALUE_EPS`
/// makes the bound infinite.
pub fn taylor_error_bound(order: usize, laplacian_eigenvalues: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &lambda in laplacian_eigenvalues {
        if !(-PSD_TOL..=2.0 + PSD_TOL).contains(&lambda) {
            return Err(Error::EigenvalueOutOfRange(lambda));
        }
        total += remainder_term(order, lambda.clamp(0.0, 2.0));
    }
    Ok(total)
}

/// `d_K^2 ||M||_F` for a diagonal cooperation matrix with entries `weights`.
pub fn criterion_error_bound(d_k: f64, weights: &[f64]) -> f64 {
    let norm_m = weights.iter().map(|m| m * m).sum::<f64>().sqrt();
    if d_k == 0.0 || norm_m == 0.0 {
        return 0.0;
    }
    d_k * d_k * norm_m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorBound {
    pub order: usize,
    pub d_k: f64,
    pub d_km: f64,
}

impl TaylorBound {
    pub fn compute(order: usize, laplacian_eigenvalues: &[f64], weights: &[f64]) -> Result<Self> {
        let d_k = taylor_error_bound(order, laplacian_eigenvalues)?;
        Ok(Self {
            order,
            d_k,
            d_km: criterion_error_bound(d_k, weights),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.d_k.is_finite()
    }
}
