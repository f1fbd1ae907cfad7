//! Graph Slepian designs and the guided criterion.
//!
//! Three criterion matrices are diagonalized here:
//!
//! * energy concentration `mu`: `U_W^T S U_W`, values sorted descending;
//! * modified embedded distance `xi`: `U_W^T L^{1/2} S L^{1/2} U_W`, ascending;
//! * guided criterion `zeta = mu - xi`: `M - L^{1/2} M L^{1/2}` over the full
//!   vertex domain, descending.
//!
//! `S` is a binary selection and `M` a non-negative cooperation diagonal.
//! Replacing `L^{1/2}` by its Taylor expansion in the normalized adjacency `A`
//! turns the guided criterion into a reweighting of paths in `A`; see
//! [`guided_matrix_linear`], [`guided_matrix_quadratic`] and
//! [`guided_matrix_series`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, eig_sym, symmetrize, SortOrder, SpectralBasis};

/// Diagonal of the cooperation matrix `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooperationWeights {
    weights: Vec<f64>,
    max: f64,
}

impl CooperationWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(Error::InvalidWeight { index, value });
        }
        let max = weights.iter().copied().fold(0.0, f64::max);
        Ok(Self { weights, max })
    }

    pub fn ones(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
            max: if n > 0 { 1.0 } else { 0.0 },
        }
    }

    /// Binary selection with ones on `selected`.
    pub fn selection(n: usize, selected: &[usize]) -> Result<Self> {
        let mut w = vec![0.0; n];
        for &i in selected {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            w[i] = 1.0;
        }
        Self::new(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn is_binary(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// Number of zero entries (`z_S` for a selection).
    pub fn zeros(&self) -> usize {
        self.weights.iter().filter(|&&w| w == 0.0).count()
    }

    pub fn diagonal(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.weights))
    }

    fn require_binary(&self) -> Result<()> {
        match self
            .weights
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0.0 && w != 1.0)
        {
            Some((index, &value)) => Err(Error::NonBinarySelection { index, value }),
            None => Ok(()),
        }
    }

    fn require_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// Number of leading Laplacian eigenvectors a bandlimited signal may combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bandwidth(usize);

impl Bandwidth {
    pub fn new(w: usize, n: usize) -> Result<Self> {
        if w == 0 || w > n {
            return Err(Error::BandwidthOutOfRange { bandwidth: w, n });
        }
        Ok(Self(w))
    }

    pub fn full(n: usize) -> Self {
        Self(n)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    Mu,
    Xi,
    Zeta,
}

/// Criterion eigenvectors in the vertex domain with their criterion values.
#[derive(Debug, Clone, PartialEq)]
pub struct SlepianSet {
    pub kind: CriterionKind,
    /// `n x r`, one Slepian vector per column.
    pub vectors: DMatrix<f64>,
    pub values: Vec<f64>,
    /// `g^T M g` per vector (zeta sets only).
    pub companion_mu: Option<Vec<f64>>,
    /// `g^T L^{1/2} M L^{1/2} g` per vector (zeta sets only).
    pub companion_xi: Option<Vec<f64>>,
}

impl SlepianSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }
}

/// Diagonalizes `B^T X B` (a `W x W` spectral-domain matrix) and maps the
/// eigenvectors back through `B`.
fn bandlimited_eigen(
    band: &DMatrix<f64>,
    operator: &DMatrix<f64>,
    order: SortOrder,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let reduced = symmetrize(&(band.transpose() * operator * band));
    let eig = eig_sym(&reduced, order)?;
    let mut vectors = band * &eig.vectors;
    for mut col in vectors.column_iter_mut() {
        let mut v: Vec<f64> = col.iter().copied().collect();
        spectral::fix_sign(&mut v);
        col.copy_from_slice(&v);
    }
    Ok((vectors, eig.values.iter().copied().collect()))
}

fn check_basis(basis: &SpectralBasis, selection: &CooperationWeights) -> Result<()> {
    if basis.order != SortOrder::Ascending {
        return Err(Error::UnsortedBasis);
    }
    selection.require_len(basis.n())?;
    selection.require_binary()
}

/// Energy-concentration Slepians: eigenvectors of `C = U_W^T S U_W`, values
/// `mu` sorted descending.
pub fn concentration_slepians(
    basis: &SpectralBasis,
    selection: &CooperationWeights,
    bandwidth: Bandwidth,
) -> Result<SlepianSet> {
    check_basis(basis, selection)?;
    let band = basis.leading(bandwidth.get());
    let (vectors, values) =
        bandlimited_eigen(&band, &selection.diagonal(), SortOrder::Descending)?;
    Ok(SlepianSet {
        kind: CriterionKind::Mu,
        vectors,
        values,
        companion_mu: None,
        companion_xi: None,
    })
}

/// Modified-embedded-distance Slepians: eigenvectors of
/// `U_W^T L^{1/2} S L^{1/2} U_W`, values `xi` sorted ascending.
pub fn embedded_distance_slepians(
    basis: &SpectralBasis,
    laplacian_sqrt: &DMatrix<f64>,
    selection: &CooperationWeights,
    bandwidth: Bandwidth,
) -> Result<SlepianSet> {
    check_basis(basis, selection)?;
    let embedded = laplacian_sqrt * selection.diagonal() * laplacian_sqrt;
    let band = basis.leading(bandwidth.get());
    let (vectors, values) = bandlimited_eigen(&band, &embedded, SortOrder::Ascending)?;
    Ok(SlepianSet {
        kind: CriterionKind::Xi,
        vectors,
        values,
        companion_mu: None,
        companion_xi: None,
    })
}

/// `M - L^{1/2} M L^{1/2}`, symmetrized.
pub fn guided_matrix_exact(
    weights: &CooperationWeights,
    laplacian_sqrt: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    weights.require_len(laplacian_sqrt.nrows())?;
    let m = weights.diagonal();
    Ok(symmetrize(&(&m - laplacian_sqrt * &m * laplacian_sqrt)))
}

/// `D A + A D` for diagonal `D = diag(m)`, without forming `D`.
fn diag_sandwich_sum(m: &[f64], a: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| (m[i] + m[j]) * a[(i, j)])
}

/// Linear path reweighting `(MA + AM) / 2`: each direct path `a_ij` scaled by
/// the mean cooperation weight of its endpoints.
pub fn guided_matrix_linear(weights: &CooperationWeights, adjacency: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    weights.require_len(adjacency.nrows())?;
    Ok(diag_sandwich_sum(weights.as_slice(), adjacency) * 0.5)
}

/// Quadratic path reweighting
/// `(MA + AM)/2 + (MA^2 + A^2 M)/8 - AMA/4`.
pub fn guided_matrix_quadratic(
    weights: &CooperationWeights,
    adjacency: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    weights.require_len(adjacency.nrows())?;
    let m = weights.as_slice();
    let a2 = adjacency * adjacency;
    let ama = adjacency * weights.diagonal() * adjacency;
    let out = diag_sandwich_sum(m, adjacency) * 0.5 + diag_sandwich_sum(m, &a2) * 0.125 - ama * 0.25;
    Ok(symmetrize(&out))
}

/// `M - T_K M T_K` with `T_K` the order-`order` truncation of `L^{1/2}`.
pub fn guided_matrix_series(
    weights: &CooperationWeights,
    adjacency: &DMatrix<f64>,
    order: usize,
) -> Result<DMatrix<f64>> {
    weights.require_len(adjacency.nrows())?;
    let t = spectral::sqrt_taylor_unchecked(adjacency, order);
    let m = weights.diagonal();
    Ok(symmetrize(&(&m - &t * &m * &t)))
}

/// Order-`order` approximation of the guided criterion matrix: the closed
/// linear and quadratic forms for orders 1 and 2, and [`guided_matrix_series`]
/// beyond.
///
/// The closed forms keep every path of total length `<= order` in the double
/// expansion of `M - (I - A)^{1/2} M (I - A)^{1/2}`; the series form squares a
/// truncated root and so keeps some longer cross terms as well.
pub fn guided_matrix_approx(
    weights: &CooperationWeights,
    adjacency: &DMatrix<f64>,
    order: usize,
) -> Result<DMatrix<f64>> {
    match order {
        0 => Err(Error::Config("approximation order must be at least 1".into())),
        1 => guided_matrix_linear(weights, adjacency),
        2 => guided_matrix_quadratic(weights, adjacency),
        k => guided_matrix_series(weights, adjacency, k),
    }
}

/// Full eigendecomposition of a guided criterion matrix, values `zeta`
/// descending, with the back-evaluated concentration and embedded distance of
/// every vector.
pub fn guided_slepians(
    criterion: &DMatrix<f64>,
    weights: &CooperationWeights,
    laplacian_sqrt: &DMatrix<f64>,
) -> Result<SlepianSet> {
    weights.require_len(criterion.nrows())?;
    let basis = eig_sym(criterion, SortOrder::Descending)?;
    let m = weights.as_slice();
    let embedded = laplacian_sqrt * weights.diagonal() * laplacian_sqrt;
    let mut companion_mu = Vec::with_capacity(basis.n());
    let mut companion_xi = Vec::with_capacity(basis.n());
    for g in basis.vectors.column_iter() {
        companion_mu.push(g.iter().zip(m).map(|(x, w)| w * x * x).sum());
        companion_xi.push(g.dot(&(&embedded * g)));
    }
    Ok(SlepianSet {
        kind: CriterionKind::Zeta,
        vectors: basis.vectors,
        values: basis.values.iter().copied().collect(),
        companion_mu: Some(companion_mu),
        companion_xi: Some(companion_xi),
    })
}

/// Counts behind the full-bandwidth degeneracy of the mu and xi designs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub kind: CriterionKind,
    /// Values within `tol` of 1.
    pub ones: usize,
    /// Values within `tol` of 0.
    pub zeros: usize,
    /// Zeros on the selection diagonal.
    pub unselected: usize,
    /// mu: the value multiset equals diag(S). xi: `zeros >= unselected`.
    pub holds: bool,
    /// xi only: `zeros == unselected`, expected whenever the graph is
    /// connected.
    pub equality: bool,
}

pub fn verify_degeneracy(
    set: &SlepianSet,
    selection: &CooperationWeights,
    tol: f64,
) -> Result<DegeneracyReport> {
    let n = set.n();
    if set.kind == CriterionKind::Zeta || set.len() != n {
        return Err(Error::UnsupportedDegeneracyCheck);
    }
    selection.require_len(n)?;
    selection.require_binary()?;
    let ones = set.values.iter().filter(|v| (*v - 1.0).abs() <= tol).count();
    let zeros = set.values.iter().filter(|v| v.abs() <= tol).count();
    let unselected = selection.zeros();
    let (holds, equality) = match set.kind {
        CriterionKind::Mu => {
            let ok = ones == n - unselected && zeros == unselected;
            (ok, ok)
        }
        _ => (zeros >= unselected, zeros == unselected),
    };
    Ok(DegeneracyReport {
        kind: set.kind,
        ones,
        zeros,
        unselected,
        holds,
        equality,
    })
}

/// Orthogonal projector onto the span of the columns of `basis` (assumed
/// orthonormal).
pub fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis * basis.transpose()
}

/// Columns of `set.vectors` whose values satisfy `keep`.
pub fn columns_where(set: &SlepianSet, keep: impl Fn(f64) -> bool) -> DMatrix<f64> {
    let cols: Vec<_> = set
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| keep(v))
        .map(|(k, _)| set.vectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(set.n(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
