//! Two-dimensional guided embeddings and their trajectories across a sweep of
//! cooperation weights.

use nalgebra::{DMatrix, Matrix2, SVD};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NormalizedOperators;
use crate::slepian::{
    guided_matrix_approx, guided_matrix_exact, guided_slepians, CooperationWeights, SlepianSet,
};
use crate::spectral::sqrt_psd_exact;

/// Eigengaps below this trigger a [`GapWarning`].
pub const EIGENGAP_WARN: f64 = 1e-6;

/// Cooperation weights along a focus sweep. Focus nodes stay at 1; every other
/// node moves linearly from `start` to `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    pub steps: Vec<CooperationWeights>,
    pub focus: Vec<usize>,
    /// Off-focus weight at each step.
    pub off_focus: Vec<f64>,
}

impl WeightSchedule {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends `other`, dropping its first step when it repeats our last one
    /// (e.g. chaining a 1 -> 0.5 sweep with a 0.5 -> 0 sweep).
    pub fn then(mut self, other: WeightSchedule) -> Result<WeightSchedule> {
        if other.focus != self.focus {
            return Err(Error::InvalidSchedule("focus sets differ".into()));
        }
        let skip = match (self.steps.last(), other.steps.first()) {
            (Some(a), Some(b)) if a == b => 1,
            _ => 0,
        };
        self.steps.extend(other.steps.into_iter().skip(skip));
        self.off_focus.extend(other.off_focus.into_iter().skip(skip));
        Ok(self)
    }
}

pub fn make_schedule(
    n: usize,
    focus: &[usize],
    steps: usize,
    start: f64,
    end: f64,
) -> Result<WeightSchedule> {
    if focus.is_empty() {
        return Err(Error::EmptyFocus);
    }
    if steps < 2 {
        return Err(Error::InvalidSchedule(format!("need at least 2 steps, got {steps}")));
    }
    if !(end >= 0.0 && end <= start && start.is_finite()) {
        return Err(Error::InvalidSchedule(format!(
            "off-focus weights must satisfy 0 <= end <= start, got {start} -> {end}"
        )));
    }
    if let Some(&bad) = focus.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut focus = focus.to_vec();
    focus.sort_unstable();
    focus.dedup();

    let mut out = Vec::with_capacity(steps);
    let mut off = Vec::with_capacity(steps);
    for s in 0..steps {
        let t = s as f64 / (steps - 1) as f64;
        let value = if s == steps - 1 { end } else { start + (end - start) * t };
        let mut w = vec![value; n];
        for &i in &focus {
            w[i] = 1.0;
        }
        out.push(CooperationWeights::new(w)?);
        off.push(value);
    }
    Ok(WeightSchedule {
        steps: out,
        focus,
        off_focus: off,
    })
}

/// Nodes projected on two criterion eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D {
    /// `n x 2`.
    pub coords: DMatrix<f64>,
    /// 1-based eigenvector indices.
    pub eigvec_indices: (usize, usize),
    pub zeta_values: (f64, f64),
}

/// Embeds nodes on eigenvectors `indices` (1-based) of a guided set. The
/// default view of the sweep uses `(2, 3)`.
pub fn embed(set: &SlepianSet, indices: (usize, usize)) -> Result<Embedding2D> {
    let len = set.len();
    for idx in [indices.0, indices.1] {
        if idx == 0 || idx > len {
            return Err(Error::IndexOutOfRange { index: idx, len });
        }
    }
    let (a, b) = (indices.0 - 1, indices.1 - 1);
    let coords = DMatrix::from_columns(&[set.vectors.column(a), set.vectors.column(b)]);
    Ok(Embedding2D {
        coords,
        eigvec_indices: indices,
        zeta_values: (set.values[a], set.values[b]),
    })
}

/// Orthogonal `R` (rotation or reflection) minimizing `||target R - reference||_F`.
pub fn procrustes_rotation(reference: &DMatrix<f64>, target: &DMatrix<f64>) -> Result<Matrix2<f64>> {
    if reference.shape() != target.shape() || target.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: reference.nrows(),
            found: target.nrows(),
        });
    }
    if target.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateTarget);
    }
    let cross: Matrix2<f64> = (target.transpose() * reference).fixed_view::<2, 2>(0, 0).into_owned();
    // polar factor of cross = U S V^T is U V^T
    let svd = SVD::new(cross, true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    Ok(u * v_t)
}

pub fn procrustes_align(reference: &DMatrix<f64>, target: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let r = procrustes_rotation(reference, target)?;
    Ok(apply_transform(target, &r))
}

/// `coords * r` for an `n x 2` coordinate matrix.
pub fn apply_transform(coords: &DMatrix<f64>, r: &Matrix2<f64>) -> DMatrix<f64> {
    let out = coords * r;
    DMatrix::from_column_slice(out.nrows(), 2, out.as_slice())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// Each frame aligned to the previous aligned frame.
    #[default]
    Chained,
    /// Each frame aligned to frame 0.
    Anchored,
}

impl std::str::FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chained" => Ok(Alignment::Chained),
            "anchored" => Ok(Alignment::Anchored),
            other => Err(Error::Config(format!("unknown alignment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub indices: (usize, usize),
    /// Taylor order of the criterion; `None` uses the exact square root.
    pub approx_order: Option<usize>,
    pub alignment: Alignment,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            indices: (2, 3),
            approx_order: None,
            alignment: Alignment::Chained,
        }
    }
}

/// A near-degenerate pair of eigenvalues next to a plotted eigenvector; the
/// two eigenvectors may swap or rotate into each other at this step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapWarning {
    pub step: usize,
    /// 1-based indices of the pair.
    pub between: (usize, usize),
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Aligned frames; `frames[0]` is unaligned.
    pub frames: Vec<Embedding2D>,
    /// Transform applied to each raw frame (identity for frame 0).
    pub transforms: Vec<Matrix2<f64>>,
    /// `per_node_paths[i][s]` is node `i` at step `s`.
    pub per_node_paths: Vec<Vec<[f64; 2]>>,
    pub warnings: Vec<GapWarning>,
}

fn gap_warnings(step: usize, values: &[f64], indices: (usize, usize)) -> Vec<GapWarning> {
    let mut pairs = vec![(indices.0, indices.0 + 1), (indices.1, indices.1 + 1)];
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .into_iter()
        .filter(|&(_, hi)| hi <= values.len())
        .filter_map(|(lo, hi)| {
            let gap = (values[lo - 1] - values[hi - 1]).abs();
            (gap < EIGENGAP_WARN).then_some(GapWarning {
                step,
                between: (lo, hi),
                gap,
            })
        })
        .collect()
}

/// Guided criterion matrix for one set of weights.
pub fn criterion_matrix(
    ops: &NormalizedOperators,
    laplacian_sqrt: &DMatrix<f64>,
    weights: &CooperationWeights,
    approx_order: Option<usize>,
) -> Result<DMatrix<f64>> {
    match approx_order {
        None => guided_matrix_exact(weights, laplacian_sqrt),
        Some(k) => guided_matrix_approx(weights, ops.adjacency(), k),
    }
}

/// Runs the guided decomposition at every schedule step (in parallel), embeds
/// each on `options.indices`, then aligns the frames in order.
pub fn trajectory_sweep(
    ops: &NormalizedOperators,
    schedule: &WeightSchedule,
    options: &SweepOptions,
) -> Result<Trajectory> {
    let laplacian_sqrt = sqrt_psd_exact(ops.laplacian())?;
    let raw: Vec<(Embedding2D, Vec<GapWarning>)> = schedule
        .steps
        .par_iter()
        .enumerate()
        .map(|(step, weights)| {
            let criterion = criterion_matrix(ops, &laplacian_sqrt, weights, options.approx_order)?;
            let set = guided_slepians(&criterion, weights, &laplacian_sqrt)?;
            let warnings = gap_warnings(step, &set.values, options.indices);
            Ok((embed(&set, options.indices)?, warnings))
        })
        .collect::<Result<_>>()?;

    let mut frames: Vec<Embedding2D> = Vec::with_capacity(raw.len());
    let mut transforms = Vec::with_capacity(raw.len());
    let mut warnings = Vec::new();
    for (step, (frame, w)) in raw.into_iter().enumerate() {
        warnings.extend(w);
        if step == 0 {
            transforms.push(Matrix2::identity());
            frames.push(frame);
            continue;
        }
        let reference = match options.alignment {
            Alignment::Chained => &frames[step - 1].coords,
            Alignment::Anchored => &frames[0].coords,
        };
        let r = procrustes_rotation(reference, &frame.coords)?;
        transforms.push(r);
        frames.push(Embedding2D {
            coords: apply_transform(&frame.coords, &r),
            ..frame
        });
    }

    let n = ops.n();
    let per_node_paths = (0..n)
        .map(|i| {
            frames
                .iter()
                .map(|f| [f.coords[(i, 0)], f.coords[(i, 1)]])
                .collect()
        })
        .collect();
    Ok(Trajectory {
        frames,
        transforms,
        per_node_paths,
        warnings,
    })
}
