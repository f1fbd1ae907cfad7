//! Clustering of embedded nodes and significance testing of the clusters.
//!
//! * [`kmeans`]: Lloyd iterations from k-means++ seeds, best of several
//!   restarts. Restart `r` draws from a ChaCha stream `r` of the given seed, so
//!   results are independent of thread scheduling.
//! * [`silhouette_select`]: picks the cluster count with the fewest negative
//!   silhouette values.
//! * [`modularity`] and [`permutation_test`]: Newman–Girvan modularity of an
//!   assignment against a null distribution of shuffled assignments.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_LLOYD_ITERATIONS: usize = 300;
pub const CENTROID_SHIFT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    pub inertia: f64,
}

impl ClusterAssignment {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Member indices of each cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|d| {
            let diff = points[(i, d)] - centroids[(c, d)];
            diff * diff
        })
        .sum()
}

fn nearest(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.nrows() {
        let d = sq_dist(points, i, centroids, c);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_plus_plus(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, dim) = points.shape();
    let mut centroids = DMatrix::zeros(k, dim);
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from(&points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(c).copy_from(&points.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centroids, c));
        }
    }
    centroids
}

fn assign(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let (c, d) = nearest(points, i, centroids);
        *label = c;
        inertia += d;
    }
    inertia
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster with at least two members.
fn repair_empty(points: &DMatrix<f64>, centroids: &mut DMatrix<f64>, labels: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .max_by(|&a, &b| {
                sq_dist(points, a, centroids, labels[a])
                    .total_cmp(&sq_dist(points, b, centroids, labels[b]))
                    .then(b.cmp(&a))
            })
            .expect("k <= n leaves a cluster with two members");
        labels[donor] = empty;
        centroids.row_mut(empty).copy_from(&points.row(donor));
    }
}

fn update_centroids(points: &DMatrix<f64>, labels: &[usize], k: usize) -> DMatrix<f64> {
    let dim = points.ncols();
    let mut sums = DMatrix::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for d in 0..dim {
            sums[(l, d)] += points[(i, d)];
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        for d in 0..dim {
            sums[(c, d)] /= count as f64;
        }
    }
    sums
}

fn inertia_of(points: &DMatrix<f64>, labels: &[usize], centroids: &DMatrix<f64>) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(points, i, centroids, l))
        .sum()
}

/// One seeded k-means run. Also returns the inertia after every Lloyd
/// iteration.
pub(crate) fn kmeans_single(
    points: &DMatrix<f64>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> (ClusterAssignment, Vec<f64>) {
    let n = points.nrows();
    let mut centroids = kmeans_plus_plus(points, k, rng);
    let mut labels = vec![0; n];
    assign(points, &centroids, &mut labels);
    repair_empty(points, &mut centroids, &mut labels, k);
    let mut history = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let next = update_centroids(points, &labels, k);
        let shift = (&next - &centroids).norm();
        centroids = next;
        assign(points, &centroids, &mut labels);
        repair_empty(points, &mut centroids, &mut labels, k);
        centroids = update_centroids(points, &labels, k);
        history.push(inertia_of(points, &labels, &centroids));
        if shift < CENTROID_SHIFT_TOL {
            break;
        }
    }
    let inertia = inertia_of(points, &labels, &centroids);
    (ClusterAssignment { labels, k, inertia }, history)
}

/// Best-inertia clustering over `repetitions` seeded restarts.
pub fn kmeans(points: &DMatrix<f64>, k: usize, repetitions: usize, seed: u64) -> Result<ClusterAssignment> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::TooManyClusters { k, n });
    }
    if repetitions == 0 {
        return Err(Error::Config("k-means needs at least one repetition".into()));
    }
    let runs: Vec<ClusterAssignment> = (0..repetitions)
        .into_par_iter()
        .map(|rep| kmeans_single(points, k, &mut rng_for(seed, rep as u64)).0)
        .collect();
    // min inertia, first restart on ties
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one repetition");
    Ok(canonical_labels(best))
}

/// Relabels clusters in order of first appearance.
fn canonical_labels(mut a: ClusterAssignment) -> ClusterAssignment {
    let mut map = vec![usize::MAX; a.k];
    let mut next = 0;
    for l in a.labels.iter_mut() {
        if map[*l] == usize::MAX {
            map[*l] = next;
            next += 1;
        }
        *l = map[*l];
    }
    a
}

fn euclid(points: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (0..points.ncols())
        .map(|d| (points[(i, d)] - points[(j, d)]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Silhouette value of every point. Singletons, and points with
/// `a(i) = b(i) = 0`, score 0.
pub fn silhouette_values(points: &DMatrix<f64>, labels: &[usize], k: usize) -> Vec<f64> {
    let n = points.nrows();
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    (0..n)
        .map(|i| {
            let own = labels[i];
            if sizes[own] <= 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in 0..n {
                if j != i {
                    sums[labels[j]] += euclid(points, i, j);
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            if !b.is_finite() {
                return 0.0;
            }
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KScore {
    pub k: usize,
    pub negatives: usize,
    pub mean_silhouette: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteSelection {
    pub k: usize,
    pub assignment: ClusterAssignment,
    pub silhouettes: Vec<f64>,
    pub scores: Vec<KScore>,
}

/// Clusters for every `k` in `k_min..=k_max` and keeps the one with the fewest
/// negative silhouettes (ties: higher mean silhouette, then smaller `k`).
pub fn silhouette_select(
    points: &DMatrix<f64>,
    k_min: usize,
    k_max: usize,
    repetitions: usize,
    seed: u64,
) -> Result<SilhouetteSelection> {
    let n = points.nrows();
    if k_min < 2 || k_max < k_min || k_max + 1 > n {
        return Err(Error::InvalidKRange {
            min: k_min,
            max: k_max,
            n,
        });
    }
    let mut best: Option<SilhouetteSelection> = None;
    let mut scores = Vec::new();
    for k in k_min..=k_max {
        let assignment = kmeans(points, k, repetitions, seed)?;
        let silhouettes = silhouette_values(points, &assignment.labels, k);
        let negatives = silhouettes.iter().filter(|&&s| s < 0.0).count();
        let mean = silhouettes.iter().sum::<f64>() / n as f64;
        scores.push(KScore {
            k,
            negatives,
            mean_silhouette: mean,
        });
        let better = match &best {
            None => true,
            Some(b) => {
                let b_neg = b.silhouettes.iter().filter(|&&s| s < 0.0).count();
                let b_mean = b.silhouettes.iter().sum::<f64>() / n as f64;
                negatives < b_neg || (negatives == b_neg && mean > b_mean)
            }
        };
        if better {
            best = Some(SilhouetteSelection {
                k,
                assignment,
                silhouettes,
                scores: Vec::new(),
            });
        }
    }
    let mut best = best.expect("non-empty k range");
    best.scores = scores;
    Ok(best)
}

fn check_binary_adjacency(a: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotBinaryAdjacency);
    }
    for i in 0..n {
        if a[(i, i)] != 0.0 {
            return Err(Error::NotBinaryAdjacency);
        }
        for j in 0..n {
            let v = a[(i, j)];
            if (v != 0.0 && v != 1.0) || v != a[(j, i)] {
                return Err(Error::NotBinaryAdjacency);
            }
        }
    }
    Ok(())
}

/// Precomputed degrees for repeated modularity evaluations.
struct ModularityContext<'a> {
    adjacency: &'a DMatrix<f64>,
    degrees: Vec<f64>,
    two_w: f64,
}

impl<'a> ModularityContext<'a> {
    fn new(adjacency: &'a DMatrix<f64>) -> Result<Self> {
        check_binary_adjacency(adjacency)?;
        let degrees: Vec<f64> = adjacency.row_iter().map(|r| r.sum()).collect();
        let two_w: f64 = degrees.iter().sum();
        if two_w == 0.0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            adjacency,
            degrees,
            two_w,
        })
    }

    /// Grouped by community, `Q = sum_c e_c / 2w - (d_c / 2w)^2`, where `e_c`
    /// and `d_c` are integer-valued sums for binary graphs.
    fn q(&self, labels: &[usize]) -> f64 {
        let groups = labels.iter().max().map_or(0, |&m| m + 1);
        let mut internal = vec![0.0; groups];
        let mut volume = vec![0.0; groups];
        for (i, &li) in labels.iter().enumerate() {
            volume[li] += self.degrees[i];
            for (j, &lj) in labels.iter().enumerate() {
                if li == lj {
                    internal[li] += self.adjacency[(i, j)];
                }
            }
        }
        internal
            .iter()
            .zip(&volume)
            .map(|(e, d)| e / self.two_w - (d / self.two_w).powi(2))
            .sum()
    }
}

/// Newman–Girvan modularity
/// `Q = (1/2w) sum_ij (a_ij - d_i d_j / 2w) [c_i = c_j]` of a binary graph.
pub fn modularity(adjacency: &DMatrix<f64>, labels: &[usize]) -> Result<f64> {
    if labels.len() != adjacency.nrows() {
        return Err(Error::DimensionMismatch {
            expected: adjacency.nrows(),
            found: labels.len(),
        });
    }
    Ok(ModularityContext::new(adjacency)?.q(labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullModel {
    /// Shuffle the observed labels (cluster sizes preserved).
    #[default]
    Permute,
    /// Draw every label uniformly from the observed label range.
    Uniform,
}

impl std::str::FromStr for NullModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "permute" => Ok(NullModel::Permute),
            "uniform" => Ok(NullModel::Uniform),
            other => Err(Error::Config(format!("unknown null model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityTest {
    pub q_observed: f64,
    pub null_samples: Vec<f64>,
    /// `(1 + #{null >= observed}) / (1 + draws)`.
    pub p_value: f64,
}

pub fn permutation_test(
    adjacency: &DMatrix<f64>,
    labels: &[usize],
    draws: usize,
    seed: u64,
    null: NullModel,
) -> Result<ModularityTest> {
    if draws == 0 {
        return Err(Error::Config("permutation test needs at least one draw".into()));
    }
    if labels.len() != adjacency.nrows() {
        return Err(Error::DimensionMismatch {
            expected: adjacency.nrows(),
            found: labels.len(),
        });
    }
    let ctx = ModularityContext::new(adjacency)?;
    let q_observed = ctx.q(labels);
    let groups = labels.iter().copied().max().map_or(0, |m| m + 1);
    let null_samples: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|draw| {
            let mut rng = rng_for(seed, draw as u64);
            let shuffled: Vec<usize> = match null {
                NullModel::Permute => {
                    let mut v = labels.to_vec();
                    v.shuffle(&mut rng);
                    v
                }
                NullModel::Uniform => (0..labels.len()).map(|_| rng.gen_range(0..groups)).collect(),
            };
            ctx.q(&shuffled)
        })
        .collect();
    let exceed = null_samples.iter().filter(|&&q| q >= q_observed).count();
    Ok(ModularityTest {
        q_observed,
        p_value: (1 + exceed) as f64 / (1 + draws) as f64,
        null_samples,
    })
}

/// Whole-graph labels for a clustering of the focus nodes: focus node
/// `focus[i]` gets `focus_labels[i]`, every other node joins one extra group
/// with label `k`.
pub fn with_off_focus_group(n: usize, focus: &[usize], focus_labels: &[usize], k: usize) -> Result<Vec<usize>> {
    if focus.len() != focus_labels.len() {
        return Err(Error::DimensionMismatch {
            expected: focus.len(),
            found: focus_labels.len(),
        });
    }
    let mut labels = vec![k; n];
    for (&node, &label) in focus.iter().zip(focus_labels) {
        if node >= n {
            return Err(Error::IndexOutOfRange { index: node, len: n });
        }
        labels[node] = label;
    }
    Ok(labels)
}
