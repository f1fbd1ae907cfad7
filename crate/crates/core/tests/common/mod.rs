#![allow(dead_code)]

use guided_spectral::graph::Graph;
use guided_spectral::synthetic;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected Erdős–Rényi graph with `n` in `sizes` and a density that keeps
/// rejection sampling cheap.
pub fn random_connected(rng: &mut ChaCha8Rng, sizes: std::ops::RangeInclusive<usize>) -> Graph {
    let n = rng.gen_range(sizes);
    let p = rng.gen_range((2.0 * (n as f64).ln() / n as f64).min(0.9)..=0.9);
    synthetic::connected_erdos_renyi(n, p, rng)
}

/// Random binary selection with at least one selected and one unselected node.
pub fn random_selection(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let sel: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !sel.is_empty() && sel.len() < n {
            return sel;
        }
    }
}

/// Triple-loop product, kept independent of nalgebra's kernels.
pub fn naive_mul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m, p) = (a.nrows(), a.ncols(), b.ncols());
    assert_eq!(m, b.nrows());
    let mut out = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..m {
                s += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

pub fn naive_pow(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = naive_mul(&out, a);
    }
    out
}

/// `c_k = (2k)! / (4^k (k!)^2 (2k - 1))` from factorials, for small `k`.
pub fn factorial_coeff(k: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(2 * k) / (4f64.powi(k as i32) * fact(k).powi(2) * f64::from(2 * k - 1))
}

/// Random orthogonal 2x2 matrix, a reflection half of the time.
pub fn random_orthogonal(rng: &mut ChaCha8Rng) -> nalgebra::Matrix2<f64> {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = nalgebra::Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
    if rng.gen_bool(0.5) {
        r * nalgebra::Matrix2::new(1.0, 0.0, 0.0, -1.0)
    } else {
        r
    }
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, 2, |_, _| rng.gen_range(-1.0..1.0))
}
