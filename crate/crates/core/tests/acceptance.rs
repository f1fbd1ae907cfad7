//! Acceptance criteria 1-10, one status line each.
//!
//! Connectome checks need `GUIDED_SPECTRAL_CONNECTOME` pointing at a directory
//! with `edges.csv` and `nodes.csv` (node classes `sensory`, `inter`,
//! `motor`); without it they report SKIP and the synthetic fallbacks run.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::*;
use guided_spectral::analysis::{modularity, permutation_test, NullModel};
use guided_spectral::embedding::{procrustes_align, procrustes_rotation, apply_transform};
use guided_spectral::graph::{normalize, Graph};
use guided_spectral::io::{read_edge_csv, read_node_csv, write_edge_csv, write_node_csv};
use guided_spectral::pipeline::{cmd_cluster, cmd_sweep, FocusSpec, RunConfig};
use guided_spectral::slepian::{
    concentration_slepians, embedded_distance_slepians, guided_matrix_exact, guided_matrix_linear,
    guided_matrix_quadratic, guided_matrix_series, guided_slepians, verify_degeneracy, Bandwidth,
    CooperationWeights,
};
use guided_spectral::spectral::{eig_sym, sqrt_psd_exact, taylor_coeff, taylor_coeffs, SortOrder, TaylorBound};
use guided_spectral::{load_graph, synthetic, LoadOptions};
use nalgebra::DMatrix;
use rand::Rng;

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }
}

fn connectome() -> Option<Graph> {
    let dir = PathBuf::from(std::env::var_os("GUIDED_SPECTRAL_CONNECTOME")?);
    let edges = read_edge_csv(&dir.join("edges.csv")).expect("connectome edges");
    let nodes = read_node_csv(&dir.join("nodes.csv")).expect("connectome nodes");
    Some(load_graph(&edges, &nodes, &LoadOptions::default()).expect("connectome graph"))
}

/// `(ones, zeros)` of the full-bandwidth mu spectrum and the xi zero count.
fn degeneracy_counts(g: &Graph, selected: &[usize]) -> (usize, usize, usize) {
    let n = g.n();
    let ops = normalize(g).unwrap();
    let basis = eig_sym(ops.laplacian(), SortOrder::Ascending).unwrap();
    let half = sqrt_psd_exact(ops.laplacian()).unwrap();
    let sel = CooperationWeights::selection(n, selected).unwrap();
    let mu = concentration_slepians(&basis, &sel, Bandwidth::full(n)).unwrap();
    let xi = embedded_distance_slepians(&basis, &half, &sel, Bandwidth::full(n)).unwrap();
    let m = verify_degeneracy(&mu, &sel, 1e-8).unwrap();
    let x = verify_degeneracy(&xi, &sel, 1e-8).unwrap();
    (m.ones, m.zeros, x.zeros)
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    if let Some(g) = connectome() {
        let start = Instant::now();
        let motor = g.nodes_in_class("motor");
        let selected: Vec<usize> = (0..g.n()).filter(|i| !motor.contains(i)).collect();
        let (ones, zeros, _) = degeneracy_counts(&g, &selected);
        let secs = start.elapsed().as_secs_f64();
        ok &= g.n() == 279 && ones == 151 && zeros == 128 && secs < 10.0;
        notes.push(format!("connectome n={} ones={ones} zeros={zeros} in {secs:.2}s", g.n()));
    } else {
        notes.push("connectome SKIP (GUIDED_SPECTRAL_CONNECTOME unset)".into());
    }

    let mut r = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let g = random_connected(&mut r, 5..=40);
        let sel = random_selection(&mut r, g.n());
        let ops = normalize(&g).unwrap();
        let basis = eig_sym(ops.laplacian(), SortOrder::Ascending).unwrap();
        let w = CooperationWeights::selection(g.n(), &sel).unwrap();
        let mu = concentration_slepians(&basis, &w, Bandwidth::full(g.n())).unwrap();
        let mut diag = w.as_slice().to_vec();
        diag.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in mu.values.iter().zip(&diag) {
            worst = worst.max((a - b).abs());
        }
    }
    ok &= worst <= 1e-8;
    notes.push(format!("50 random graphs: max |mu - diag(S)| = {worst:.1e}"));

    let start = Instant::now();
    let g = synthetic::connected_erdos_renyi(279, 0.05, &mut rng(102));
    let (ones, zeros, _) = degeneracy_counts(&g, &(0..151).collect::<Vec<_>>());
    let secs = start.elapsed().as_secs_f64();
    ok &= ones == 151 && zeros == 128 && secs < 10.0;
    notes.push(format!("synthetic n=279: ones={ones} zeros={zeros} in {secs:.2}s"));
    Outcome::check(ok, notes.join("; "))
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    if let Some(g) = connectome() {
        let motor = g.nodes_in_class("motor");
        let selected: Vec<usize> = (0..g.n()).filter(|i| !motor.contains(i)).collect();
        let (_, _, xi_zeros) = degeneracy_counts(&g, &selected);
        ok &= xi_zeros == 128;
        notes.push(format!("connectome xi zeros={xi_zeros}"));
    } else {
        notes.push("connectome SKIP".into());
    }

    let mut r = rng(201);
    let mut equal = 0;
    for _ in 0..50 {
        let g = random_connected(&mut r, 5..=40);
        let sel = random_selection(&mut r, g.n());
        let (_, _, z) = degeneracy_counts(&g, &sel);
        equal += usize::from(z == g.n() - sel.len());
    }
    ok &= equal == 50;
    notes.push(format!("connected z_lambda = z_S on {equal}/50"));

    let g = synthetic::connected_erdos_renyi(279, 0.05, &mut rng(102));
    let (_, _, z) = degeneracy_counts(&g, &(0..151).collect::<Vec<_>>());
    ok &= z == 128;
    notes.push(format!("synthetic n=279: {z} zeros"));

    // two disjoint triangles, one node unselected: the untouched component
    // contributes an extra null vector
    let w = synthetic::complete(3).weights().clone();
    let mut both = DMatrix::zeros(6, 6);
    both.view_mut((0, 0), (3, 3)).copy_from(&w);
    both.view_mut((3, 3), (3, 3)).copy_from(&w);
    let g = Graph::from_weights(both).unwrap();
    let (_, _, z) = degeneracy_counts(&g, &[1, 2, 3, 4, 5]);
    let mut r = rng(202);
    let mut never_below = true;
    for _ in 0..30 {
        let a = random_connected(&mut r, 3..=8);
        let b = random_connected(&mut r, 3..=8);
        let n = a.n() + b.n();
        let mut w = DMatrix::zeros(n, n);
        w.view_mut((0, 0), (a.n(), a.n())).copy_from(a.weights());
        w.view_mut((a.n(), a.n()), (b.n(), b.n())).copy_from(b.weights());
        let g = Graph::from_weights(w).unwrap();
        let sel = random_selection(&mut r, n);
        let (_, _, zl) = degeneracy_counts(&g, &sel);
        never_below &= zl >= n - sel.len();
    }
    ok &= z == 2 && never_below;
    notes.push(format!("disconnected: z_lambda={z} > z_S=1, z_lambda >= z_S on 30 random"));
    Outcome::check(ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let mut r = rng(301);
    let mut worst_hi = f64::NEG_INFINITY;
    let mut worst_lo = f64::NEG_INFINITY;
    for _ in 0..100 {
        let g = random_connected(&mut r, 3..=30);
        let m: Vec<f64> = (0..g.n()).map(|_| r.gen_range(0.0..=3.0)).collect();
        let w = CooperationWeights::new(m).unwrap();
        let half = sqrt_psd_exact(normalize(&g).unwrap().laplacian()).unwrap();
        let values = eig_sym(&guided_matrix_exact(&w, &half).unwrap(), SortOrder::Descending)
            .unwrap()
            .values;
        worst_hi = worst_hi.max(values[0] - w.max());
        worst_lo = worst_lo.max(-2.0 * w.max() - values[values.len() - 1]);
    }
    let ok = worst_hi <= 1e-9 && worst_lo <= 1e-9;
    Outcome::check(
        ok,
        format!("100 graphs: max(zeta_1 - m_max) = {worst_hi:.2e}, max(-2 m_max - zeta_n) = {worst_lo:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut r = rng(401);
    let mut value_err = 0.0f64;
    let mut vector_err = 0.0f64;
    let mut simple = 0;
    for _ in 0..20 {
        let g = random_connected(&mut r, 4..=30);
        let n = g.n();
        let ops = normalize(&g).unwrap();
        let half = sqrt_psd_exact(ops.laplacian()).unwrap();
        let ones = CooperationWeights::ones(n);
        let zeta = guided_slepians(&guided_matrix_exact(&ones, &half).unwrap(), &ones, &half).unwrap();
        let adj = eig_sym(ops.adjacency(), SortOrder::Descending).unwrap();
        let lap = eig_sym(ops.laplacian(), SortOrder::Ascending).unwrap();
        for k in 0..n {
            value_err = value_err.max((zeta.values[k] - adj.values[k]).abs());
            let gap_before = if k > 0 { lap.values[k] - lap.values[k - 1] } else { f64::INFINITY };
            let gap_after = if k + 1 < n { lap.values[k + 1] - lap.values[k] } else { f64::INFINITY };
            if gap_before.min(gap_after) > 1e-6 {
                simple += 1;
                vector_err = vector_err.max((zeta.vectors.column(k) - lap.vectors.column(k)).amax());
            }
        }
    }
    let ok = value_err <= 1e-9 && vector_err <= 1e-8;
    Outcome::check(
        ok,
        format!("20 graphs: eigenvalue err {value_err:.1e}, eigenvector err {vector_err:.1e} over {simple} simple pairs"),
    )
}

/// Remainder with the exact truncation error near `lambda = 0`: a finite bound
/// on `||L^{1/2} - T_K||_F` that the infinite reported bound hides.
fn tail_bound(order: usize, lambdas: &[f64]) -> f64 {
    lambdas
        .iter()
        .map(|&l| {
            if l < 1e-6 {
                let series: f64 = taylor_coeffs(order)
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (1.0 - l).powi(k as i32 + 1))
                    .sum();
                (l.sqrt() - (1.0 - series)).abs()
            } else {
                guided_spectral::spectral::remainder_term(order, l)
            }
        })
        .sum()
}

fn criterion_5() -> Outcome {
    let mut ok = (1..=3).map(taylor_coeff).eq([0.5, 0.125, 0.0625]);
    ok &= (1..=10).all(|k| (taylor_coeff(k as usize) - factorial_coeff(k)).abs() < 1e-15);

    let orders = [1, 2, 5, 10, 20];
    let mut r = rng(501);
    let (mut graphs, mut pairs, mut within, mut infinite) = (0, 0, 0, 0);
    let (mut squared_violations, mut linear_ok) = (0, true);
    let mut monotone = true;
    while graphs < 20 {
        let g = random_connected(&mut r, 6..=30);
        let ops = normalize(&g).unwrap();
        let lambdas: Vec<f64> = eig_sym(ops.laplacian(), SortOrder::Ascending)
            .unwrap()
            .values
            .iter()
            .map(|v| v.clamp(0.0, 2.0))
            .collect();
        if lambdas[1] < 0.05 {
            continue;
        }
        graphs += 1;
        let m: Vec<f64> = (0..g.n()).map(|_| r.gen_range(0.0..=1.0)).collect();
        let w = CooperationWeights::new(m.clone()).unwrap();
        let half = sqrt_psd_exact(ops.laplacian()).unwrap();
        let exact = guided_matrix_exact(&w, &half).unwrap();
        let mut dist = Vec::new();
        for &k in &orders {
            let emp = (guided_matrix_series(&w, ops.adjacency(), k).unwrap() - &exact).norm();
            let bound = TaylorBound::compute(k, &lambdas, &m).unwrap();
            pairs += 1;
            within += usize::from(emp <= bound.d_km);
            infinite += usize::from(!bound.is_finite());
            let d = tail_bound(k, &lambdas);
            let norm_m = m.iter().map(|x| x * x).sum::<f64>().sqrt();
            squared_violations += usize::from(emp > d * d * norm_m);
            linear_ok &= emp <= (2.0 * 2f64.sqrt() * d + d * d) * w.max() + 1e-12;
            dist.push(emp);
        }
        monotone &= dist[orders.len() - 1] <= dist[0];
    }
    ok &= within == pairs && monotone && linear_ok;
    Outcome::check(
        ok,
        format!(
            "c_1..c_3 exact; {within}/{pairs} within reported bound ({infinite} infinite: lambda=0 present, check is vacuous); \
             K=20 <= K=1 on all; with the finite lambda=0 tail, d_K^2 ||M|| is exceeded in {squared_violations}/{pairs} \
             while (2 sqrt2 d_K + d_K^2) m_max holds on all: {linear_ok}"
        ),
    )
}

/// Eq. (8) double sum keeping terms of total power `<= order`, from naive
/// products.
fn truncated_expansion(m: &[f64], a: &DMatrix<f64>, order: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let md = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(m));
    let mut out = DMatrix::zeros(n, n);
    for k in 1..=order {
        let ak = naive_pow(a, k);
        out += (naive_mul(&md, &ak) + naive_mul(&ak, &md)) * factorial_coeff(k as u32);
    }
    for k1 in 1..order {
        for k2 in 1..=order - k1 {
            let c = factorial_coeff(k1 as u32) * factorial_coeff(k2 as u32);
            out -= naive_mul(&naive_mul(&naive_pow(a, k1), &md), &naive_pow(a, k2)) * c;
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut r = rng(601);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 2..=5 {
        for g in synthetic::all_connected_graphs(n) {
            let a = normalize(&g).unwrap().adjacency().clone();
            let mut patterns: Vec<Vec<f64>> = (0u32..1 << n)
                .map(|bits| (0..n).map(|i| f64::from((bits >> i) & 1)).collect())
                .collect();
            patterns.push((0..n).map(|_| r.gen_range(0.0..=1.0)).collect());
            for m in patterns {
                let w = CooperationWeights::new(m.clone()).unwrap();
                let lin = guided_matrix_linear(&w, &a).unwrap();
                let quad = guided_matrix_quadratic(&w, &a).unwrap();
                worst = worst.max((lin - truncated_expansion(&m, &a, 1)).amax());
                worst = worst.max((quad - truncated_expansion(&m, &a, 2)).amax());
                cases += 1;
            }
        }
    }
    Outcome::check(worst <= 1e-12, format!("{cases} (graph, M) cases on n<=5: max entry error {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let a = normalize(&synthetic::complete(3)).unwrap().adjacency().clone();
    let mut ok = a.iter().enumerate().all(|(k, &v)| if k % 4 == 0 { v == 0.0 } else { v == 0.5 });
    let mut worst = 0.0f64;
    for bits in 0u32..8 {
        let m: Vec<f64> = (0..3).map(|i| f64::from((bits >> i) & 1)).collect();
        let w = CooperationWeights::new(m.clone()).unwrap();
        let lin = guided_matrix_linear(&w, &a).unwrap();
        let second = guided_matrix_quadratic(&w, &a).unwrap() - &lin;
        let md = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&m));
        let a2 = naive_mul(&a, &a);
        let direct = (naive_mul(&md, &a2) + naive_mul(&a2, &md)) / 8.0 - naive_mul(&naive_mul(&a, &md), &a) / 4.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((lin[(i, j)] - (m[i] + m[j]) / 2.0 * a[(i, j)]).abs());
                let paths: f64 = (0..3)
                    .map(|l| ((m[i] + m[j]) / 8.0 - m[l] / 4.0) * a[(i, l)] * a[(l, j)])
                    .sum();
                worst = worst.max((second[(i, j)] - paths).abs());
                worst = worst.max((direct[(i, j)] - paths).abs());
            }
        }
    }
    ok &= worst <= 1e-15;
    Outcome::check(ok, format!("triangle, 8 binary patterns: max deviation {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut r = rng(801);
    let mut recovery = 0.0f64;
    let mut beaten = 0;
    for _ in 0..50 {
        let n = r.gen_range(3..=40);
        let reference = random_points(&mut r, n);
        let q = random_orthogonal(&mut r);
        let moved = apply_transform(&reference, &q);
        recovery = recovery.max((procrustes_align(&reference, &moved).unwrap() - &reference).amax());

        let noisy = moved + random_points(&mut r, n) * 0.3;
        let rot = procrustes_rotation(&reference, &noisy).unwrap();
        let best = (apply_transform(&noisy, &rot) - &reference).norm();
        for _ in 0..1000 {
            let cand = random_orthogonal(&mut r);
            if (apply_transform(&noisy, &cand) - &reference).norm() < best - 1e-12 {
                beaten += 1;
            }
        }
    }
    Outcome::check(
        recovery < 1e-10 && beaten == 0,
        format!("recovery error {recovery:.1e}; optimum beaten by {beaten} of 50000 random candidates"),
    )
}

fn write_inputs(g: &Graph, dir: &Path) -> (PathBuf, PathBuf) {
    let (edges, nodes) = synthetic::to_records(g, "synapse");
    let (e, n) = (dir.join("edges.csv"), dir.join("nodes.csv"));
    write_edge_csv(&e, &edges).unwrap();
    write_node_csv(&n, &nodes).unwrap();
    (e, n)
}

/// Sweep with `class` in focus, then cluster the final frame.
fn focus_pipeline(edges: &Path, nodes: &Path, class: &str, out: &Path) -> (usize, f64, f64) {
    let mut config = RunConfig::new(edges, nodes, out);
    config.focus = FocusSpec::classes([class]);
    config.seed = Some(7);
    cmd_sweep(&config).unwrap();
    let report = cmd_cluster(&config, &out.join("trajectory.json")).unwrap().report;
    (report.k, report.q_observed, report.p_value)
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    if let Ok(dir) = std::env::var("GUIDED_SPECTRAL_CONNECTOME") {
        let dir = PathBuf::from(dir);
        let tmp = tempfile::tempdir().unwrap();
        for (class, expected) in [("sensory", 7usize), ("inter", 6)] {
            let out = tmp.path().join(class);
            let (k, q, p) = focus_pipeline(&dir.join("edges.csv"), &dir.join("nodes.csv"), class, &out);
            ok &= k.abs_diff(expected) <= 1 && p == 1.0 / 1000.0;
            notes.push(format!("{class}: k*={k} (paper {expected}), Q={q:.4}, p={p:.4}"));
        }
    } else {
        notes.push("connectome SKIP".into());
    }

    let tri = synthetic::complete(3).weights().clone();
    let mut two = DMatrix::zeros(6, 6);
    two.view_mut((0, 0), (3, 3)).copy_from(&tri);
    two.view_mut((3, 3), (3, 3)).copy_from(&tri);
    let split = modularity(&two, &[0, 0, 0, 1, 1, 1]).unwrap();
    let single = modularity(&two, &[0; 6]).unwrap();
    ok &= split == 0.5 && single == 0.0;
    notes.push(format!("two triangles Q={split}, single cluster Q={single}"));

    let (g, _) = synthetic::planted_partition(&synthetic::PlantedSpec::default(), 3);
    let tmp = tempfile::tempdir().unwrap();
    let (e, n) = write_inputs(&g, tmp.path());
    let (k, q, p) = focus_pipeline(&e, &n, "sensory", &tmp.path().join("out"));
    ok &= k.abs_diff(3) <= 1 && p == 1.0 / 1000.0;
    notes.push(format!("planted sensory focus: k*={k} (planted 3), Q={q:.4}, p={p:.4}"));

    let labels: Vec<usize> = (0..g.n()).map(|i| i % 4).collect();
    let shuffled = permutation_test(&guided_spectral::graph::binarize(&g).weights().clone(), &labels, 99, 1, NullModel::Permute)
        .unwrap();
    notes.push(format!("arbitrary labels p={:.2}", shuffled.p_value));
    Outcome::check(ok, notes.join("; "))
}

fn run_cli(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_guided-spectral"))
        .args(args)
        .output()
        .expect("run cli");
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let (g, _) = synthetic::planted_partition(&synthetic::PlantedSpec::default(), 5);
    let tmp = tempfile::tempdir().unwrap();
    let (e, n) = write_inputs(&g, tmp.path());
    let (e, n) = (e.to_str().unwrap(), n.to_str().unwrap());
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let out_s = out.to_str().unwrap();
        let common = ["--edges", e, "--nodes", n, "--out", out_s, "--focus-class", "motor", "--seed", "11"];
        let mut spectrum = vec!["spectrum"];
        spectrum.extend(common);
        spectrum.extend(["--bandwidth", "20,68"]);
        run_cli(&spectrum);
        let mut sweep = vec!["sweep"];
        sweep.extend(common);
        run_cli(&sweep);
        let trajectory = out.join("trajectory.json");
        let mut cluster = vec!["cluster"];
        cluster.extend(common);
        cluster.extend(["--trajectory", trajectory.to_str().unwrap()]);
        run_cli(&cluster);
        runs.push(snapshot(&out));
    }
    let same = runs[0] == runs[1];
    Outcome::check(
        same && runs[0].len() >= 12,
        format!("spectrum, sweep, cluster run twice: {} files, identical: {same}", runs[0].len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("full-bandwidth concentration degeneracy", criterion_1),
        ("embedded-distance nullspace", criterion_2),
        ("guided spectrum bounds", criterion_3),
        ("M = I reversion", criterion_4),
        ("Taylor machinery", criterion_5),
        ("closed-form approximations", criterion_6),
        ("path reweighting", criterion_7),
        ("Procrustes", criterion_8),
        ("clustering pipeline", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!(
            "criterion {:>2} {tag} [{name}] ({:.1}s): {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
