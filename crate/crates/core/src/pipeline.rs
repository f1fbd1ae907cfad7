//! File-based pipeline behind the CLI: `spectrum`, `sweep` and `cluster`.
//!
//! Each command reads the edge/node CSVs named in a [`RunConfig`], runs one
//! stage, and writes its artifacts into `out_dir`. Outputs carry a hash of the
//! configuration and of the input file contents, so identical inputs, options
//! and seed reproduce byte-identical files wherever they are run.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{permutation_test, silhouette_select, with_off_focus_group, NullModel};
use crate::embedding::{make_schedule, trajectory_sweep, Alignment, GapWarning, SweepOptions};
use crate::error::{Error, Result};
use crate::graph::{binarize, load_graph, normalize, Graph, LoadOptions};
use crate::io::{
    fmt_num, read_edge_csv, read_node_csv, round12, write_cluster_table, write_spectrum, write_table,
    Provenance, TrajectoryFile,
};
use crate::slepian::{
    concentration_slepians, embedded_distance_slepians, guided_matrix_approx, guided_matrix_exact,
    guided_slepians, Bandwidth, CooperationWeights,
};
use crate::spectral::{eig_sym, sqrt_psd_exact, SortOrder, TaylorBound};

/// Which nodes carry full cooperation weight.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusSpec {
    /// Node classes in focus (e.g. `sensory`).
    pub classes: Vec<String>,
    /// Individual nodes by label or index.
    pub nodes: Vec<String>,
}

impl FocusSpec {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn classes<I: IntoIterator<Item = S>, S: Into<String>>(classes: I) -> Self {
        Self {
            classes: classes.into_iter().map(Into::into).collect(),
            nodes: Vec::new(),
        }
    }

    /// Sorted node indices. An empty spec selects every node.
    pub fn resolve(&self, graph: &Graph) -> Result<Vec<usize>> {
        if self.classes.is_empty() && self.nodes.is_empty() {
            return Ok((0..graph.n()).collect());
        }
        let mut out = Vec::new();
        for class in &self.classes {
            let members = graph.nodes_in_class(class);
            if members.is_empty() {
                return Err(Error::UnknownClass(class.clone()));
            }
            out.extend(members);
        }
        for name in &self.nodes {
            let idx = graph
                .labels()
                .iter()
                .position(|l| l == name)
                .or_else(|| name.parse::<usize>().ok().filter(|&i| i < graph.n()))
                .ok_or_else(|| Error::UnknownNode(name.clone()))?;
            out.push(idx);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub edges: PathBuf,
    pub nodes: PathBuf,
    pub load: LoadOptions,
    pub drop_isolated: bool,
    pub focus: FocusSpec,
    pub steps: usize,
    pub start: f64,
    pub end: f64,
    pub eigvecs: (usize, usize),
    pub approx_order: Option<usize>,
    pub alignment: Alignment,
    /// Bandwidths for the mu/xi spectra; empty means full bandwidth only.
    pub bandwidths: Vec<usize>,
    /// Taylor orders for the approximated zeta spectra.
    pub orders: Vec<usize>,
    pub seed: Option<u64>,
    pub k_min: usize,
    pub k_max: usize,
    pub repetitions: usize,
    pub draws: usize,
    pub null_model: NullModel,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(edges: impl Into<PathBuf>, nodes: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            edges: edges.into(),
            nodes: nodes.into(),
            load: LoadOptions::default(),
            drop_isolated: false,
            focus: FocusSpec::all(),
            // 1 -> 0.5 and 0.5 -> 0 in 11 steps each, sharing the midpoint
            steps: 21,
            start: 1.0,
            end: 0.0,
            eigvecs: (2, 3),
            approx_order: None,
            alignment: Alignment::Chained,
            bandwidths: Vec::new(),
            orders: vec![1, 2, 5, 10, 20],
            seed: None,
            k_min: 2,
            k_max: 10,
            repetitions: 20,
            draws: 999,
            null_model: NullModel::Permute,
            out_dir: out_dir.into(),
        }
    }

    /// SHA-256 over the option values (paths excluded) and the bytes of both
    /// input files, hex encoded and shortened to 16 characters.
    pub fn hash(&self) -> Result<String> {
        let mut hashed = self.clone();
        hashed.edges = PathBuf::new();
        hashed.nodes = PathBuf::new();
        hashed.out_dir = PathBuf::new();
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&hashed)?);
        h.update(std::fs::read(&self.edges)?);
        h.update(std::fs::read(&self.nodes)?);
        Ok(hex::encode(h.finalize())[..16].to_string())
    }

    pub fn provenance(&self) -> Result<Provenance> {
        Ok(Provenance {
            config_hash: self.hash()?,
            seed: self.seed,
        })
    }

    fn check_inputs(&self) -> Result<()> {
        for p in [&self.edges, &self.nodes] {
            if !p.is_file() {
                return Err(Error::Config(format!("input file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    fn out(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }
}

/// Loads the configured graph (optionally without isolated nodes).
pub fn prepare_graph(config: &RunConfig) -> Result<Graph> {
    config.check_inputs()?;
    let edges = read_edge_csv(&config.edges)?;
    let nodes = read_node_csv(&config.nodes)?;
    let graph = load_graph(&edges, &nodes, &config.load)?;
    Ok(if config.drop_isolated {
        graph.drop_isolated().0
    } else {
        graph
    })
}

/// Writes `mu_W{W}.csv` and `xi_W{W}.csv` per bandwidth, `zeta.csv` with the
/// companion concentration and embedded distance, `zeta_K{K}.csv` per Taylor
/// order, and `taylor_bounds.csv`. The focus set is the selection (cooperation
/// 1, all other nodes 0).
pub fn cmd_spectrum(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let graph = prepare_graph(config)?;
    let prov = config.provenance()?;
    let n = graph.n();
    let ops = normalize(&graph)?;
    let basis = eig_sym(ops.laplacian(), SortOrder::Ascending)?;
    let half = sqrt_psd_exact(ops.laplacian())?;
    let selection = CooperationWeights::selection(n, &config.focus.resolve(&graph)?)?;

    let mut written = Vec::new();
    let bandwidths = if config.bandwidths.is_empty() {
        vec![n]
    } else {
        config.bandwidths.clone()
    };
    for &w in &bandwidths {
        let band = Bandwidth::new(w, n)?;
        let mu = concentration_slepians(&basis, &selection, band)?;
        let path = config.out(&format!("mu_W{w}.csv"))?;
        write_spectrum(&path, &prov, &mu.values)?;
        written.push(path);
        let xi = embedded_distance_slepians(&basis, &half, &selection, band)?;
        let path = config.out(&format!("xi_W{w}.csv"))?;
        write_spectrum(&path, &prov, &xi.values)?;
        written.push(path);
    }

    let exact = guided_matrix_exact(&selection, &half)?;
    let zeta = guided_slepians(&exact, &selection, &half)?;
    let path = config.out("zeta.csv")?;
    let mu = zeta.companion_mu.as_deref().unwrap_or_default();
    let xi = zeta.companion_xi.as_deref().unwrap_or_default();
    write_table(
        &path,
        &prov,
        &["index", "zeta", "companion_mu", "companion_xi"],
        (0..zeta.len()).map(|k| {
            vec![
                (k + 1).to_string(),
                fmt_num(zeta.values[k]),
                fmt_num(mu[k]),
                fmt_num(xi[k]),
            ]
        }),
    )?;
    written.push(path);

    let lambdas: Vec<f64> = basis.values.iter().map(|v| v.clamp(0.0, 2.0)).collect();
    let mut bound_rows = Vec::new();
    for &k in &config.orders {
        let approx = guided_matrix_approx(&selection, ops.adjacency(), k)?;
        let set = guided_slepians(&approx, &selection, &half)?;
        let path = config.out(&format!("zeta_K{k}.csv"))?;
        write_spectrum(&path, &prov, &set.values)?;
        written.push(path);
        let bound = TaylorBound::compute(k, &lambdas, selection.as_slice())?;
        bound_rows.push(vec![
            k.to_string(),
            fmt_num(bound.d_k),
            fmt_num(bound.d_km),
            fmt_num((&approx - &exact).norm()),
        ]);
    }
    if !config.orders.is_empty() {
        let path = config.out("taylor_bounds.csv")?;
        write_table(&path, &prov, &["order", "d_k", "d_km", "criterion_distance"], bound_rows)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<GapWarning>,
}

/// Writes `trajectory.json` and the flattened `trajectory.csv`.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepOutput> {
    let graph = prepare_graph(config)?;
    let prov = config.provenance()?;
    let ops = normalize(&graph)?;
    let focus = config.focus.resolve(&graph)?;
    let schedule = make_schedule(graph.n(), &focus, config.steps, config.start, config.end)?;
    let options = SweepOptions {
        indices: config.eigvecs,
        approx_order: config.approx_order,
        alignment: config.alignment,
    };
    let trajectory = trajectory_sweep(&ops, &schedule, &options)?;
    let file = TrajectoryFile::from_trajectory(
        &trajectory,
        &graph,
        &schedule.focus,
        &schedule.off_focus,
        config.approx_order,
        config.alignment,
        &prov,
    );
    let json = config.out("trajectory.json")?;
    file.write(&json)?;
    let csv = config.out("trajectory.csv")?;
    file.write_flat_csv(&csv, &prov)?;
    Ok(SweepOutput {
        files: vec![json, csv],
        warnings: trajectory.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityReport {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub k: usize,
    /// Focus clusters plus the off-focus group.
    pub groups: usize,
    pub q_observed: f64,
    pub p_value: f64,
    pub draws: usize,
    pub null_model: NullModel,
    pub null_samples: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub files: Vec<PathBuf>,
    pub report: ModularityReport,
}

/// Clusters the focus nodes of a trajectory's final frame and tests the
/// clustering against shuffled assignments. Writes `clusters.csv`,
/// `silhouette.csv`, `silhouette_scores.csv` and `modularity.json`.
pub fn cmd_cluster(config: &RunConfig, trajectory_path: &Path) -> Result<ClusterOutput> {
    let seed = config
        .seed
        .ok_or_else(|| Error::Config("--seed is required for clustering".into()))?;
    let graph = prepare_graph(config)?;
    let prov = config.provenance()?;
    let traj = TrajectoryFile::read(trajectory_path)?;
    if traj.n != graph.n() {
        return Err(Error::Config(format!(
            "trajectory has {} nodes but the graph has {}",
            traj.n,
            graph.n()
        )));
    }
    let focus = traj.focus.clone();
    let frame = traj.final_frame();
    let points = DMatrix::from_fn(focus.len(), 2, |r, c| frame[focus[r]][c]);

    let k_max = config.k_max.min(focus.len().saturating_sub(1));
    let selection = silhouette_select(&points, config.k_min, k_max, config.repetitions, seed)?;
    let k = selection.k;

    let clusters: Vec<Vec<String>> = selection
        .assignment
        .members()
        .into_iter()
        .map(|m| m.into_iter().map(|r| graph.labels()[focus[r]].clone()).collect())
        .collect();
    let table = config.out("clusters.csv")?;
    write_cluster_table(&table, &prov, &clusters)?;

    let sil = config.out("silhouette.csv")?;
    write_table(
        &sil,
        &prov,
        &["node", "label", "cluster", "silhouette"],
        focus.iter().enumerate().map(|(r, &node)| {
            vec![
                node.to_string(),
                graph.labels()[node].clone(),
                (selection.assignment.labels[r] + 1).to_string(),
                fmt_num(selection.silhouettes[r]),
            ]
        }),
    )?;
    let scores = config.out("silhouette_scores.csv")?;
    write_table(
        &scores,
        &prov,
        &["k", "negatives", "mean_silhouette"],
        selection
            .scores
            .iter()
            .map(|s| vec![s.k.to_string(), s.negatives.to_string(), fmt_num(s.mean_silhouette)]),
    )?;

    let labels = with_off_focus_group(graph.n(), &focus, &selection.assignment.labels, k)?;
    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let expected = if focus.len() < graph.n() { k + 1 } else { k };
    debug_assert_eq!(distinct.len(), expected);

    let adjacency = binarize(&graph).weights().clone();
    let test = permutation_test(&adjacency, &labels, config.draws, seed, config.null_model)?;
    let report = ModularityReport {
        config_hash: prov.config_hash.clone(),
        seed: Some(seed),
        k,
        groups: distinct.len(),
        q_observed: round12(test.q_observed),
        p_value: round12(test.p_value),
        draws: config.draws,
        null_model: config.null_model,
        null_samples: test.null_samples.iter().map(|&q| round12(q)).collect(),
    };
    let json = config.out("modularity.json")?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&json, text)?;

    Ok(ClusterOutput {
        files: vec![table, sil, scores, json],
        report,
    })
}
