//! Undirected weighted graphs and their symmetric normalization.
//!
//! A [`Graph`] is built from edge and node records (see [`crate::io`] for the
//! CSV readers). Edges may carry a layer tag such as `chemical` or `gap`; the
//! loader filters layers, symmetrizes each layer by `max(w_ij, w_ji)` and then
//! merges layers with a [`MergeRule`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row of an edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    pub weight: f64,
    pub layer: String,
}

impl EdgeRecord {
    pub fn new(
        source: impl ToString,
        target: impl ToString,
        weight: f64,
        layer: impl Into<String>,
    ) -> Self {
        Self {
            source: source.to_string(),
            target: target.to_string(),
            weight,
            layer: layer.into(),
        }
    }
}

/// One row of a node table. Columns beyond `id,label,class` land in `extra`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeRecord {
    pub id: String,
    pub label: String,
    pub class: String,
    pub extra: BTreeMap<String, String>,
}

impl NodeRecord {
    pub fn new(id: impl ToString, label: impl Into<String>, class: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            label: label.into(),
            class: class.into(),
            extra: BTreeMap::new(),
        }
    }
}

/// How parallel edges from different layers combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeRule {
    /// 1 if the edge exists in any selected layer.
    #[default]
    Or,
    Max,
    Sum,
}

impl MergeRule {
    fn combine(self, acc: f64, w: f64) -> f64 {
        match self {
            MergeRule::Or => {
                if acc > 0.0 || w > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            MergeRule::Max => acc.max(w),
            MergeRule::Sum => acc + w,
        }
    }
}

impl std::str::FromStr for MergeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "or" => Ok(MergeRule::Or),
            "max" => Ok(MergeRule::Max),
            "sum" => Ok(MergeRule::Sum),
            other => Err(Error::Config(format!("unknown merge rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    /// Layers to keep; `None` keeps every layer.
    pub layers: Option<BTreeSet<String>>,
    pub merge: MergeRule,
    pub binarize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            layers: None,
            merge: MergeRule::Or,
            binarize: true,
        }
    }
}

impl LoadOptions {
    pub fn with_layers<I, S>(mut self, layers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.layers = Some(layers.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_merge(mut self, merge: MergeRule) -> Self {
        self.merge = merge;
        self
    }

    pub fn with_binarize(mut self, binarize: bool) -> Self {
        self.binarize = binarize;
        self
    }

    fn keeps(&self, layer: &str) -> bool {
        self.layers.as_ref().map_or(true, |set| set.contains(layer))
    }
}

/// Undirected, loop-free graph with non-negative weights and node metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: DMatrix<f64>,
    labels: Vec<String>,
    classes: Vec<String>,
    metadata: Vec<BTreeMap<String, String>>,
    edge_layers: BTreeMap<(usize, usize), BTreeSet<String>>,
}

impl Graph {
    /// Builds a graph from a dense weight matrix. Labels default to node
    /// indices and classes to the empty string.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_parts(weights, labels, vec![String::new(); n])
    }

    pub fn from_parts(
        weights: DMatrix<f64>,
        labels: Vec<String>,
        classes: Vec<String>,
    ) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: weights.ncols(),
            });
        }
        for len in [labels.len(), classes.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::SelfLoop(labels[i].clone()));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::NegativeWeight {
                        source_node: labels[i].clone(),
                        target_node: labels[j].clone(),
                        weight: w,
                    });
                }
                if w != weights[(j, i)] {
                    return Err(Error::NotSymmetric((w - weights[(j, i)]).abs()));
                }
            }
        }
        Ok(Self {
            weights,
            labels,
            classes,
            metadata: vec![BTreeMap::new(); n],
            edge_layers: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn metadata(&self) -> &[BTreeMap<String, String>] {
        &self.metadata
    }

    /// Layer tags of edge `{i, j}`; empty for non-edges or graphs built from a
    /// bare matrix.
    pub fn edge_layers(&self, i: usize, j: usize) -> Option<&BTreeSet<String>> {
        self.edge_layers.get(&(i.min(j), i.max(j)))
    }

    pub fn degrees(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.weights.row_iter().map(|r| r.sum()))
    }

    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.weights[(i, j)] > 0.0)
            .count()
    }

    /// Indices of nodes whose class equals `class`, in ascending order.
    pub fn nodes_in_class(&self, class: &str) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.as_str() == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// Induced subgraph on `keep` (in the given order).
    pub fn subgraph(&self, keep: &[usize]) -> Graph {
        let weights = DMatrix::from_fn(keep.len(), keep.len(), |a, b| {
            self.weights[(keep[a], keep[b])]
        });
        let mut position = HashMap::new();
        for (new, &old) in keep.iter().enumerate() {
            position.insert(old, new);
        }
        let edge_layers = self
            .edge_layers
            .iter()
            .filter_map(|(&(i, j), tags)| {
                let (a, b) = (*position.get(&i)?, *position.get(&j)?);
                Some(((a.min(b), a.max(b)), tags.clone()))
            })
            .collect();
        Graph {
            weights,
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            classes: keep.iter().map(|&i| self.classes[i].clone()).collect(),
            metadata: keep.iter().map(|&i| self.metadata[i].clone()).collect(),
            edge_layers,
        }
    }

    /// Removes degree-zero nodes. Returns the reduced graph and the original
    /// indices of the nodes that were kept.
    pub fn drop_isolated(&self) -> (Graph, Vec<usize>) {
        let degrees = self.degrees();
        let keep: Vec<usize> = (0..self.n()).filter(|&i| degrees[i] > 0.0).collect();
        (self.subgraph(&keep), keep)
    }

    /// Entrywise combination of two graphs over the same node set.
    pub fn merge(&self, other: &Graph, rule: MergeRule) -> Result<Graph> {
        if other.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        let weights = self
            .weights
            .zip_map(&other.weights, |a, b| rule.combine(a, b));
        let mut edge_layers = self.edge_layers.clone();
        for (key, tags) in &other.edge_layers {
            edge_layers
                .entry(*key)
                .or_default()
                .extend(tags.iter().cloned());
        }
        Ok(Graph {
            weights,
            labels: self.labels.clone(),
            classes: self.classes.clone(),
            metadata: self.metadata.clone(),
            edge_layers,
        })
    }
}

/// Resolves node ids to indices. Ids that are exactly `0..n` (in any order)
/// are used as indices; otherwise indices follow file order.
fn index_nodes(nodes: &[NodeRecord]) -> Result<(HashMap<String, usize>, Vec<usize>)> {
    let mut seen = HashMap::with_capacity(nodes.len());
    for (pos, node) in nodes.iter().enumerate() {
        if seen.insert(node.id.clone(), pos).is_some() {
            return Err(Error::DuplicateNode(node.id.clone()));
        }
    }
    let numeric: Option<Vec<usize>> = nodes.iter().map(|n| n.id.parse().ok()).collect();
    let order: Vec<usize> = match numeric {
        Some(ids) if ids.iter().all(|&i| i < nodes.len()) => ids,
        _ => (0..nodes.len()).collect(),
    };
    let map = nodes
        .iter()
        .zip(&order)
        .map(|(node, &idx)| (node.id.clone(), idx))
        .collect();
    Ok((map, order))
}

/// Builds a [`Graph`] from edge and node records.
///
/// Repeated records of the same directed pair within one layer accumulate;
/// each layer is then symmetrized with `max(w_ij, w_ji)` and layers are
/// combined with `options.merge`. Self-loops and negative weights are
/// rejected even on layers that the filter drops.
pub fn load_graph(
    edges: &[EdgeRecord],
    nodes: &[NodeRecord],
    options: &LoadOptions,
) -> Result<Graph> {
    let (index, order) = index_nodes(nodes)?;
    let n = nodes.len();

    let mut labels = vec![String::new(); n];
    let mut classes = vec![String::new(); n];
    let mut metadata = vec![BTreeMap::new(); n];
    for (node, &idx) in nodes.iter().zip(&order) {
        labels[idx] = node.label.clone();
        classes[idx] = node.class.clone();
        metadata[idx] = node.extra.clone();
    }

    let mut layers: BTreeMap<&str, DMatrix<f64>> = BTreeMap::new();
    for edge in edges {
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownNode(id.to_string()))
        };
        let u = lookup(&edge.source)?;
        let v = lookup(&edge.target)?;
        if !(edge.weight >= 0.0) || !edge.weight.is_finite() {
            return Err(Error::NegativeWeight {
                source_node: edge.source.clone(),
                target_node: edge.target.clone(),
                weight: edge.weight,
            });
        }
        if u == v {
            return Err(Error::SelfLoop(edge.source.clone()));
        }
        if !options.keeps(&edge.layer) {
            continue;
        }
        let m = layers
            .entry(edge.layer.as_str())
            .or_insert_with(|| DMatrix::zeros(n, n));
        m[(u, v)] += edge.weight;
    }

    let mut weights = DMatrix::<f64>::zeros(n, n);
    let mut edge_layers: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
    for (name, directed) in &layers {
        for i in 0..n {
            for j in i + 1..n {
                let w = directed[(i, j)].max(directed[(j, i)]);
                if w > 0.0 {
                    edge_layers
                        .entry((i, j))
                        .or_default()
                        .insert(name.to_string());
                }
                let merged = options.merge.combine(weights[(i, j)], w);
                weights[(i, j)] = merged;
                weights[(j, i)] = merged;
            }
        }
    }

    let graph = Graph {
        weights,
        labels,
        classes,
        metadata,
        edge_layers,
    };
    Ok(if options.binarize {
        binarize(&graph)
    } else {
        graph
    })
}

/// Sets every positive weight to 1.
pub fn binarize(g: &Graph) -> Graph {
    Graph {
        weights: g.weights.map(|w| if w > 0.0 { 1.0 } else { 0.0 }),
        ..g.clone()
    }
}

/// Maximal connected node sets under nonzero weights. Components are ordered
/// by their smallest member and members are ascending.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut component = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        component[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if g.weights[(u, v)] > 0.0 && component[v] == usize::MAX {
                    component[v] = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    connected_components(g).len() <= 1
}

/// Symmetrically normalized adjacency `A = D^{-1/2} W D^{-1/2}` and Laplacian
/// `L = I - A`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOperators {
    adjacency: DMatrix<f64>,
    laplacian: DMatrix<f64>,
    degrees: DVector<f64>,
}

impl NormalizedOperators {
    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn degrees(&self) -> &DVector<f64> {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }
}

pub fn normalize(g: &Graph) -> Result<NormalizedOperators> {
    let degrees = g.degrees();
    if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::IsolatedNode(i));
    }
    if let Some(i) = degrees.iter().position(|d| !d.is_finite()) {
        return Err(Error::DegreeOverflow(i));
    }
    let n = g.n();
    // sqrt(d_i * d_j) is symmetric in (i, j), so A is exactly symmetric.
    let adjacency = DMatrix::from_fn(n, n, |i, j| {
        let w = g.weights[(i, j)];
        if w == 0.0 {
            0.0
        } else {
            w / (degrees[i] * degrees[j]).sqrt()
        }
    });
    let laplacian = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 - adjacency[(i, j)]
        } else {
            -adjacency[(i, j)]
        }
    });
    Ok(NormalizedOperators {
        adjacency,
        laplacian,
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes(n: usize) -> Vec<NodeRecord> {
        (0..n)
            .map(|i| NodeRecord::new(i, format!("n{i}"), "x"))
            .collect()
    }

    fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let records: Vec<_> = edges
            .iter()
            .map(|&(u, v)| EdgeRecord::new(u, v, 1.0, "chemical"))
            .collect();
        load_graph(&records, &nodes(n), &LoadOptions::default()).unwrap()
    }

    #[test]
    fn single_edge_is_symmetric() {
        let g = from_edges(2, &[(0, 1)]);
        assert_eq!(g.weights()[(0, 1)], 1.0);
        assert_eq!(g.weights()[(1, 0)], 1.0);
        assert_eq!(g.edge_layers(1, 0).unwrap().len(), 1);
    }

    #[test]
    fn opposite_records_on_two_layers_merge_to_one() {
        let edges = vec![
            EdgeRecord::new(0, 1, 1.0, "chemical"),
            EdgeRecord::new(1, 0, 1.0, "gap"),
        ];
        let opts = LoadOptions::default()
            .with_layers(["chemical", "gap"])
            .with_merge(MergeRule::Max)
            .with_binarize(true);
        let g = load_graph(&edges, &nodes(2), &opts).unwrap();
        // manual merge: chem symmetrized -> 1, gap symmetrized -> 1, max -> 1
        assert_eq!(g.weights()[(0, 1)], 1.0);
        assert_eq!(g.weights()[(1, 0)], 1.0);
        let tags: Vec<_> = g.edge_layers(0, 1).unwrap().iter().cloned().collect();
        assert_eq!(tags, vec!["chemical".to_string(), "gap".to_string()]);
    }

    #[test]
    fn directed_records_symmetrize_by_max() {
        let edges = vec![
            EdgeRecord::new(0, 1, 3.0, "chemical"),
            EdgeRecord::new(1, 0, 5.0, "chemical"),
            EdgeRecord::new(1, 2, 2.0, "gap"),
        ];
        let opts = LoadOptions::default()
            .with_merge(MergeRule::Sum)
            .with_binarize(false);
        let g = load_graph(&edges, &nodes(3), &opts).unwrap();
        assert_eq!(g.weights()[(0, 1)], 5.0);
        assert_eq!(g.weights()[(2, 1)], 2.0);
    }

    #[test]
    fn layer_filter_drops_records() {
        let edges = vec![
            EdgeRecord::new(0, 1, 1.0, "chemical"),
            EdgeRecord::new(1, 2, 1.0, "gap"),
        ];
        let opts = LoadOptions::default().with_layers(["gap"]);
        let g = load_graph(&edges, &nodes(3), &opts).unwrap();
        assert_eq!(g.weights()[(0, 1)], 0.0);
        assert_eq!(g.weights()[(1, 2)], 1.0);
    }

    #[test]
    fn rejects_bad_records() {
        let err = load_graph(
            &[EdgeRecord::new(0, 0, 1.0, "chemical")],
            &nodes(2),
            &LoadOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SelfLoop(_)));

        let err = load_graph(
            &[EdgeRecord::new(0, 7, 1.0, "chemical")],
            &nodes(2),
            &LoadOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownNode(id) if id == "7"));

        let err = load_graph(
            &[EdgeRecord::new(0, 1, -1.0, "chemical")],
            &nodes(2),
            &LoadOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeWeight { .. }));
    }

    #[test]
    fn string_ids_follow_file_order() {
        let nodes = vec![
            NodeRecord::new("AVAL", "AVAL", "inter"),
            NodeRecord::new("ASEL", "ASEL", "sensory"),
        ];
        let g = load_graph(
            &[EdgeRecord::new("ASEL", "AVAL", 2.0, "chemical")],
            &nodes,
            &LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(g.labels(), &["AVAL".to_string(), "ASEL".to_string()]);
        assert_eq!(g.nodes_in_class("sensory"), vec![1]);
        assert_eq!(g.weights()[(0, 1)], 1.0);
    }

    #[test]
    fn binarize_cases() {
        let mut w = DMatrix::zeros(3, 3);
        w[(0, 1)] = 3.5;
        w[(1, 0)] = 3.5;
        let g = binarize(&Graph::from_weights(w).unwrap());
        assert_eq!(g.weights()[(0, 1)], 1.0);
        assert_eq!(g.weights()[(0, 2)], 0.0);

        let zero = Graph::from_weights(DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(binarize(&zero), zero);
    }

    #[test]
    fn components() {
        assert_eq!(
            connected_components(&from_edges(3, &[(0, 1), (1, 2)])),
            vec![vec![0, 1, 2]]
        );
        assert_eq!(
            connected_components(&from_edges(4, &[(0, 1), (2, 3)])),
            vec![vec![0, 1], vec![2, 3]]
        );
        assert_eq!(
            connected_components(&from_edges(3, &[(0, 1)])),
            vec![vec![0, 1], vec![2]]
        );
    }

    #[test]
    fn normalize_triangle_and_edge() {
        let tri = normalize(&from_edges(3, &[(0, 1), (1, 2), (0, 2)])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 0.0 } else { 0.5 };
                assert!((tri.adjacency()[(i, j)] - expected).abs() < 1e-15);
            }
        }

        let edge = normalize(&from_edges(2, &[(0, 1)])).unwrap();
        assert_eq!(
            edge.adjacency(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
        assert_eq!(
            edge.laplacian(),
            &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn laplacian_plus_adjacency_is_identity() {
        let ops = normalize(&from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)])).unwrap();
        let sum = ops.laplacian() + ops.adjacency();
        assert_eq!(sum, DMatrix::identity(4, 4));
    }

    #[test]
    fn isolated_node_is_an_error_until_dropped() {
        let g = from_edges(3, &[(0, 1)]);
        assert!(matches!(normalize(&g), Err(Error::IsolatedNode(2))));
        let (reduced, kept) = g.drop_isolated();
        assert_eq!(kept, vec![0, 1]);
        assert!(normalize(&reduced).is_ok());
    }

    #[test]
    fn overflowing_degree_is_numerical() {
        let mut w = DMatrix::zeros(3, 3);
        for (i, j) in [(0, 1), (0, 2)] {
            w[(i, j)] = f64::MAX;
            w[(j, i)] = f64::MAX;
        }
        let err = normalize(&Graph::from_weights(w).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegreeOverflow(0)));
        assert_eq!(err.exit_code(), 3);
    }
}
