//! Small synthetic graphs for tests, examples and demos.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{is_connected, EdgeRecord, Graph, NodeRecord};

fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
    let mut w = DMatrix::zeros(n, n);
    for (i, j) in edges {
        w[(i, j)] = 1.0;
        w[(j, i)] = 1.0;
    }
    Graph::from_weights(w).expect("generated graphs are valid")
}

pub fn path(n: usize) -> Graph {
    from_edges(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete(n: usize) -> Graph {
    from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// Two `k`-cliques joined by the edge `(k-1, k)`.
pub fn barbell(k: usize) -> Graph {
    let clique = move |off: usize| (0..k).flat_map(move |i| (i + 1..k).map(move |j| (off + i, off + j)));
    from_edges(2 * k, clique(0).chain(clique(k)).chain([(k - 1, k)]))
}

pub fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    from_edges(n, edges)
}

/// Erdős–Rényi graph conditioned on being connected (rejection sampling).
pub fn connected_erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    loop {
        let g = erdos_renyi(n, p, rng);
        if is_connected(&g) {
            return g;
        }
    }
}

/// Every unweighted connected graph on `n` nodes, by exhaustive enumeration
/// of edge subsets. Practical for `n <= 5` (1024 subsets).
pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    assert!(pairs.len() < 20, "enumeration is exponential in the pair count");
    (0u32..1 << pairs.len())
        .map(|mask| {
            from_edges(
                n,
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &e)| e),
            )
        })
        .filter(is_connected)
        .collect()
}

/// Layout of a planted-partition graph with classed nodes.
#[derive(Debug, Clone)]
pub struct PlantedSpec {
    /// `(class name, sizes of its planted groups)`.
    pub classes: Vec<(String, Vec<usize>)>,
    pub p_within_group: f64,
    pub p_within_class: f64,
    pub p_between_classes: f64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        Self {
            classes: vec![
                ("sensory".into(), vec![8, 8, 8]),
                ("inter".into(), vec![10, 10]),
                ("motor".into(), vec![12, 12]),
            ],
            p_within_group: 0.7,
            p_within_class: 0.05,
            p_between_classes: 0.03,
        }
    }
}

/// A connected planted-partition graph. Returns the graph with labels like
/// `sensory_g1_03` and the planted group of every node.
pub fn planted_partition(spec: &PlantedSpec, seed: u64) -> (Graph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::new();
    let mut classes = Vec::new();
    let mut group = Vec::new();
    let mut class_of = Vec::new();
    let mut g = 0;
    for (c, (name, sizes)) in spec.classes.iter().enumerate() {
        for &size in sizes {
            for k in 0..size {
                labels.push(format!("{name}_g{}_{k:02}", g + 1));
                classes.push(name.clone());
                group.push(g);
                class_of.push(c);
            }
            g += 1;
        }
    }
    let n = labels.len();
    loop {
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let p = if group[i] == group[j] {
                    spec.p_within_group
                } else if class_of[i] == class_of[j] {
                    spec.p_within_class
                } else {
                    spec.p_between_classes
                };
                if rng.gen_bool(p) {
                    w[(i, j)] = 1.0;
                    w[(j, i)] = 1.0;
                }
            }
        }
        let graph = Graph::from_parts(w, labels.clone(), classes.clone()).expect("valid");
        if is_connected(&graph) {
            return (graph, group);
        }
    }
}

/// Edge and node records for a graph, for writing CSV inputs. Edges are
/// tagged with `layer`.
pub fn to_records(g: &Graph, layer: &str) -> (Vec<EdgeRecord>, Vec<NodeRecord>) {
    let n = g.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = g.weights()[(i, j)];
            if w > 0.0 {
                edges.push(EdgeRecord::new(i, j, w, layer));
            }
        }
    }
    let nodes = (0..n)
        .map(|i| NodeRecord::new(i, g.labels()[i].clone(), g.classes()[i].clone()))
        .collect();
    (edges, nodes)
}
