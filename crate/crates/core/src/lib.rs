//! Guided spectral embedding of graphs.
//!
//! Nodes of a graph get a cooperation weight in `[0, 1]`. The library builds
//! Slepian-type bases that trade graph smoothness against concentration on the
//! weighted nodes, embeds the graph in two of those basis vectors, and follows
//! the embedding as the off-focus weight is swept towards zero.
//!
//! Modules, bottom up:
//!
//! * [`graph`]: loading multi-layer edge lists, merging layers, normalization.
//! * [`spectral`]: symmetric eigendecomposition, graph Fourier transform,
//!   Laplacian square roots (exact and Taylor), remainder bounds.
//! * [`slepian`]: the concentration, embedded-distance and guided criteria.
//! * [`embedding`]: 2-D embeddings, Procrustes alignment, trajectory sweeps.
//! * [`analysis`]: k-means, silhouettes, modularity and its permutation test.
//! * [`io`] and [`pipeline`]: file formats and the `spectrum`, `sweep` and
//!   `cluster` commands.
//! * [`synthetic`]: generators for small test graphs.
//!
//! ```
//! use guided_spectral::{graph::normalize, synthetic};
//!
//! let ops = normalize(&synthetic::path(3)).unwrap();
//! let sum = ops.laplacian() + ops.adjacency();
//! assert!((sum - nalgebra::DMatrix::<f64>::identity(3, 3)).norm() < 1e-15);
//! ```

pub mod analysis;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod slepian;
pub mod spectral;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::{load_graph, normalize, Graph, LoadOptions, MergeRule, NormalizedOperators};
pub use slepian::{Bandwidth, CooperationWeights, CriterionKind, SlepianSet};
pub use spectral::{eig_sym, SortOrder, SpectralBasis};
