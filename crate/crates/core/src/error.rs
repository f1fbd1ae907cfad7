use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // graph ingestion
    #[error("edge references unknown node `{0}`")]
    UnknownNode(String),
    #[error("negative weight {weight} on edge ({source_node}, {target_node})")]
    NegativeWeight {
        source_node: String,
        target_node: String,
        weight: f64,
    },
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("node {0} has degree zero; drop isolated nodes before normalizing")]
    IsolatedNode(usize),
    #[error("unknown node class `{0}`")]
    UnknownClass(String),

    // linear algebra
    #[error("degree of node {0} overflows")]
    DegreeOverflow(usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("spectral radius {0} exceeds 1")]
    SpectralRadiusExceeded(f64),
    #[error("eigenvalue {0} outside [0, 2]")]
    EigenvalueOutOfRange(f64),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spectral basis must be sorted in ascending order")]
    UnsortedBasis,

    // criteria
    #[error("cooperation weight {value} at node {index} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },
    #[error("selection must be binary, found {value} at node {index}")]
    NonBinarySelection { index: usize, value: f64 },
    #[error("bandwidth {bandwidth} outside [1, {n}]")]
    BandwidthOutOfRange { bandwidth: usize, n: usize },
    #[error("degeneracy check requires a full-bandwidth mu or xi set")]
    UnsupportedDegeneracyCheck,

    // embedding
    #[error("focus set is empty")]
    EmptyFocus,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("Procrustes target has rank zero")]
    DegenerateTarget,

    // analysis
    #[error("cannot form {k} clusters from {n} points")]
    TooManyClusters { k: usize, n: usize },
    #[error("invalid k range [{min}, {max}] for {n} points")]
    InvalidKRange { min: usize, max: usize, n: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("adjacency must be symmetric, binary and loop-free")]
    NotBinaryAdjacency,

    // plumbing
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures map to exit code 3 in the CLI; everything else is a
    /// configuration or validation problem (exit code 2).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegreeOverflow(_)
                | Error::NotSymmetric(_)
                | Error::NotPsd(_)
                | Error::SpectralRadiusExceeded(_)
                | Error::EigenvalueOutOfRange(_)
                | Error::DegenerateTarget
                | Error::EmptyGraph
        )
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }
}
