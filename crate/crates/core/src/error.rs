use thiserror::Error;

/// Errors produced by the graph, graphon and experiment routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),

    #[error("edge ({i}, {j}) given twice with conflicting weights {first} and {second}")]
    ConflictingEdge {
        i: usize,
        j: usize,
        first: f64,
        second: f64,
    },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("value {value} outside the declared range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("argument {0} outside [0, 1]")]
    ArgumentOutsideUnitInterval(f64),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("eigensolver did not converge within {cap} iterations on a {n}x{n} matrix")]
    NoConvergence { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("incommensurable partitions: {a} and {b} blocks")]
    Incommensurable { a: usize, b: usize },

    #[error("kernel takes negative values; {0} requires a [0, 1]-valued graphon")]
    SignedKernel(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
