use thiserror::Error;

/// Errors raised by graph construction, oracles and constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("anti-parallel pair ({0}, {1}) violates orientation")]
    AntiParallel(usize, usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),

    #[error("vertex {0} appears in both the free set and the ordered set")]
    Overlap(usize),

    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("{what}: instance of size {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no vertex meets the in/out-degree threshold (independence bound too small)")]
    NotFound,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
