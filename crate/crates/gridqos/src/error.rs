use thiserror::Error;

/// Errors shared across the market, routing and benchmark modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A load/price curve violated a structural invariant.
    #[error("invalid price curve: {0}")]
    InvalidCurve(String),

    /// A search grid was empty.
    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),

    /// An outage-probability grid entry exceeded the 0.1 upper bound.
    #[error("outage grid entry {value} exceeds the 0.1 bound")]
    OutageGridBound { value: f64 },

    /// Index out of range.
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// A network violated a structural invariant.
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// A constraint vector violated a structural invariant.
    #[error("invalid constraint vector: {0}")]
    InvalidConstraints(String),

    /// Constraint arity does not match the network's metric count.
    #[error("constraint vector has {constraints} entries but the network has {metrics} metrics")]
    MetricArityMismatch { constraints: usize, metrics: usize },

    /// A parse failure, with the 1-based line it occurred on.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A path failed validation against its network.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// Exhaustive path enumeration refused an instance above the node limit.
    #[error("network has {nodes} nodes, above the exact-enumeration limit of {limit} (raise the limit to force)")]
    ExactSizeGuard { nodes: usize, limit: usize },

    /// A benchmark configuration was not realizable.
    #[error("invalid benchmark config: {0}")]
    InvalidBenchConfig(String),

    /// The requested target is not reachable from the source.
    #[error("target node {to} is unreachable from source {from}")]
    UnreachableTarget { from: usize, to: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
