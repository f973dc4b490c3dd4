use crate::graph::NodeId;
use crate::rational::Rational;
use crate::source::AxiomFailure;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("graph has no source nodes besides the sink")]
    NoSources,
    #[error("graph has {0} source nodes; at most {max} are supported", max = crate::graph::MAX_SOURCES)]
    TooManySources(usize),
    #[error("duplicate node name {0:?}")]
    DuplicateNode(String),
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("duplicate edge ({0}, {1}); merge parallel links by adding capacities")]
    DuplicateEdge(String, String),
    #[error("negative capacity {capacity} on edge ({tail}, {head})")]
    NegativeCapacity {
        tail: String,
        head: String,
        capacity: Rational,
    },
    #[error("underlying undirected graph is not connected (node {0} unreachable)")]
    Disconnected(String),
    #[error("ground set of {size} elements exceeds the brute-force limit of {limit}")]
    GroundSetTooLarge { size: usize, limit: usize },
    #[error("dimension mismatch: expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("source position {0} is both included and excluded")]
    IncludedAndExcluded(usize),
    #[error("exchange capacity needs two distinct nodes (got {0} twice)")]
    SameNode(usize),
    #[error("rate vector lies outside the source polyhedron")]
    OutsidePolyhedron,
    #[error("starting flow is infeasible: {0}")]
    InfeasibleFlow(String),
    #[error("augmentation of {beta} exceeds capacity {capacity} of arc ({tail:?}, {head:?})")]
    ArcCapacityExceeded {
        tail: NodeId,
        head: NodeId,
        beta: Rational,
        capacity: Rational,
    },
    #[error("malformed augmenting path: {0}")]
    MalformedPath(String),
    #[error("instance is not integral: {0}")]
    NotIntegral(String),
    #[error("entropy oracle violates its axioms: {0}")]
    OracleAxiom(AxiomFailure),
    #[error("bit-sharing model is invalid: {0}")]
    InvalidModel(String),
    #[error("solver exceeded the safety limit of {0} iterations")]
    IterationLimit(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
