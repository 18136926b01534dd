use thiserror::Error;

/// Errors raised by graph construction, queries and the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cycle detected: {}", .cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },

    #[error("self-loop on node `{node}`")]
    SelfLoop { node: String },

    #[error("duplicate edge `{tail} -> {head}`")]
    DuplicateEdge { tail: String, head: String },

    #[error("edge endpoint `{name}` is not a declared node")]
    UnknownEndpoint { name: String },

    #[error("node `{name}` declared twice")]
    DuplicateNode { name: String },

    #[error("invalid node name `{name}`")]
    InvalidName { name: String },

    #[error("unknown node `{name}`")]
    UnknownNode { name: String },

    #[error("node index {index} is outside a graph of {node_count} nodes")]
    ForeignNode { index: usize, node_count: usize },

    #[error("the start set J must not be empty")]
    EmptyStartSet,

    #[error("the target set K must not be empty")]
    EmptyTargetSet,

    #[error("sets {first} and {second} overlap")]
    OverlappingSets { first: &'static str, second: &'static str },

    #[error("links {first} and {second} are not adjacent")]
    NonAdjacentPair { first: usize, second: usize },

    #[error("malformed trail: {reason}")]
    MalformedTrail { reason: String },

    #[error("trail endpoint {index} lies in the conditioning set")]
    EndpointInConditioningSet { index: usize },

    #[error("oracle refuses {what}: {actual} exceeds the limit of {limit}")]
    OracleScaleExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("invalid network: {reason}")]
    InvalidNetwork { reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
