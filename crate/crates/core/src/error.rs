use thiserror::Error;

/// Errors produced by geometry and protocol operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("generators do not span the ambient space (rank {rank} < dim {dim})")]
    NonGenerating { rank: usize, dim: usize },

    #[error("cone is not pointed (contains a line)")]
    Degenerate,

    #[error("zero vector offered as a generator")]
    ZeroGenerator,

    #[error("order unit does not evaluate to one on vertex {index}")]
    UnitNotOne { index: usize },

    #[error("unit functional is not strictly positive on generator {index}")]
    UnitNotStrictlyPositive { index: usize },

    #[error("vector is not in the positive cone")]
    NotInCone,

    #[error("map is not positive")]
    NotPositive,

    #[error("matrix is singular")]
    Singular,

    #[error("model unavailable on this scalar backend: {0}")]
    BackendMismatch(String),

    #[error("unsupported model for this operation: {0}")]
    UnsupportedModel(String),

    #[error("unknown model: {0}")]
    UnknownModel(String),

    #[error("group action is not transitive on the vertices")]
    NotTransitive,

    #[error("witness is not equivariant for the action")]
    NotEquivariant,

    #[error("verdict is not conclusive")]
    NotConclusive,

    #[error("range of the effect map does not match the compression range")]
    RangeMismatch,

    #[error("composed map is not proportional to the designated isomorphism")]
    NotAChannel,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
