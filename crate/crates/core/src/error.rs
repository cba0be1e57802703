use thiserror::Error;

/// Errors produced by the quadrature engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("invalid generator: entry {index} is {value} (must be non-negative)")]
    InvalidGenerator { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cardinality overflows 64-bit integer arithmetic")]
    CardinalityOverflow,

    #[error("fully symmetric set too large: {size} points exceeds cap {cap}")]
    SetTooLarge { size: u64, cap: u64 },

    #[error("node count {count} exceeds cap {cap}")]
    TooManyNodes { count: u64, cap: u64 },

    #[error("non-finite evaluation {value} at point {point:?}")]
    NonFiniteEvaluation { point: Vec<f64>, value: f64 },

    #[error("duplicate generator at position {index}")]
    DuplicateGenerator { index: usize },

    #[error("empty node set")]
    EmptyNodeSet,

    #[error("singular system: pivot {pivot_index} is {pivot:e}")]
    SingularSystem { pivot_index: usize, pivot: f64 },

    #[error("no closed-form kernel mean for {0}")]
    NoClosedForm(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("root finding did not converge for Hermite polynomial of degree {degree}")]
    RootFinding { degree: usize },

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("factorization failed for every candidate length-scale")]
    AllCandidatesFailed,

    #[error("node hash mismatch: rule has {expected}, values file has {got}")]
    HashMismatch { expected: String, got: String },

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

/// Broad failure class, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numerical,
    Io,
}

impl Error {
    /// Stable snake_case identifier of the variant.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Self::InvalidDimension(_) => "invalid_dimension",
            Self::InvalidGenerator { .. } => "invalid_generator",
            Self::DimensionMismatch { .. } => "dimension_mismatch",
            Self::CardinalityOverflow => "cardinality_overflow",
            Self::SetTooLarge { .. } => "set_too_large",
            Self::TooManyNodes { .. } => "too_many_nodes",
            Self::NonFiniteEvaluation { .. } => "non_finite_evaluation",
            Self::DuplicateGenerator { .. } => "duplicate_generator",
            Self::EmptyNodeSet => "empty_node_set",
            Self::SingularSystem { .. } => "singular_system",
            Self::NoClosedForm(_) => "no_closed_form",
            Self::InvalidParameter { .. } => "invalid_parameter",
            Self::RootFinding { .. } => "root_finding",
            Self::BracketFailure(_) => "bracket_failure",
            Self::AllCandidatesFailed => "all_candidates_failed",
            Self::HashMismatch { .. } => "hash_mismatch",
            Self::Serialization(_) => "serialization",
            Self::Io { .. } => "io",
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Self::NonFiniteEvaluation { .. }
            | Self::SingularSystem { .. }
            | Self::RootFinding { .. }
            | Self::BracketFailure(_)
            | Self::AllCandidatesFailed => ErrorCategory::Numerical,
            Self::Io { .. } | Self::Serialization(_) => ErrorCategory::Io,
            _ => ErrorCategory::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
