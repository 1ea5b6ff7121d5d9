//! Error type shared by all geometry operations.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("not collinear")]
    NotCollinear,
    #[error("degenerate chord")]
    DegenerateChord,
    #[error("point in kernel")]
    PointInKernel,
    #[error("rank zero")]
    RankZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not interior")]
    NotInterior,
    #[error("point is not on the boundary")]
    NotBoundary,
    #[error("descriptor is not a face of this domain")]
    NotAFace,
    #[error("supports not disjoint")]
    SupportsNotDisjoint,
    #[error("Hilbert metric undefined: domain is not properly convex")]
    NotProperlyConvex,
    #[error("foliation hypothesis violated: {0}")]
    FoliationViolated(String),
    #[error("generator {index} does not preserve the domain (witness point {witness:?})")]
    PreservationFailure { index: usize, witness: Vec<f64> },
    #[error("domain has empty interior")]
    EmptyInterior,
    #[error("degenerate input: affine span has dimension {dim}, expected {expected}")]
    DegenerateSpan { dim: usize, expected: usize },
    #[error("unsupported operation for this representation: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
