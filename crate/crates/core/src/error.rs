use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),
    #[error("operation requires a strictly convex norm on the plane")]
    NonStrictNorm,
    #[error("sites are collinear")]
    CollinearSites,
    #[error("site index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("point set does not have integer distances (worst deviation {worst})")]
    NotIntegerDistanceSet { worst: f64 },
    #[error("{a}^2 + {b}^2 != {c}^2")]
    NotPythagorean { a: u64, b: u64, c: u64 },
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("lines ({}, {}) and ({}, {}) have the same slope", .first.0, .first.1, .second.0, .second.1)]
    SlopeCollision {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("lattice basis is degenerate (determinant {0})")]
    DegenerateLattice(f64),
    #[error("cone radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("Euler genus must be non-negative, got {0}")]
    NegativeGenus(i64),
    #[error("operation is not supported on this distance field")]
    UnsupportedField,
    #[error("found {found} triple points, more than the cap of {cap}")]
    CapExceeded { found: usize, cap: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
