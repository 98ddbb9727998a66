use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("expectation value has imaginary residue {0:e}")]
    NonrealExpectation(f64),
    #[error("eigensolver did not converge")]
    EigensolverFailure,
    #[error("energy uncertainty must be positive, got {0}")]
    NonpositiveDeltaE(f64),
    #[error("invalid spin count: {0}")]
    BadN(String),
    #[error("time {t} outside validity window [0, {end}]")]
    OutOfValidityWindow { t: f64, end: f64 },
    #[error("first moment of the orthogonal component vanishes: equality unreachable")]
    ZeroFirstMoment,
    #[error("ratio denominator is degenerate (root argument {0:e})")]
    DegenerateDenominator(f64),
    #[error("energy uncertainty of the initial state vanishes (stationary state)")]
    ZeroDeltaE,
    #[error("time grid must start at 0 and be strictly ascending")]
    GridNotAscending,
    #[error("drift never overtakes spreading: no crossing")]
    NoCrossing,
    #[error("initial state is not an eigenstate of the observable (dQ(0) = {0:e})")]
    NotEigenstateStart(f64),
    #[error("grid too coarse: {points} points, need at least {required}")]
    GridTooCoarse { points: usize, required: usize },
    #[error("random draw degenerate after {0} attempts")]
    DegenerateDraw(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
