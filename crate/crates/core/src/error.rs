use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("entry count {len} does not match a {rows}x{cols} matrix")]
    EntryCount { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("diagonal scaling entry {index} is not strictly positive")]
    NonPositiveDiagonal { index: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix has rank {rank}; the rank<=2 factorizer needs rank at most 2")]
    RankTooHigh { rank: usize },

    #[error("matrix has rank {rank}; the exact rank-three method needs rank exactly 3")]
    RankNotThree { rank: usize },

    #[error("inner point {index} lies outside the outer region")]
    InnerNotContained { index: usize },

    #[error("outer region is unbounded")]
    UnboundedOuter,

    #[error("inner points are collinear or coincident")]
    DegenerateInner,

    #[error("boundary point has no nonnegative preimage (the image cone needs c > sqrt(a^2 + b^2) strictly)")]
    BoundaryPoint,

    #[error("point lies outside the ice-cream cone")]
    OutsidePoint,

    #[error("radius {r} is not in the admissible interval ({lower}, 1)")]
    RadiusOutOfRange { r: f64, lower: f64 },

    #[error("witness failed verification: {0}")]
    WitnessRejected(String),
}

pub type Result<T> = core::result::Result<T, Error>;
