use thiserror::Error;

/// Errors raised by the nomination pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dissimilarity matrix is empty")]
    EmptyMatrix,

    #[error("non-finite dissimilarity at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("dissimilarity matrix needs at least 2 rows and 1 column, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },

    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("row index {index} out of range for {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },

    #[error("supervision set S is empty")]
    EmptySupervision,

    #[error("candidate set C is empty: every row is in S")]
    EmptyCandidates,

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("subset for reciprocal rank is empty")]
    EmptySubset,

    #[error("vertex {vertex} has zero degree")]
    ZeroRowSum { vertex: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("latent positions give inner product {value} outside [0, 1] for rows ({i}, {j})")]
    InvalidLatents { i: usize, j: usize, value: f64 },

    #[error("no nonzero differences")]
    NoNonzeroDifferences,

    #[error("signed rank test needs at least {min} nonzero differences, got {found}")]
    TooFewDifferences { min: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("solver reported {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
