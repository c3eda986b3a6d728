use thiserror::Error;

/// Errors raised by the solvers, the crossbar simulator and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular: pivot {pivot_index} fell below the relative threshold")]
    SingularMatrix { pivot_index: usize },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid conductance range: g_min {g_min:e} must be below g_max {g_max:e}")]
    InvalidRange { g_min: f64, g_max: f64 },

    #[error("cannot program negative coefficient at ({row}, {col}); eliminate negatives first")]
    NegativeEntry { row: usize, col: usize },

    #[error("equality matrix is rank deficient (eigenvalue ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("power iterate collapsed to zero (start vector in the null space)")]
    ZeroIterate,

    #[error("power iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("Gram-Schmidt input {index} is linearly dependent on its predecessors")]
    DependentInput { index: usize },

    #[error("at least two samples are required, got {samples}")]
    TooFewSamples { samples: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unexpected data shape: expected {expected}, found {found}")]
    WrongShape { expected: String, found: String },

    #[error("problem generation failed after {attempts} attempts")]
    GenerationFailure { attempts: usize },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
