use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite log-likelihood contribution at row {row}: {detail}")]
    NumericalRow { row: usize, detail: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("{block} block is singular: {detail}")]
    Singular { block: String, detail: String },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("ingestion error in column `{column}`: {message} (rows {rows:?})")]
    Ingestion {
        column: String,
        message: String,
        rows: Vec<usize>,
    },

    #[error("parse error at row {row}, column `{column}`: {detail}")]
    Parse {
        row: usize,
        column: String,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sampler error: {0}")]
    Sampler(String),

    #[error("chain aborted at iteration {iteration}: {source}")]
    Aborted {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("diagnostics error: {0}")]
    Diagnostics(String),

    #[error("chain file error: {0}")]
    ChainFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by the numbers rather than by inputs or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalRow { .. } | Error::Numerical(_) | Error::Sampler(_) | Error::Aborted { .. }
        )
    }
}
