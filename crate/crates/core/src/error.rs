use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("degenerate data: column {column} has zero sample variance")]
    DegenerateColumn { column: usize },

    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: &'static str, reason: String },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("capability limit: {0}")]
    Capability(String),

    #[error("prior elicitation failed: {0}")]
    Elicitation(String),

    #[error("scenario generation failed: {0}")]
    Generation(String),

    #[error("initialization error: {0}")]
    Initialization(String),

    #[error("sampler failed at iteration {iteration}, column {column}: {source}")]
    Sweep {
        iteration: usize,
        column: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}
