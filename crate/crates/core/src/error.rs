use thiserror::Error;

#[derive(Debug, Error)]
pub enum CamError {
    /// A numeric input outside the domain of a model or statistic.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Invalid parameter or configuration value; `path` is the dotted key.
    #[error("invalid config at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("transient did not converge: {0}")]
    Convergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CamError {
    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        CamError::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for errors caused by user-supplied configuration or input data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            CamError::Config { .. } | CamError::Parse(_) | CamError::LengthMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, CamError>;
