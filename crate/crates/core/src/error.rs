use thiserror::Error;

/// Errors raised by map construction, evaluation and verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate in point")]
    NonFinite,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("sphere of radius {radius} misses the target set (section empty)")]
    EmptySection { radius: f64 },
    #[error("path lifting needs refinement near path parameter {param}: {reason}")]
    RefinementRequired { param: f64, reason: String },
    #[error("path passes through the branch image at path parameter {param}")]
    BranchImage { param: f64 },
    #[error("unsupported scope: {0}")]
    Unsupported(String),
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {message}")]
    Csv { path: String, message: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
