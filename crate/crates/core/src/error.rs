use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("unexpected Betti table:\n{0}")]
    BettiShape(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("rejected at stage {stage}: {reason}")]
    Rejected { stage: String, reason: String },
    #[error("not a complex: {0}")]
    NotComplex(String),
    #[error("computation budget exhausted: {0}")]
    Budget(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
