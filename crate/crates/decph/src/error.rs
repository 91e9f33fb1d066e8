use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("space mismatch: expected {expected}, got {got}")]
    SpaceMismatch { expected: String, got: String },

    #[error("degree {degree} out of range for a {dim}-dimensional complex")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("mesh is not well-centered: {0}")]
    NotWellCentered(String),

    #[error("mesh validation failed: {0}")]
    InvalidMesh(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, DecError>;
