use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown class: {0}")]
    UnknownClass(String),

    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),

    #[error("malformed XML at line {line}, column {column}: {message}")]
    MalformedXml {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed mapping file at line {line}: {message}")]
    MappingFormat { line: usize, message: String },

    #[error("infeasible sampling plan for ({src}, {tgt}): {requested} negatives requested but only {available} valid classes")]
    InfeasiblePlan {
        src: String,
        tgt: String,
        requested: usize,
        available: usize,
    },

    #[error("empty reference set")]
    EmptyReferences,

    #[error("no evaluable records")]
    NoEvaluableRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
