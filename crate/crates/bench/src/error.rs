use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{method}/{rule} at k = {k}: {source}")]
    Run {
        method: String,
        rule: String,
        k: u32,
        #[source]
        source: spinmagnus::Error,
    },

    #[error("slope fit needs at least 3 usable rows, got {usable}")]
    TooFewRows { usable: usize },

    #[error(transparent)]
    Core(#[from] spinmagnus::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
