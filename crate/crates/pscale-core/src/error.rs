//! Error type shared by every module in the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed layer file or report file; `line` is 1-based within the input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("workload `{0}` contains no layers")]
    EmptyWorkload(String),

    #[error("invalid layer `{name}`: {msg}")]
    InvalidLayer { name: String, msg: String },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    /// The reference simulator refuses instances past its runtime guard.
    #[error("instance too large for reference simulation: {0}")]
    InstanceTooLarge(String),

    #[error("infeasible at unity: {0}")]
    InfeasibleAtUnity(String),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A persisted report cell failed to parse back.
    #[error("{file}: row {row}, column `{column}`: {msg}")]
    Corrupt {
        file: String,
        row: usize,
        column: String,
        msg: String,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
