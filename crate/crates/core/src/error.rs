use std::path::PathBuf;

/// Errors produced by the laboratory.
///
/// The variants map onto the CLI exit codes: usage and configuration problems
/// exit with 2, numerical and internal-consistency diagnostics with 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// The experiment or model description is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A dense matrix would exceed the configured row cap.
    #[error("configuration error: matrix with {size} rows exceeds the cap of {cap} rows (raise it with --cap)")]
    CapExceeded { size: usize, cap: usize },

    /// A numerical routine failed; `provenance` names the offending instance.
    #[error("numerical error: {message} [{provenance}]")]
    Numerical { message: String, provenance: String },

    /// A geometric or algebraic identity that must hold by construction failed.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::CapExceeded { .. } | Error::Json(_) => 2,
            Error::Numerical { .. } | Error::Internal(_) => 3,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
