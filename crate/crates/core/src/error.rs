use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("non-finite {what} at iteration {iteration}: {value}")]
    NonFinite {
        what: &'static str,
        iteration: usize,
        value: f64,
    },

    #[error("sinkhorn did not converge in {iters} iterations (marginal violation {violation:e})")]
    NoConvergence { iters: usize, violation: f64 },

    #[error("unsupported checkpoint format version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },

    #[error("checkpoint kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },

    #[error("corrupt weight blob `{name}`: {reason}")]
    CorruptBlob { name: String, reason: String },

    #[error("missing field `{0}`")]
    MissingField(String),

    #[error("malformed data: {0}")]
    Parse(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Stable machine-readable code printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimMismatch { .. } => "dim_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::EmptyBatch => "empty_batch",
            Error::NonFinite { .. } => "non_finite",
            Error::NoConvergence { .. } => "no_convergence",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::KindMismatch { .. } => "kind_mismatch",
            Error::CorruptBlob { .. } => "corrupt_blob",
            Error::MissingField(_) => "missing_field",
            Error::Parse(_) => "parse",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 usage, 3 data, 4 numeric, 5 version.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 2,
            Error::NonFinite { .. } | Error::NoConvergence { .. } => 4,
            Error::VersionMismatch { .. } => 5,
            _ => 3,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, got })
    }
}
