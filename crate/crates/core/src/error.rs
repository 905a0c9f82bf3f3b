use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step index {index} out of range 1..={horizon}")]
    StepOutOfRange { index: usize, horizon: usize },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("at step {t}: {source}")]
    AtStep {
        t: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("stream mismatch: run fingerprint {run:016x} differs from benchmark fingerprint {bench:016x}")]
    StreamMismatch { run: u64, bench: u64 },

    #[error("precondition unmet: {0}")]
    Precondition(String),

    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(origin: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.into(),
            message: message.into(),
        }
    }

    pub(crate) fn at_step(self, t: usize) -> Self {
        Error::AtStep {
            t,
            source: Box::new(self),
        }
    }
}
