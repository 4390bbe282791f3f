use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance H={h} exceeds k/2 for k={k} (every bound requires H <= k/2)")]
    Tolerance { k: u32, h: u32 },

    #[error("budget insufficient: 2^(k-H) < m * <<k-H,H>> for m={m}, k={k}, H={h}")]
    BudgetInsufficient { m: u64, k: u32, h: u32 },

    #[error("node cap of {cap} exceeded")]
    NodeCap { cap: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the caller's input rather than by the library.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Overflow(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
