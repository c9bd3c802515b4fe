use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("precondition violated for label `{label}`: need {bound} values, have {have}")]
    PreconditionViolated { label: String, bound: usize, have: usize },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("decode failed: {0}")]
    DecodeFailed(String),
    #[error("not a text: {0}")]
    NotAText(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// Stable numeric code, shared with the C bindings.
    pub fn code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 10,
            Error::UnknownSymbol(_) => 11,
            Error::AlphabetMismatch(_) => 12,
            Error::DimensionMismatch { .. } => 13,
            Error::PreconditionViolated { .. } => 14,
            Error::CapExceeded(_) => 15,
            Error::DecodeFailed(_) => 16,
            Error::NotAText(_) => 17,
            Error::Overflow(_) => 18,
            Error::Invalid(_) => 19,
        }
    }
}
