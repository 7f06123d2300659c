use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operands of a graph operation have incompatible shapes.
    Shape { op: &'static str, detail: String },
    /// A forward value became NaN or infinite.
    NonFinite { op: &'static str },
    /// `backward` was called on something other than a 1x1 tensor.
    NotScalar { rows: usize, cols: usize },
    UnknownParam(String),
    DuplicateParam(String),
    MissingGradient(String),
    TokenOutOfRange { id: usize, vocab: usize },
    Validation { doc_key: String, detail: String },
    EmptyCorpus,
    Checkpoint(String),
    Analysis(String),
    /// A broken internal invariant, e.g. a cyclic antecedent link.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape { op, detail } => write!(f, "shape mismatch in {op}: {detail}"),
            Error::NonFinite { op } => write!(f, "non-finite value produced by {op}"),
            Error::NotScalar { rows, cols } => {
                write!(f, "loss must be a 1x1 tensor, got {rows}x{cols}")
            }
            Error::UnknownParam(name) => write!(f, "unknown parameter `{name}`"),
            Error::DuplicateParam(name) => write!(f, "parameter `{name}` already exists"),
            Error::MissingGradient(name) => write!(f, "no gradient for parameter `{name}`"),
            Error::TokenOutOfRange { id, vocab } => {
                write!(f, "token id {id} out of range for vocabulary of size {vocab}")
            }
            Error::Validation { doc_key, detail } => {
                write!(f, "invalid document `{doc_key}`: {detail}")
            }
            Error::EmptyCorpus => write!(f, "corpus is empty"),
            Error::Checkpoint(msg) => write!(f, "checkpoint: {msg}"),
            Error::Analysis(msg) => write!(f, "pair analysis: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
