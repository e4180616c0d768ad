use thiserror::Error;

use crate::bdd::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid BDD: {0}")]
    Invalid(ValidationReport),

    #[error("diagrams have different variable counts ({0} vs {1})")]
    VarCountMismatch(u32, u32),

    #[error("assignment covers {got} variables, diagram has {expected}")]
    AssignmentLength { expected: usize, got: usize },

    #[error("truth table over {0} variables exceeds the exhaustive limit")]
    TooManyVariables(u32),

    #[error("truth table has {got} entries, expected {expected}")]
    TruthTableLength { expected: usize, got: usize },

    #[error("a diagram with exactly two nodes cannot be represented")]
    TwoNodeDiagram,

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("unrecognized container")]
    BadMagic,

    #[error("unknown backend id {0}")]
    UnknownBackend(u8),

    #[error("backend failure: {0}")]
    Backend(String),

    #[error("truncated input while reading {0}")]
    Truncated(&'static str),

    #[error("overlong varint")]
    OverlongVarint,

    #[error("inconsistent stream: {0}")]
    Inconsistent(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}
