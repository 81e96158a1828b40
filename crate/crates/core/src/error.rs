use alloc::string::String;

/// Errors raised by atlas construction and cochain operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("position {position} out of range for a string of length {len}")]
    OutOfRange { position: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("index {0} is outside the domain of the map")]
    OutsideDomain(String),
    #[error("no embedding stored for the pair {0} -> {1}")]
    MissingEmbedding(String, String),
    #[error("no unique group element relates the embeddings {0} -> {1}")]
    NoGroupElement(String, String),
    #[error("atlas mismatch: `{0}` vs `{1}`")]
    AtlasMismatch(String, String),
    #[error("complex mismatch: operands live on different index domains")]
    DomainMismatch,
    #[error("not a spark: {0}")]
    NotASpark(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
