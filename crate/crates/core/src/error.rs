use thiserror::Error;

/// Statistics of a Hilbert-basis completion that stopped at a resource limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialStats {
    pub level: u32,
    pub frontier_size: usize,
    pub solutions_found: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("malformed JSON: {0}")]
    MalformedJson(String),

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("unknown symbol {0}")]
    UnknownSymbol(String),

    #[error("duplicate name {0}")]
    DuplicateName(String),

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(
        "resource limit exceeded ({limit}) at level {}: frontier {}, solutions so far {}",
        stats.level,
        stats.frontier_size,
        stats.solutions_found
    )]
    Resource {
        limit: &'static str,
        stats: PartialStats,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
