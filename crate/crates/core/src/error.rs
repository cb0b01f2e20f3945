use thiserror::Error;

use crate::space::GroundSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank {0} outside the supported range 1..=31")]
    InvalidRank(u32),

    #[error("element {element} outside 1..={max}")]
    ElementOutOfRange { element: u64, max: u64 },

    #[error("functional {value} outside 1..={max}")]
    FunctionalOutOfRange { value: u64, max: u64 },

    #[error("ground sets live in different spaces (rank {left} vs rank {right})")]
    SpaceMismatch { left: u32, right: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("move {index} (`{mv}`) cannot be applied: {reason}")]
    Replay {
        index: usize,
        mv: String,
        reason: String,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("visit budget of {budget} states exhausted; {} states left on the frontier", frontier.len())]
    BudgetExhausted {
        budget: usize,
        visited: usize,
        frontier: Vec<GroundSet>,
    },

    #[error("reachability undecided: budget of {budget} states exhausted before the target was found")]
    Indeterminate { budget: usize },

    #[error("certificate refused: {0}")]
    CertificateRefused(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
