use thiserror::Error;

use crate::strip::Letter;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cell index {0} is outside 0..8")]
    CellOutOfRange(i64),

    #[error("serving front cell {0} does not carry an A-type letter")]
    FrontNotAType(u8),

    #[error("expected an A-type letter, got {0}")]
    NotAType(Letter),

    #[error("expected a B-type letter, got {0}")]
    NotBType(Letter),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("fatigue time constant must be positive and finite, got {0}")]
    InvalidTau(f64),

    #[error("{policy} script exhausted at trial {index}")]
    ScriptExhausted { policy: &'static str, index: u64 },

    #[error("script has {len} entries but {needed} trials were requested")]
    ScriptTooShort { len: usize, needed: u64 },

    #[error("policy depends on trial history and cannot be enumerated")]
    HistoryDependentPolicy,

    #[error("experiment needs at least one trial")]
    NoTrials,

    #[error("{0}")]
    ModeMismatch(&'static str),

    #[error("external policy requires the caller to supply the {0} choice")]
    ExternalChoiceRequired(&'static str),

    #[error("malformed trial log: {0}")]
    Log(String),
}
