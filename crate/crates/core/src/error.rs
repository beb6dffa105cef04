use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("party mismatch: expected party {expected}, got party {actual}")]
    PartyMismatch { expected: u8, actual: u8 },

    #[error("invalid party index {0} (must be 1, 2 or 3)")]
    InvalidParty(u8),

    #[error("duplicate party index {0}")]
    DuplicateParty(u8),

    #[error("share index {0} is not covered by the supplied parties")]
    MissingShareIndex(u8),

    #[error("inconsistent replicas of share index {0}")]
    InconsistentReplica(u8),

    #[error("value {value} outside domain of size {domain}")]
    OutOfDomain { value: u64, domain: u64 },

    #[error("invalid interval: lower bound {lower} exceeds upper bound {upper}")]
    InvalidInterval { lower: u64, upper: u64 },

    #[error("one-hot decode failed: Hamming weight {0} > 1")]
    NotOneHot(usize),

    #[error("zero-sharing counter exhausted")]
    CounterExhausted,

    #[error("round skew: expected round {expected}, received {actual}")]
    RoundSkew { expected: u32, actual: u32 },

    #[error("op tag mismatch in round {round}: expected {expected:#06x}, received {actual:#06x}")]
    OpMismatch { round: u32, expected: u16, actual: u16 },

    #[error("session mismatch: expected {expected}, received {actual}")]
    SessionMismatch { expected: u32, actual: u32 },

    #[error("peer {0} disconnected")]
    Disconnected(u8),

    #[error("malformed data: {0}")]
    Codec(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid query: {0}")]
    Query(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors raised while parties exchange messages, as opposed to input
    /// validation failures caught before any protocol action.
    pub fn is_protocol(&self) -> bool {
        matches!(
            self,
            Error::RoundSkew { .. }
                | Error::OpMismatch { .. }
                | Error::SessionMismatch { .. }
                | Error::Disconnected(_)
                | Error::CounterExhausted
                | Error::InconsistentReplica(_)
                | Error::Io(_)
        )
    }

    pub(crate) fn codec(msg: impl Into<String>) -> Self {
        Error::Codec(msg.into())
    }
}
