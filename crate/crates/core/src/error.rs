use thiserror::Error;

use crate::outcome::Outcome;
use crate::protocol::Side;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutcomeError {
    #[error("issue `{0}` has no values")]
    EmptyIssue(String),
    #[error("issue `{issue}` lists level `{level}` twice")]
    DuplicateLevel { issue: String, level: String },
    #[error("outcome space has no issues")]
    NoIssues,
    #[error("issue `{0}` appears twice in the outcome space")]
    DuplicateIssue(String),
    #[error("outcome {0} is not in the outcome space")]
    OutOfSpace(Outcome),
    #[error("malformed utility: {0}")]
    MalformedUtility(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("enumeration of {required} outcomes exceeds the cap of {cap}")]
    Capacity { required: u128, cap: u128 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("deadline must be at least one round")]
    ZeroDeadline,
    #[error("illegal action: {0}")]
    IllegalAction(String),
    #[error("it is {expected:?}'s turn, not {got:?}'s")]
    WrongTurn { expected: Side, got: Side },
    #[error("negotiation already finished")]
    Terminal,
    #[error("{expected} edge agents required, got {got}")]
    EdgeCount { expected: usize, got: usize },
    #[error(transparent)]
    Outcome(#[from] OutcomeError),
}
