//! Alternating-offers negotiation engine and the sequential session driver.

mod agent;
mod session;
mod state;
mod transcript;

pub use agent::{Agent, AgentContext, CenterView, Role};
pub use session::{
    run_session, run_subnegotiation, slot_rngs, slot_seed, step_agent, Session, SessionResult, SlotEvent, SubnegotiationRun,
    DEFAULT_DEADLINE_ROUNDS,
};
pub use state::{Action, ActionKind, EndReason, Move, NegotiationState, Side, Status};
pub use transcript::{Fault, SlotTranscript, TerminalStatus, TranscriptEntry};

pub(crate) use session::score_agreements;
