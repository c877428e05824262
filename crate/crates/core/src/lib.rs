//! Sequential multi-deal negotiation: one center agent negotiates with a
//! sequence of edge agents, and its utility depends on the whole vector of
//! deals it closes.

pub mod agents;
pub mod error;
pub mod outcome;
pub mod protocol;
pub mod record;
pub mod scenario;
pub mod seed;

pub use error::{OutcomeError, ProtocolError};
