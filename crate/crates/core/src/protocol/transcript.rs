use serde::{Deserialize, Serialize};

use crate::error::ProtocolError;
use crate::outcome::{Outcome, OutcomeSpace};
use crate::protocol::{Action, ActionKind, EndReason, NegotiationState, Side, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    /// Position of the action within the whole session.
    pub seq: u64,
    pub side: Side,
    pub kind: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    pub round: u32,
}

impl TranscriptEntry {
    pub fn action(&self) -> Result<Action, ProtocolError> {
        Action::from_parts(self.kind, self.levels.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TerminalStatus {
    Agreed { outcome: Outcome },
    NoAgreement { reason: EndReason },
}

impl TerminalStatus {
    pub fn from_status(status: &Status) -> Option<Self> {
        match status {
            Status::Running => None,
            Status::Agreed(o) => Some(TerminalStatus::Agreed { outcome: o.clone() }),
            Status::NoAgreement(reason) => Some(TerminalStatus::NoAgreement { reason: *reason }),
        }
    }

    pub fn deal(&self) -> Option<&Outcome> {
        match self {
            TerminalStatus::Agreed { outcome } => Some(outcome),
            TerminalStatus::NoAgreement { .. } => None,
        }
    }
}

/// An agent action the engine refused; the offending side forfeits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub side: Side,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTranscript {
    pub slot: usize,
    pub deadline: u32,
    pub starting_side: Side,
    pub entries: Vec<TranscriptEntry>,
    pub terminal: TerminalStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl SlotTranscript {
    /// Records a finished negotiation, numbering its moves from `first_seq`.
    pub fn record(slot: usize, state: &NegotiationState, first_seq: u64, fault: Option<Fault>) -> Self {
        let entries = state
            .history()
            .iter()
            .enumerate()
            .map(|(i, m)| TranscriptEntry {
                seq: first_seq + i as u64,
                side: m.side,
                kind: m.action.kind(),
                levels: m.action.outcome().map(|o| o.levels().to_vec()),
                round: m.round,
            })
            .collect();
        Self {
            slot,
            deadline: state.deadline_rounds(),
            starting_side: state.starting_side(),
            entries,
            terminal: TerminalStatus::from_status(state.status()).expect("recorded negotiations are finished"),
            fault,
        }
    }

    /// Re-executes the recorded moves through the protocol engine and checks
    /// that they reach the recorded terminal status.
    pub fn replay(&self, space: &OutcomeSpace) -> Result<NegotiationState, ProtocolError> {
        let mut state = NegotiationState::new(space.clone(), self.deadline, self.starting_side)?;
        for (i, e) in self.entries.iter().enumerate() {
            if state.round() != e.round {
                return Err(ProtocolError::IllegalAction(format!(
                    "entry {i} claims round {} but the engine is in round {}",
                    e.round,
                    state.round()
                )));
            }
            if state.deadline_due() {
                return Err(ProtocolError::IllegalAction(format!("entry {i} lies past the deadline")));
            }
            state.step(e.side, e.action()?)?;
        }
        if self.terminal == (TerminalStatus::NoAgreement { reason: EndReason::Deadline }) {
            state.expire();
        }
        match TerminalStatus::from_status(state.status()) {
            Some(t) if t == self.terminal => Ok(state),
            other => Err(ProtocolError::IllegalAction(format!(
                "recorded terminal {:?} but replay reached {other:?}",
                self.terminal
            ))),
        }
    }
}
