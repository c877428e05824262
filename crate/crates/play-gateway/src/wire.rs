//! Message shapes exchanged with clients. Every response body is wrapped in
//! an [`Envelope`]; the field names here are the wire format.

use multideal::outcome::Level;
use multideal::protocol::ActionKind;
use multideal::record::MatchRecord;
use serde::{Deserialize, Serialize};

pub const WIRE_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub v: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub body: T,
}

impl<T> Envelope<T> {
    pub fn new(kind: &str, body: T) -> Self {
        Self {
            v: WIRE_VERSION.into(),
            kind: kind.into(),
            body,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    /// Template name or scenario id.
    pub scenario: String,
    /// One registered strategy spec per edge.
    pub bots: Vec<String>,
    #[serde(default)]
    pub deadline: Option<u32>,
    /// Fixes the bots' random streams; drawn at random when absent.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRequest {
    pub kind: ActionKind,
    #[serde(default)]
    pub levels: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    AwaitingHuman,
    AwaitingBot,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seat {
    Center,
    Edge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueView {
    pub name: String,
    pub values: Vec<Level>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfferView {
    pub levels: Vec<usize>,
    pub by: Seat,
    /// The human's side utility of the offer.
    pub own_utility: f64,
    /// The human's overall utility if this deal closed and no more followed.
    pub combined_if_accepted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveView {
    pub slot: usize,
    pub seat: Seat,
    pub kind: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    pub round: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotState {
    Open,
    Deal,
    NoDeal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementView {
    pub slot: usize,
    pub state: SlotState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub own_utility: Option<f64>,
}

/// What the human may see of a live session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub token: String,
    pub status: SessionStatus,
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub briefing: Option<String>,
    pub slot_count: usize,
    pub active_slot: Option<usize>,
    pub round: Option<u32>,
    pub deadline: u32,
    /// Issues of the active slot.
    pub issues: Vec<IssueView>,
    pub standing_offer: Option<OfferView>,
    /// Moves so far in the active slot.
    pub history: Vec<MoveView>,
    pub agreements: Vec<AgreementView>,
    /// The human's utility from the deals closed so far.
    pub utility_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityView {
    pub slot: usize,
    pub levels: Vec<usize>,
    pub own_utility: f64,
    pub combined_if_agreed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSummary {
    pub slot: usize,
    pub agreed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub own_utility: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nash_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryView {
    pub token: String,
    pub scenario: String,
    pub center_utility: f64,
    pub slots: Vec<SlotSummary>,
    /// Full match record, loadable by `arena replay`.
    pub record: MatchRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateView {
    pub name: String,
    /// Subnegotiations defined by the template; a single one is repeated
    /// once per bot.
    pub slots: usize,
    pub issues: Vec<IssueView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub briefing: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role_center: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role_edge: Option<String>,
}

/// Server-push notification.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Move(MoveView),
    State(Box<StateView>),
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::Move(_) => "move",
            Event::State(_) => "state",
        }
    }

    pub fn envelope(&self) -> serde_json::Value {
        let body = match self {
            Event::Move(m) => serde_json::to_value(m),
            Event::State(s) => serde_json::to_value(s),
        }
        .expect("events serialize");
        serde_json::to_value(Envelope::new(self.name(), body)).expect("envelopes serialize")
    }
}
