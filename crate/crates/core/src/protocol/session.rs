use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ProtocolError;
use crate::outcome::{AgreementVector, OutcomeSpace, SideUtility};
use crate::protocol::{Action, Agent, AgentContext, CenterView, Fault, NegotiationState, Side, SlotTranscript, Status};
use crate::scenario::Scenario;
use crate::seed::{derive_seed, rng_for, AgentRng};

pub const DEFAULT_DEADLINE_ROUNDS: u32 = 100;

/// Seed of slot `slot`'s random streams within a session.
pub fn slot_seed(master: u64, slot: usize) -> u64 {
    derive_seed(master, &[slot as u64])
}

fn side_rngs(seed: u64) -> [AgentRng; 2] {
    [rng_for(seed, &[0]), rng_for(seed, &[1])]
}

/// Random streams of sides `A` and `B` in slot `slot` of a session seeded
/// with `master`.
pub fn slot_rngs(master: u64, slot: usize) -> [AgentRng; 2] {
    side_rngs(slot_seed(master, slot))
}

fn query(agent: &mut dyn Agent, ctx: &AgentContext<'_>, rng: &mut AgentRng) -> Result<Action, String> {
    panic::catch_unwind(AssertUnwindSafe(|| agent.act(ctx, rng))).map_err(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        format!("agent panicked: {msg}")
    })
}

/// Result of a standalone bilateral negotiation.
#[derive(Debug, Clone, PartialEq)]
pub struct SubnegotiationRun {
    pub state: NegotiationState,
    pub fault: Option<Fault>,
}

/// Runs one bilateral negotiation to completion, `A` opening. Neither agent
/// gets a center view.
pub fn run_subnegotiation(
    agent_a: &mut dyn Agent,
    agent_b: &mut dyn Agent,
    space: &OutcomeSpace,
    utilities: (&SideUtility, &SideUtility),
    deadline: u32,
    seed: u64,
) -> Result<SubnegotiationRun, ProtocolError> {
    let mut state = NegotiationState::new(space.clone(), deadline, Side::A)?;
    let mut rngs = side_rngs(seed);
    let mut fault = None;
    while state.is_running() {
        if state.expire() {
            break;
        }
        let side = state.turn();
        let (agent, utility): (&mut dyn Agent, _) = match side {
            Side::A => (&mut *agent_a, utilities.0),
            Side::B => (&mut *agent_b, utilities.1),
        };
        let ctx = AgentContext::new(side, &state, utility, None);
        let action = query(agent, &ctx, &mut rngs[side.index()]);
        let refused = match action {
            Ok(a) => state.step(side, a).err().map(|e| e.to_string()),
            Err(reason) => Some(reason),
        };
        if let Some(reason) = refused {
            state.step(side, Action::EndNegotiation)?;
            fault = Some(Fault { side, reason });
        }
    }
    Ok(SubnegotiationRun { state, fault })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub agreements: AgreementVector,
    pub transcripts: Vec<SlotTranscript>,
    pub center_utility: f64,
    pub edge_utilities: Vec<f64>,
}

impl SessionResult {
    pub fn fault_count(&self) -> usize {
        self.transcripts.iter().filter(|t| t.fault.is_some()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotEvent {
    Continuing,
    Closed { slot: usize },
}

#[derive(Debug, Clone)]
struct ActiveSlot {
    slot: usize,
    state: NegotiationState,
    fault: Option<Fault>,
}

/// Sequential multi-deal session: the center (side `A`) negotiates each
/// subnegotiation in scenario order and opens every one of them. A slot's
/// result is finalized before the next slot starts.
#[derive(Debug, Clone)]
pub struct Session {
    scenario: Arc<Scenario>,
    deadline: u32,
    agreements: AgreementVector,
    active: Option<ActiveSlot>,
    transcripts: Vec<SlotTranscript>,
    next_seq: u64,
}

impl Session {
    pub fn new(scenario: Arc<Scenario>, deadline: u32) -> Result<Self, ProtocolError> {
        let state = NegotiationState::new(scenario.subnegotiation(0).space.clone(), deadline, Side::A)?;
        Ok(Self {
            agreements: AgreementVector::open(scenario.edge_count()),
            active: Some(ActiveSlot {
                slot: 0,
                state,
                fault: None,
            }),
            scenario,
            deadline,
            transcripts: Vec::new(),
            next_seq: 0,
        })
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn deadline(&self) -> u32 {
        self.deadline
    }

    pub fn active_slot(&self) -> Option<usize> {
        self.active.as_ref().map(|a| a.slot)
    }

    pub fn negotiation(&self) -> Option<&NegotiationState> {
        self.active.as_ref().map(|a| &a.state)
    }

    pub fn turn(&self) -> Option<Side> {
        self.negotiation().map(NegotiationState::turn)
    }

    pub fn agreements(&self) -> &AgreementVector {
        &self.agreements
    }

    pub fn transcripts(&self) -> &[SlotTranscript] {
        &self.transcripts
    }

    pub fn is_finished(&self) -> bool {
        self.active.is_none()
    }

    /// Context for `side` in the active slot: the center gets its full view,
    /// the edge only its own utility.
    pub fn context(&self, side: Side) -> Option<AgentContext<'_>> {
        let active = self.active.as_ref()?;
        let sub = self.scenario.subnegotiation(active.slot);
        Some(match side {
            Side::A => AgentContext::new(
                side,
                &active.state,
                &sub.center_utility,
                Some(CenterView {
                    model: self.scenario.center_model(),
                    agreements: &self.agreements,
                    slot: active.slot,
                }),
            ),
            Side::B => AgentContext::new(side, &active.state, &sub.edge_utility, None),
        })
    }

    /// Validates an action for `side` without applying it.
    pub fn check(&self, side: Side, action: &Action) -> Result<(), ProtocolError> {
        match &self.active {
            Some(a) => a.state.check(side, action),
            None => Err(ProtocolError::Terminal),
        }
    }

    pub fn apply(&mut self, side: Side, action: Action) -> Result<SlotEvent, ProtocolError> {
        let active = self.active.as_mut().ok_or(ProtocolError::Terminal)?;
        active.state.step(side, action)?;
        Ok(self.close_if_terminal())
    }

    /// `side` walks away on account of an illegal or failed action.
    pub fn forfeit(&mut self, side: Side, reason: impl Into<String>) -> Result<SlotEvent, ProtocolError> {
        let active = self.active.as_mut().ok_or(ProtocolError::Terminal)?;
        active.state.step(side, Action::EndNegotiation)?;
        active.fault = Some(Fault {
            side,
            reason: reason.into(),
        });
        Ok(self.close_if_terminal())
    }

    /// Closes the active slot if its deadline has been reached.
    pub fn expire_if_due(&mut self) -> Option<SlotEvent> {
        let active = self.active.as_mut()?;
        if active.state.expire() {
            Some(self.close_if_terminal())
        } else {
            None
        }
    }

    fn close_if_terminal(&mut self) -> SlotEvent {
        let Some(active) = self.active.take_if(|a| a.state.status().is_terminal()) else {
            return SlotEvent::Continuing;
        };
        let deal = match active.state.status() {
            Status::Agreed(o) => Some(o.clone()),
            _ => None,
        };
        self.agreements
            .finalize(active.slot, deal)
            .expect("slots are finalized exactly once, in order");
        let record = SlotTranscript::record(active.slot, &active.state, self.next_seq, active.fault);
        self.next_seq += record.entries.len() as u64;
        self.transcripts.push(record);

        let next = active.slot + 1;
        if next < self.scenario.edge_count() {
            let state = NegotiationState::new(self.scenario.subnegotiation(next).space.clone(), self.deadline, Side::A)
                .expect("deadline validated at session start");
            self.active = Some(ActiveSlot {
                slot: next,
                state,
                fault: None,
            });
        }
        SlotEvent::Closed { slot: active.slot }
    }

    /// Final scores, once every slot is closed.
    pub fn result(&self) -> Option<SessionResult> {
        if !self.is_finished() {
            return None;
        }
        Some(score_agreements(&self.scenario, &self.agreements, self.transcripts.clone()))
    }
}

pub(crate) fn score_agreements(
    scenario: &Scenario,
    agreements: &AgreementVector,
    transcripts: Vec<SlotTranscript>,
) -> SessionResult {
    let center_utility = scenario
        .center_model()
        .eval(agreements)
        .expect("agreements come from the scenario's own spaces");
    let edge_utilities = scenario
        .subnegotiations()
        .iter()
        .zip(agreements.slots())
        .map(|(sub, slot)| match slot.deal() {
            Some(o) => sub.edge_utility.eval(&sub.space, o).expect("validated utility"),
            None => 0.0,
        })
        .collect();
    SessionResult {
        agreements: agreements.clone(),
        transcripts,
        center_utility,
        edge_utilities,
    }
}

/// Asks `agent` for `side`'s move in the active slot and applies it. A
/// panic or an illegal action forfeits the slot for that side.
pub fn step_agent(session: &mut Session, side: Side, agent: &mut dyn Agent, rng: &mut AgentRng) -> Result<SlotEvent, ProtocolError> {
    let action = {
        let ctx = session.context(side).ok_or(ProtocolError::Terminal)?;
        query(agent, &ctx, rng)
    };
    let refused = match action {
        Ok(a) => match session.check(side, &a) {
            Ok(()) => return session.apply(side, a),
            Err(e) => e.to_string(),
        },
        Err(reason) => reason,
    };
    session.forfeit(side, refused)
}

/// Runs a whole session between bots. `edges[k]` negotiates slot `k` and is
/// queried only while that slot is active.
pub fn run_session(
    center: &mut dyn Agent,
    edges: &mut [Box<dyn Agent>],
    scenario: &Arc<Scenario>,
    deadline: u32,
    master_seed: u64,
) -> Result<SessionResult, ProtocolError> {
    if edges.len() != scenario.edge_count() {
        return Err(ProtocolError::EdgeCount {
            expected: scenario.edge_count(),
            got: edges.len(),
        });
    }
    let mut session = Session::new(Arc::clone(scenario), deadline)?;
    let mut rngs: Option<(usize, [AgentRng; 2])> = None;
    while let Some(slot) = session.active_slot() {
        if session.expire_if_due().is_some() {
            continue;
        }
        if rngs.as_ref().map(|r| r.0) != Some(slot) {
            rngs = Some((slot, slot_rngs(master_seed, slot)));
        }
        let streams = &mut rngs.as_mut().expect("set above").1;
        let side = session.turn().expect("active slot");
        let agent: &mut dyn Agent = match side {
            Side::A => &mut *center,
            Side::B => edges[slot].as_mut(),
        };
        step_agent(&mut session, side, agent, &mut streams[side.index()])?;
    }
    Ok(session.result().expect("loop ends when the session is finished"))
}
