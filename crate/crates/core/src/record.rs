//! Persisted match records: lineup, seed, transcripts, scores and per-slot
//! Nash analysis, plus the audit and replay checks run against them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{AgentSpec, RegistryError};
use crate::error::{OutcomeError, ProtocolError};
use crate::outcome::{nash_distance, nash_point_of, AgreementVector, BilateralPoint, Outcome, Slot, ENUMERATION_CAP};
use crate::protocol::{run_session, Agent, SessionResult, TerminalStatus};
use crate::scenario::{Scenario, ScenarioError, ScenarioFile};

pub const MATCH_SCHEMA: &str = "multideal-match/1";

/// Lineup name recorded for a human center.
pub const HUMAN: &str = "human";

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("malformed match record: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported match schema `{0}`")]
    Version(String),
    #[error("embedded scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Outcome(#[from] OutcomeError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashPoint {
    pub index: usize,
    pub outcome: Outcome,
    pub u_center: f64,
    pub u_edge: f64,
}

/// Bilateral analysis of one slot. The center side is valued pessimistically
/// given the deals finalized before the slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotAnalysis {
    pub slot: usize,
    pub agreed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_edge: Option<f64>,
    /// Absent when no outcome gives both sides positive product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nash: Option<NashPoint>,
    /// Only defined for agreed slots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nash_distance: Option<f64>,
}

fn prefix(agreements: &AgreementVector, k: usize) -> AgreementVector {
    let slots = agreements
        .slots()
        .iter()
        .enumerate()
        .map(|(i, s)| if i < k { s.clone() } else { Slot::Open })
        .collect();
    AgreementVector::from_slots(slots)
}

/// Bilateral points of slot `k`: center pessimistic value given the deals
/// before `k`, edge side utility.
pub fn slot_points(scenario: &Scenario, agreements: &AgreementVector, k: usize) -> Result<Vec<BilateralPoint>, OutcomeError> {
    let sub = scenario.subnegotiation(k);
    let center = scenario.center_model().pessimistic_values(&prefix(agreements, k), k)?;
    let edge = sub.edge_utility.table(&sub.space, ENUMERATION_CAP)?;
    Ok(sub
        .space
        .enumerate()
        .zip(center.into_iter().zip(edge))
        .enumerate()
        .map(|(index, (outcome, (u_a, u_b)))| BilateralPoint { index, outcome, u_a, u_b })
        .collect())
}

pub fn analyze_slots(scenario: &Scenario, agreements: &AgreementVector) -> Result<Vec<SlotAnalysis>, OutcomeError> {
    (0..scenario.edge_count())
        .map(|k| {
            let points = slot_points(scenario, agreements, k)?;
            let nash = nash_point_of(&points).map(|p| NashPoint {
                index: p.index,
                outcome: p.outcome.clone(),
                u_center: p.u_a,
                u_edge: p.u_b,
            });
            let achieved = agreements
                .get(k)
                .and_then(Slot::deal)
                .map(|o| &points[scenario.subnegotiation(k).space.index_of(o)]);
            let nash_dist = match (achieved, &nash) {
                (Some(a), Some(n)) => Some(nash_distance((a.u_a, a.u_b), (n.u_center, n.u_edge))),
                _ => None,
            };
            Ok(SlotAnalysis {
                slot: k,
                agreed: achieved.is_some(),
                u_center: achieved.map(|a| a.u_a),
                u_edge: achieved.map(|a| a.u_b),
                nash,
                nash_distance: nash_dist,
            })
        })
        .collect()
}

/// One played session, self-contained enough to audit or replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub schema: String,
    pub match_id: u64,
    pub scenario_id: String,
    #[serde(default)]
    pub scenario_index: usize,
    #[serde(default)]
    pub rep: u32,
    pub center: String,
    pub edges: Vec<String>,
    pub seed: u64,
    pub deadline: u32,
    pub result: SessionResult,
    pub slots: Vec<SlotAnalysis>,
    pub faults: usize,
    pub scenario: ScenarioFile,
}

impl MatchRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        match_id: u64,
        scenario: &Scenario,
        scenario_index: usize,
        rep: u32,
        center: impl Into<String>,
        edges: Vec<String>,
        seed: u64,
        deadline: u32,
        result: SessionResult,
    ) -> Result<Self, OutcomeError> {
        let slots = analyze_slots(scenario, &result.agreements)?;
        Ok(Self {
            schema: MATCH_SCHEMA.into(),
            match_id,
            scenario_id: scenario.id().into(),
            scenario_index,
            rep,
            center: center.into(),
            edges,
            seed,
            deadline,
            faults: result.fault_count(),
            result,
            slots,
            scenario: ScenarioFile::from_scenario(scenario),
        })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("match records serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, RecordError> {
        let record: MatchRecord = serde_json::from_str(text.trim())?;
        if record.schema != MATCH_SCHEMA {
            return Err(RecordError::Version(record.schema));
        }
        Ok(record)
    }

    pub fn scenario(&self) -> Result<Scenario, RecordError> {
        Ok(self.scenario.to_scenario()?)
    }

    /// Agreed slots' Nash distances.
    pub fn nash_distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.slots.iter().filter_map(|s| s.nash_distance)
    }

    pub fn agreement_count(&self) -> usize {
        self.slots.iter().filter(|s| s.agreed).count()
    }
}

fn mismatch<T: PartialEq + std::fmt::Debug>(what: &str, stored: &T, recomputed: &T) -> Result<(), RecordError> {
    if stored == recomputed {
        Ok(())
    } else {
        Err(RecordError::Mismatch(format!(
            "{what}: stored {stored:?}, recomputed {recomputed:?}"
        )))
    }
}

/// Replays every transcript through the engine and recomputes every stored
/// number from the resulting agreements.
pub fn audit(record: &MatchRecord) -> Result<(), RecordError> {
    let scenario = record.scenario()?;
    let res = &record.result;
    mismatch("slot count", &scenario.edge_count(), &res.transcripts.len())?;
    let mut slots = Vec::with_capacity(res.transcripts.len());
    let mut seq = 0;
    for (k, t) in res.transcripts.iter().enumerate() {
        mismatch("transcript slot", &k, &t.slot)?;
        mismatch("deadline", &record.deadline, &t.deadline)?;
        for e in &t.entries {
            mismatch("sequence number", &seq, &e.seq)?;
            seq += 1;
        }
        let state = t
            .replay(&scenario.subnegotiation(k).space)
            .map_err(|e| RecordError::Mismatch(format!("slot {k} transcript: {e}")))?;
        let terminal = TerminalStatus::from_status(state.status());
        mismatch(&format!("slot {k} terminal"), &Some(t.terminal.clone()), &terminal)?;
        slots.push(match t.terminal.deal() {
            Some(o) => Slot::Deal { outcome: o.clone() },
            None => Slot::NoDeal,
        });
    }
    let agreements = AgreementVector::from_slots(slots);
    mismatch("agreements", &res.agreements, &agreements)?;
    let rescored = crate::protocol::score_agreements(&scenario, &agreements, res.transcripts.clone());
    mismatch("center utility", &res.center_utility, &rescored.center_utility)?;
    mismatch("edge utilities", &res.edge_utilities, &rescored.edge_utilities)?;
    mismatch("slot analysis", &record.slots, &analyze_slots(&scenario, &agreements)?)?;
    mismatch("fault count", &record.faults, &res.fault_count())?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplayKind {
    /// The lineup was rebuilt and re-run from the stored seed.
    Rerun,
    /// The center was not a registered bot (e.g. a human), so only the
    /// transcript audit was possible.
    AuditOnly,
}

/// Audits `record`, then re-runs its lineup from the stored seed when every
/// seat is a registered strategy and checks the session is bit-identical.
pub fn replay(record: &MatchRecord) -> Result<ReplayKind, RecordError> {
    audit(record)?;
    let Ok(center_spec) = record.center.parse::<AgentSpec>() else {
        return Ok(ReplayKind::AuditOnly);
    };
    let mut center = match center_spec.build() {
        Ok(a) => a,
        Err(RegistryError::UnknownStrategy(_)) if record.center == HUMAN => return Ok(ReplayKind::AuditOnly),
        Err(e) => return Err(e.into()),
    };
    let mut edges = record
        .edges
        .iter()
        .map(|e| e.parse::<AgentSpec>().and_then(|s| s.build()))
        .collect::<Result<Vec<Box<dyn Agent>>, _>>()?;
    let scenario = Arc::new(record.scenario()?);
    let rerun = run_session(center.as_mut(), &mut edges, &scenario, record.deadline, record.seed)?;
    mismatch("transcripts", &record.result.transcripts, &rerun.transcripts)?;
    mismatch("center utility", &record.result.center_utility, &rerun.center_utility)?;
    mismatch("edge utilities", &record.result.edge_utilities, &rerun.edge_utilities)?;
    Ok(ReplayKind::Rerun)
}
