#![allow(dead_code)]

use std::collections::BTreeMap;

use multideal::outcome::{CenterCombiner, Issue, OutcomeSpace, SideUtility};
use multideal::protocol::{Action, ActionKind, Agent, AgentContext, EndReason, SessionResult, Side, SlotTranscript, TerminalStatus};
use multideal::scenario::{Scenario, Subnegotiation};
use multideal::seed::AgentRng;
use rand::{Rng, SeedableRng};

/// Agent driven by a closure.
pub struct Scripted<F> {
    pub name: String,
    pub f: F,
}

impl<F> Agent for Scripted<F>
where
    F: FnMut(&AgentContext<'_>) -> Action + Send,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, ctx: &AgentContext<'_>, _rng: &mut AgentRng) -> Action {
        (self.f)(ctx)
    }
}

pub fn scripted<F>(f: F) -> Box<dyn Agent>
where
    F: FnMut(&AgentContext<'_>) -> Action + Send + 'static,
{
    Box::new(Scripted { name: "scripted".into(), f })
}

/// Offers the first outcome, accepts anything that stands.
pub fn accept_first() -> Box<dyn Agent> {
    scripted(|ctx| match ctx.standing_offer {
        Some(_) => Action::Accept,
        None => Action::Offer(ctx.space.outcome_at(0)),
    })
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_space(r: &mut impl Rng, max_issues: usize, max_levels: usize) -> OutcomeSpace {
    let n = r.gen_range(1..=max_issues);
    OutcomeSpace::new(
        (0..n)
            .map(|i| Issue::integer_range(format!("i{i}"), 0, r.gen_range(0..max_levels as i64)).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Random linear-additive utility; values are occasionally repeated so ties occur.
pub fn random_linear(r: &mut impl Rng, space: &OutcomeSpace) -> SideUtility {
    let raw: Vec<f64> = space.issues().iter().map(|_| r.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let rest: f64 = weights[1..].iter().sum();
    weights[0] = 1.0 - rest;
    let valuations = space
        .issues()
        .iter()
        .map(|i| {
            (0..i.cardinality())
                .map(|_| if r.gen_bool(0.2) { 0.5 } else { r.gen_range(0.0..=1.0) })
                .collect()
        })
        .collect();
    SideUtility::linear_additive(weights, valuations).unwrap()
}

pub fn single_issue(values: &[f64]) -> (OutcomeSpace, SideUtility) {
    let space = OutcomeSpace::new(vec![Issue::integer_range("x", 0, values.len() as i64 - 1).unwrap()]).unwrap();
    let u = SideUtility::linear_additive(vec![1.0], vec![values.to_vec()]).unwrap();
    (space, u)
}

/// Max-combiner scenario whose slot `k` has the given center side values;
/// edges prefer the reverse order.
pub fn max_scenario(slots: &[&[f64]]) -> Scenario {
    let subs = slots
        .iter()
        .map(|v| {
            let (space, center) = single_issue(v);
            let rev: Vec<f64> = v.iter().rev().copied().collect();
            Subnegotiation {
                edge_utility: single_issue(&rev).1,
                space,
                center_utility: center,
            }
        })
        .collect();
    Scenario::new("test", subs, CenterCombiner::MaxOfDeals, BTreeMap::new()).unwrap()
}

pub fn random_max_scenario(r: &mut impl Rng, n_edges: usize) -> Scenario {
    let subs = (0..n_edges)
        .map(|_| {
            let space = random_space(r, 2, 4);
            Subnegotiation {
                center_utility: random_linear(r, &space),
                edge_utility: random_linear(r, &space),
                space,
            }
        })
        .collect();
    Scenario::new("random", subs, CenterCombiner::MaxOfDeals, BTreeMap::new()).unwrap()
}

/// Checks one slot transcript against the protocol rules, written from the
/// rules rather than from the engine code.
pub fn check_transcript(t: &SlotTranscript, first_seq: u64) -> Result<(), String> {
    let n = t.entries.len();
    for (i, e) in t.entries.iter().enumerate() {
        let expected_side = if i % 2 == 0 { t.starting_side } else { t.starting_side.other() };
        if e.side != expected_side {
            return Err(format!("slot {}: entry {i} by {:?}, expected {expected_side:?}", t.slot, e.side));
        }
        if e.round != (i / 2) as u32 {
            return Err(format!("slot {}: entry {i} in round {}, expected {}", t.slot, e.round, i / 2));
        }
        if e.round >= t.deadline {
            return Err(format!("slot {}: entry {i} past the deadline", t.slot));
        }
        if e.seq != first_seq + i as u64 {
            return Err(format!("slot {}: entry {i} has seq {}, expected {}", t.slot, e.seq, first_seq + i as u64));
        }
        if i + 1 < n && e.kind != ActionKind::Offer {
            return Err(format!("slot {}: {:?} at entry {i} is followed by more actions", t.slot, e.kind));
        }
        if e.kind == ActionKind::Accept && i == 0 {
            return Err(format!("slot {}: accept with nothing standing", t.slot));
        }
    }
    match &t.terminal {
        TerminalStatus::Agreed { outcome } => {
            let last = t.entries.last().ok_or("agreement without actions")?;
            if last.kind != ActionKind::Accept {
                return Err(format!("slot {}: agreement not closed by an accept", t.slot));
            }
            let offer = &t.entries[n - 2];
            if offer.side == last.side || offer.levels.as_deref() != Some(outcome.levels()) {
                return Err(format!("slot {}: agreed outcome is not the standing offer", t.slot));
            }
        }
        TerminalStatus::NoAgreement { reason: EndReason::WalkAway } => {
            if t.entries.last().map(|e| e.kind) != Some(ActionKind::End) {
                return Err(format!("slot {}: walk-away without an end action", t.slot));
            }
        }
        TerminalStatus::NoAgreement { reason: EndReason::Deadline } => {
            if n != 2 * t.deadline as usize || t.entries.iter().any(|e| e.kind != ActionKind::Offer) {
                return Err(format!("slot {}: deadline ending after {n} actions", t.slot));
            }
        }
    }
    Ok(())
}

/// Session-level checks: slots in order, each transcript valid, sequence
/// numbers contiguous so no slot's actions interleave with another's.
pub fn check_session(r: &SessionResult, n_edges: usize) -> Result<(), String> {
    if r.transcripts.len() != n_edges || r.agreements.len() != n_edges {
        return Err("slot count mismatch".into());
    }
    let mut seq = 0;
    for (k, t) in r.transcripts.iter().enumerate() {
        if t.slot != k {
            return Err(format!("transcript {k} is for slot {}", t.slot));
        }
        if t.starting_side != Side::A {
            return Err(format!("slot {k} not opened by the center"));
        }
        check_transcript(t, seq)?;
        seq += t.entries.len() as u64;
        if r.agreements.slots()[k].deal() != t.terminal.deal() {
            return Err(format!("slot {k}: agreement vector disagrees with transcript"));
        }
    }
    Ok(())
}
