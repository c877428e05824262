use rand::Rng;

use crate::agents::{tree_values, ConcessionSchedule, TreeSearchConfig};
use crate::outcome::{AgreementVector, Outcome, ENUMERATION_CAP};
use crate::protocol::{Action, Agent, AgentContext};
use crate::seed::AgentRng;

/// Outcome the conceder would bid: the lowest-valued outcome still at or
/// above `target`, or the best outcome when none reaches it. Ties go to the
/// lowest canonical index.
pub fn next_bid(values: &[f64], target: f64) -> usize {
    let mut above: Option<usize> = None;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
        if v >= target && above.is_none_or(|a| v < values[a]) {
            above = Some(i);
        }
    }
    above.unwrap_or(best)
}

/// Accepts the standing offer iff it is worth at least the next bid.
pub fn conceder_decision(values: &[f64], target: f64, standing: Option<usize>) -> Decision {
    let bid = next_bid(values, target);
    match standing {
        Some(s) if values[s] >= values[bid] => Decision::Accept,
        _ => Decision::Offer(bid),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Offer(usize),
}

fn to_action(ctx: &AgentContext<'_>, d: Decision) -> Action {
    match d {
        Decision::Accept => Action::Accept,
        Decision::Offer(i) => Action::Offer(ctx.space.outcome_at(i)),
    }
}

fn standing_index(ctx: &AgentContext<'_>) -> Option<usize> {
    ctx.standing_offer
        .filter(|o| ctx.space.contains(o))
        .map(|o| ctx.space.index_of(o))
}

/// How a conceder values each outcome of the active slot when playing center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Foresight {
    /// No further deals will be made.
    Pessimistic,
    /// Future deals weighted by a depth-limited expected-utility tree.
    Contingent(TreeSearchConfig),
    /// The best possible future completion.
    Optimistic,
}

/// Values of the active slot's outcomes from `ctx`'s point of view. An edge
/// values outcomes by its own side utility; a center by its combined utility
/// under `foresight`, falling back to pessimistic values on capacity errors.
pub fn valuations(ctx: &AgentContext<'_>, foresight: &Foresight) -> Vec<f64> {
    let Some(view) = ctx.center else {
        return ctx
            .utility
            .table(ctx.space, ENUMERATION_CAP)
            .expect("edge utilities are validated against their space");
    };
    let (model, agreements, slot) = (view.model, view.agreements, view.slot);
    let computed = match foresight {
        Foresight::Pessimistic => model.pessimistic_values(agreements, slot),
        Foresight::Contingent(cfg) => tree_values(model, agreements, slot, cfg),
        Foresight::Optimistic => model.optimistic_values(agreements, slot),
    };
    computed.unwrap_or_else(|e| {
        log::warn!("slot {slot}: {e}; valuing outcomes pessimistically");
        model
            .pessimistic_values(agreements, slot)
            .expect("session keeps the agreement vector consistent")
    })
}

fn conceder_act(ctx: &AgentContext<'_>, schedule: &ConcessionSchedule, values: &[f64]) -> Action {
    let target = schedule.target(ctx.relative_time());
    to_action(ctx, conceder_decision(values, target, standing_index(ctx)))
}

pub fn pessimistic_conceder_act(ctx: &AgentContext<'_>, schedule: &ConcessionSchedule) -> Action {
    conceder_act(ctx, schedule, &valuations(ctx, &Foresight::Pessimistic))
}

pub fn contingent_act(ctx: &AgentContext<'_>, schedule: &ConcessionSchedule, cfg: &TreeSearchConfig) -> Action {
    conceder_act(ctx, schedule, &valuations(ctx, &Foresight::Contingent(*cfg)))
}

pub fn optimistic_act(ctx: &AgentContext<'_>, schedule: &ConcessionSchedule) -> Action {
    conceder_act(ctx, schedule, &valuations(ctx, &Foresight::Optimistic))
}

/// Offer a uniform outcome with weight 0.8, accept with 0.15 (only when an
/// offer stands), walk away with 0.05.
pub fn random_act(ctx: &AgentContext<'_>, rng: &mut AgentRng) -> Action {
    const OFFER: f64 = 0.8;
    const ACCEPT: f64 = 0.15;
    const END: f64 = 0.05;
    let can_accept = ctx.standing_offer.is_some();
    let total = if can_accept { OFFER + ACCEPT + END } else { OFFER + END };
    let r = rng.gen::<f64>() * total;
    if r < OFFER {
        let n = ctx.space.cardinality() as u64;
        Action::Offer(ctx.space.outcome_at(rng.gen_range(0..n) as usize))
    } else if can_accept && r < OFFER + ACCEPT {
        Action::Accept
    } else {
        Action::EndNegotiation
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct CacheKey {
    slot: usize,
    agreements: AgreementVector,
}

/// Time-dependent conceder; `foresight` decides how a center values its bids.
#[derive(Debug, Clone)]
pub struct Conceder {
    name: String,
    schedule: ConcessionSchedule,
    foresight: Foresight,
    cache: Option<(CacheKey, Vec<f64>)>,
}

impl Conceder {
    pub fn new(name: impl Into<String>, schedule: ConcessionSchedule, foresight: Foresight) -> Self {
        Self {
            name: name.into(),
            schedule,
            foresight,
            cache: None,
        }
    }

    pub fn pessimistic(schedule: ConcessionSchedule) -> Self {
        Self::new("conceder", schedule, Foresight::Pessimistic)
    }

    pub fn contingent(schedule: ConcessionSchedule, cfg: TreeSearchConfig) -> Self {
        Self::new("contingent", schedule, Foresight::Contingent(cfg))
    }

    pub fn optimistic(schedule: ConcessionSchedule) -> Self {
        Self::new("optimistic", schedule, Foresight::Optimistic)
    }

    pub fn schedule(&self) -> &ConcessionSchedule {
        &self.schedule
    }

    pub fn foresight(&self) -> &Foresight {
        &self.foresight
    }
}

impl Agent for Conceder {
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, ctx: &AgentContext<'_>, _rng: &mut AgentRng) -> Action {
        // Center valuations depend only on the slot and the deals so far.
        let Some(view) = ctx.center else {
            return conceder_act(ctx, &self.schedule, &valuations(ctx, &self.foresight));
        };
        let key = CacheKey {
            slot: view.slot,
            agreements: view.agreements.clone(),
        };
        if self.cache.as_ref().is_none_or(|(k, _)| *k != key) {
            self.cache = Some((key, valuations(ctx, &self.foresight)));
        }
        let values = &self.cache.as_ref().expect("filled above").1;
        conceder_act(ctx, &self.schedule, values)
    }
}

#[derive(Debug, Clone)]
pub struct RandomAgent {
    name: String,
}

impl RandomAgent {
    pub fn new() -> Self {
        Self { name: "random".into() }
    }
}

impl Default for RandomAgent {
    fn default() -> Self {
        Self::new()
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, ctx: &AgentContext<'_>, rng: &mut AgentRng) -> Action {
        random_act(ctx, rng)
    }
}

/// Accepts whatever stands; otherwise bids its best outcome (pessimistically
/// valued when playing center).
#[derive(Debug, Clone)]
pub struct Acceptor {
    name: String,
}

impl Acceptor {
    pub fn new() -> Self {
        Self { name: "acceptor".into() }
    }
}

impl Default for Acceptor {
    fn default() -> Self {
        Self::new()
    }
}

impl Agent for Acceptor {
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, ctx: &AgentContext<'_>, _rng: &mut AgentRng) -> Action {
        if ctx.standing_offer.is_some() {
            return Action::Accept;
        }
        let values = valuations(ctx, &Foresight::Pessimistic);
        Action::Offer(ctx.space.outcome_at(next_bid(&values, f64::INFINITY)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultMode {
    /// Bids an outcome outside the space.
    Illegal,
    /// Panics.
    Panic,
}

/// Misbehaving agent for exercising forfeit handling.
#[derive(Debug, Clone)]
pub struct Faulty {
    name: String,
    mode: FaultMode,
}

impl Faulty {
    pub fn new(mode: FaultMode) -> Self {
        Self {
            name: "faulty".into(),
            mode,
        }
    }
}

impl Agent for Faulty {
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, ctx: &AgentContext<'_>, _rng: &mut AgentRng) -> Action {
        match self.mode {
            FaultMode::Illegal => Action::Offer(Outcome::new(vec![usize::MAX; ctx.space.issues().len()])),
            FaultMode::Panic => panic!("faulty agent crashed on purpose"),
        }
    }
}
