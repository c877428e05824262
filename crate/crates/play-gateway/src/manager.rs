use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock, TryLockError};
use std::time::{Duration, Instant};

use multideal::agents::AgentSpec;
use multideal::outcome::{OutcomeSpace, Slot};
use multideal::protocol::{slot_rngs, step_agent, Action, Agent, Session, SlotEvent, Side};
use multideal::record::{MatchRecord, HUMAN};
use multideal::scenario::{pilot_templates, Scenario};
use multideal::seed::AgentRng;
use rand::rngs::OsRng;
use rand::Rng;
use thiserror::Error;
use tokio::sync::broadcast;

use crate::wire::*;

pub const DEFAULT_TTL: Duration = Duration::from_secs(30 * 60);
const EVENT_BUFFER: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    IllegalAction(String),
    #[error("{0}")]
    BadRequest(String),
}

impl GatewayError {
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::NotFound(_) => "not_found",
            GatewayError::Conflict(_) => "conflict",
            GatewayError::IllegalAction(_) => "illegal_action",
            GatewayError::BadRequest(_) => "bad_request",
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code().into(),
            reason: self.to_string(),
        }
    }
}

/// Time source, replaceable in tests.
pub trait Clock: Send + Sync {
    fn now(&self) -> Instant;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Instant {
        Instant::now()
    }
}

/// Clock that only moves when told to.
pub struct ManualClock(Mutex<Instant>);

impl ManualClock {
    pub fn new() -> Self {
        Self(Mutex::new(Instant::now()))
    }

    pub fn advance(&self, by: Duration) {
        *self.0.lock().unwrap() += by;
    }
}

impl Default for ManualClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Instant {
        *self.0.lock().unwrap()
    }
}

struct LiveSession {
    token: String,
    session: Session,
    bots: Vec<Box<dyn Agent>>,
    bot_names: Vec<String>,
    seed: u64,
    bot_rng: Option<(usize, AgentRng)>,
    briefing: Option<String>,
}

struct Entry {
    live: Mutex<LiveSession>,
    /// Last settled view, readable while an action is being processed.
    snapshot: RwLock<StateView>,
    events: broadcast::Sender<Event>,
    last_activity: Mutex<Instant>,
}

pub struct SessionManager {
    sessions: Mutex<HashMap<String, Arc<Entry>>>,
    templates: BTreeMap<String, Scenario>,
    ttl: Duration,
    clock: Arc<dyn Clock>,
}

fn issues_of(space: &OutcomeSpace) -> Vec<IssueView> {
    space
        .issues()
        .iter()
        .map(|i| IssueView {
            name: i.name().into(),
            values: i.values().to_vec(),
        })
        .collect()
}

fn seat(side: Side) -> Seat {
    match side {
        Side::A => Seat::Center,
        Side::B => Seat::Edge,
    }
}

fn new_token() -> String {
    format!("{:032x}", OsRng.gen::<u128>())
}

impl LiveSession {
    fn status(&self) -> SessionStatus {
        match self.session.turn() {
            None => SessionStatus::Finished,
            Some(Side::A) => SessionStatus::AwaitingHuman,
            Some(Side::B) => SessionStatus::AwaitingBot,
        }
    }

    fn view(&self) -> StateView {
        let scenario = self.session.scenario();
        let model = scenario.center_model();
        let agreements = self.session.agreements();
        let active = self.session.active_slot();
        let negotiation = self.session.negotiation();
        let standing_offer = match (active, negotiation) {
            (Some(k), Some(state)) => state.standing_offer().map(|o| {
                let by = state.history().last().map_or(Seat::Center, |m| seat(m.side));
                OfferView {
                    levels: o.levels().to_vec(),
                    by,
                    own_utility: model.side_values(k)[model.space(k).index_of(o)],
                    combined_if_accepted: model.pessimistic_view(agreements, k, o).expect("standing offers are in the space"),
                }
            }),
            _ => None,
        };
        let history = match (active, negotiation) {
            (Some(k), Some(state)) => state
                .history()
                .iter()
                .map(|m| MoveView {
                    slot: k,
                    seat: seat(m.side),
                    kind: m.action.kind(),
                    levels: m.action.outcome().map(|o| o.levels().to_vec()),
                    round: m.round,
                })
                .collect(),
            _ => Vec::new(),
        };
        let agreement_views = agreements
            .slots()
            .iter()
            .enumerate()
            .map(|(k, s)| match s {
                Slot::Open => AgreementView { slot: k, state: SlotState::Open, levels: None, own_utility: None },
                Slot::NoDeal => AgreementView { slot: k, state: SlotState::NoDeal, levels: None, own_utility: None },
                Slot::Deal { outcome } => AgreementView {
                    slot: k,
                    state: SlotState::Deal,
                    levels: Some(outcome.levels().to_vec()),
                    own_utility: Some(model.side_values(k)[model.space(k).index_of(outcome)]),
                },
            })
            .collect();
        StateView {
            token: self.token.clone(),
            status: self.status(),
            scenario: scenario.id().into(),
            briefing: self.briefing.clone(),
            slot_count: scenario.edge_count(),
            active_slot: active,
            round: negotiation.map(|s| s.round()),
            deadline: self.session.deadline(),
            issues: active.map(|k| issues_of(model.space(k))).unwrap_or_default(),
            standing_offer,
            history,
            agreements: agreement_views,
            utility_so_far: model.eval(agreements).expect("agreements come from the scenario"),
        }
    }

    fn last_move(&self, slot: usize) -> Option<MoveView> {
        let m = match self.session.negotiation() {
            Some(state) if self.session.active_slot() == Some(slot) => state.history().last().cloned()?,
            _ => {
                let t = self.session.transcripts().iter().find(|t| t.slot == slot)?;
                let e = t.entries.last()?;
                return Some(MoveView { slot, seat: seat(e.side), kind: e.kind, levels: e.levels.clone(), round: e.round });
            }
        };
        Some(MoveView {
            slot,
            seat: seat(m.side),
            kind: m.action.kind(),
            levels: m.action.outcome().map(|o| o.levels().to_vec()),
            round: m.round,
        })
    }

    /// Closes slots whose deadline has passed, then lets bots move until the
    /// human is due or the session is over.
    fn drive_bots(&mut self, publish: &dyn Fn(Event)) {
        loop {
            if self.session.expire_if_due().is_some() {
                continue;
            }
            let (Some(slot), Some(Side::B)) = (self.session.active_slot(), self.session.turn()) else {
                return;
            };
            if self.bot_rng.as_ref().map(|r| r.0) != Some(slot) {
                let [_, b] = slot_rngs(self.seed, slot);
                self.bot_rng = Some((slot, b));
            }
            let rng = &mut self.bot_rng.as_mut().expect("set above").1;
            step_agent(&mut self.session, Side::B, self.bots[slot].as_mut(), rng).expect("bot seat is on turn");
            if let Some(m) = self.last_move(slot) {
                publish(Event::Move(m));
            }
        }
    }
}

impl SessionManager {
    /// Manager serving the built-in templates plus `extra` scenarios, which
    /// take precedence on name clashes.
    pub fn new(extra: Vec<Scenario>, ttl: Duration) -> Self {
        Self::with_clock(extra, ttl, Arc::new(SystemClock))
    }

    pub fn with_clock(extra: Vec<Scenario>, ttl: Duration, clock: Arc<dyn Clock>) -> Self {
        let mut templates = BTreeMap::new();
        for t in pilot_templates() {
            templates.insert(t.id().to_string(), t);
        }
        for s in extra {
            templates.insert(s.id().to_string(), s);
        }
        Self {
            sessions: Mutex::new(HashMap::new()),
            templates,
            ttl,
            clock,
        }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn templates(&self) -> Vec<TemplateView> {
        self.templates
            .iter()
            .map(|(name, s)| TemplateView {
                name: name.clone(),
                slots: s.edge_count(),
                issues: issues_of(&s.subnegotiation(0).space),
                briefing: s.metadata().get("briefing").cloned(),
                role_center: s.metadata().get("role_center").cloned(),
                role_edge: s.metadata().get("role_edge").cloned(),
            })
            .collect()
    }

    fn entry(&self, token: &str) -> Result<Arc<Entry>, GatewayError> {
        let now = self.clock.now();
        let mut sessions = self.sessions.lock().unwrap();
        let entry = sessions
            .get(token)
            .cloned()
            .ok_or_else(|| GatewayError::NotFound(format!("no session `{token}`")))?;
        let idle = now.saturating_duration_since(*entry.last_activity.lock().unwrap());
        if idle > self.ttl {
            sessions.remove(token);
            return Err(GatewayError::NotFound(format!("no session `{token}`")));
        }
        *entry.last_activity.lock().unwrap() = now;
        Ok(entry)
    }

    /// Drops sessions idle for longer than the TTL; returns how many.
    pub fn purge_expired(&self) -> usize {
        let now = self.clock.now();
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, e| now.saturating_duration_since(*e.last_activity.lock().unwrap()) <= self.ttl);
        before - sessions.len()
    }

    pub fn live_sessions(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn create(&self, req: CreateRequest) -> Result<StateView, GatewayError> {
        let base = self
            .templates
            .get(&req.scenario)
            .ok_or_else(|| GatewayError::NotFound(format!("no scenario or template `{}`", req.scenario)))?;
        if req.bots.is_empty() {
            return Err(GatewayError::BadRequest("at least one bot is required".into()));
        }
        let scenario = if base.edge_count() == req.bots.len() {
            base.clone()
        } else if base.edge_count() == 1 {
            base.replicated(req.bots.len()).map_err(|e| GatewayError::BadRequest(e.to_string()))?
        } else {
            return Err(GatewayError::BadRequest(format!(
                "`{}` has {} subnegotiations but {} bots were given",
                req.scenario,
                base.edge_count(),
                req.bots.len()
            )));
        };
        let mut bots = Vec::with_capacity(req.bots.len());
        let mut bot_names = Vec::with_capacity(req.bots.len());
        for name in &req.bots {
            let spec: AgentSpec = name.parse().map_err(|e| GatewayError::BadRequest(format!("bot `{name}`: {e}")))?;
            let bot = spec.build().map_err(|e| match e {
                multideal::agents::RegistryError::UnknownStrategy(s) => GatewayError::NotFound(format!("no bot strategy `{s}`")),
                other => GatewayError::BadRequest(format!("bot `{name}`: {other}")),
            })?;
            bots.push(bot);
            bot_names.push(spec.to_string());
        }
        let deadline = req.deadline.unwrap_or(multideal::protocol::DEFAULT_DEADLINE_ROUNDS);
        let session = Session::new(Arc::new(scenario), deadline).map_err(|e| GatewayError::BadRequest(e.to_string()))?;
        let briefing = base.metadata().get("briefing").cloned();

        let mut sessions = self.sessions.lock().unwrap();
        let token = loop {
            let t = new_token();
            if !sessions.contains_key(&t) {
                break t;
            }
        };
        let live = LiveSession {
            token: token.clone(),
            session,
            bots,
            bot_names,
            seed: req.seed.unwrap_or_else(|| OsRng.gen()),
            bot_rng: None,
            briefing,
        };
        let view = live.view();
        let (events, _) = broadcast::channel(EVENT_BUFFER);
        sessions.insert(
            token,
            Arc::new(Entry {
                live: Mutex::new(live),
                snapshot: RwLock::new(view.clone()),
                events,
                last_activity: Mutex::new(self.clock.now()),
            }),
        );
        Ok(view)
    }

    /// Applies the human's action and every bot reply it triggers. Illegal
    /// actions are rejected and leave the session untouched. A submission
    /// that arrives while another is being processed gets a conflict.
    pub fn submit(&self, token: &str, req: ActionRequest) -> Result<StateView, GatewayError> {
        let entry = self.entry(token)?;
        let mut live = match entry.live.try_lock() {
            Ok(l) => l,
            Err(TryLockError::WouldBlock) => {
                return Err(GatewayError::Conflict("another action on this session is in progress".into()))
            }
            Err(TryLockError::Poisoned(_)) => return Err(GatewayError::Conflict("session is unusable".into())),
        };
        match live.session.turn() {
            None => return Err(GatewayError::Conflict("session is finished".into())),
            Some(Side::B) => return Err(GatewayError::Conflict("waiting for a bot".into())),
            Some(Side::A) => {}
        }
        let action = Action::from_parts(req.kind, req.levels).map_err(|e| GatewayError::BadRequest(e.to_string()))?;
        live.session
            .check(Side::A, &action)
            .map_err(|e| GatewayError::IllegalAction(e.to_string()))?;
        let slot = live.session.active_slot().expect("human is on turn");
        let event = live.session.apply(Side::A, action).expect("checked above");
        let publish = |e: Event| {
            let _ = entry.events.send(e);
        };
        if let Some(m) = live.last_move(slot) {
            publish(Event::Move(m));
        }
        if event == SlotEvent::Continuing {
            *entry.snapshot.write().unwrap() = live.view();
        }
        live.drive_bots(&publish);
        let view = live.view();
        *entry.snapshot.write().unwrap() = view.clone();
        publish(Event::State(Box::new(view.clone())));
        Ok(view)
    }

    /// Latest settled view; does not wait for an action in progress.
    pub fn state(&self, token: &str) -> Result<StateView, GatewayError> {
        Ok(self.entry(token)?.snapshot.read().unwrap().clone())
    }

    /// The human's utility for `levels` in the active slot.
    pub fn utility(&self, token: &str, levels: Vec<usize>) -> Result<UtilityView, GatewayError> {
        let entry = self.entry(token)?;
        let live = entry
            .live
            .try_lock()
            .map_err(|_| GatewayError::Conflict("an action on this session is in progress".into()))?;
        let slot = live
            .session
            .active_slot()
            .ok_or_else(|| GatewayError::Conflict("session is finished".into()))?;
        let model = live.session.scenario().center_model();
        let outcome = multideal::outcome::Outcome::new(levels.clone());
        model
            .space(slot)
            .check(&outcome)
            .map_err(|e| GatewayError::BadRequest(e.to_string()))?;
        Ok(UtilityView {
            slot,
            own_utility: model.side_values(slot)[model.space(slot).index_of(&outcome)],
            combined_if_agreed: model
                .pessimistic_view(live.session.agreements(), slot, &outcome)
                .expect("checked above"),
            levels,
        })
    }

    pub fn summary(&self, token: &str) -> Result<SummaryView, GatewayError> {
        let entry = self.entry(token)?;
        let live = entry
            .live
            .try_lock()
            .map_err(|_| GatewayError::Conflict("an action on this session is in progress".into()))?;
        let result = live
            .session
            .result()
            .ok_or_else(|| GatewayError::Conflict("session is not finished".into()))?;
        let scenario = live.session.scenario();
        let record = MatchRecord::new(
            0,
            scenario,
            0,
            0,
            HUMAN,
            live.bot_names.clone(),
            live.seed,
            live.session.deadline(),
            result,
        )
        .expect("finished sessions analyze");
        let model = scenario.center_model();
        let slots = record
            .slots
            .iter()
            .map(|s| {
                let deal = record.result.agreements.slots()[s.slot].deal();
                SlotSummary {
                    slot: s.slot,
                    agreed: s.agreed,
                    levels: deal.map(|o| o.levels().to_vec()),
                    own_utility: deal.map(|o| model.side_values(s.slot)[model.space(s.slot).index_of(o)]),
                    nash_distance: s.nash_distance,
                }
            })
            .collect();
        Ok(SummaryView {
            token: live.token.clone(),
            scenario: scenario.id().into(),
            center_utility: record.result.center_utility,
            slots,
            record,
        })
    }

    pub fn subscribe(&self, token: &str) -> Result<broadcast::Receiver<Event>, GatewayError> {
        Ok(self.entry(token)?.events.subscribe())
    }
}
