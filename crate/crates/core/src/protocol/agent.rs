use crate::outcome::{AgreementVector, CenterModel, Outcome, OutcomeSpace, SideUtility};
use crate::protocol::{Action, NegotiationState, Side};
use crate::seed::AgentRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Center,
    Edge,
}

/// What only the center may see: its combined preference, the deals so far,
/// and which slot is active.
#[derive(Debug, Clone, Copy)]
pub struct CenterView<'a> {
    pub model: &'a CenterModel,
    pub agreements: &'a AgreementVector,
    pub slot: usize,
}

/// Everything an agent is told when asked to act. An edge never receives a
/// `CenterView`, so it learns nothing about the combiner, other edges, or its
/// own position in the session.
#[derive(Debug, Clone, Copy)]
pub struct AgentContext<'a> {
    pub side: Side,
    pub space: &'a OutcomeSpace,
    pub utility: &'a SideUtility,
    pub center: Option<CenterView<'a>>,
    pub round: u32,
    pub deadline: u32,
    pub standing_offer: Option<&'a Outcome>,
}

impl<'a> AgentContext<'a> {
    pub fn new(
        side: Side,
        state: &'a NegotiationState,
        utility: &'a SideUtility,
        center: Option<CenterView<'a>>,
    ) -> Self {
        Self {
            side,
            space: state.space(),
            utility,
            center,
            round: state.round(),
            deadline: state.deadline_rounds(),
            standing_offer: state.standing_offer(),
        }
    }

    pub fn role(&self) -> Role {
        if self.center.is_some() {
            Role::Center
        } else {
            Role::Edge
        }
    }

    /// `t = round / deadline`, clamped to `[0, 1]`.
    pub fn relative_time(&self) -> f64 {
        (f64::from(self.round) / f64::from(self.deadline)).clamp(0.0, 1.0)
    }
}

/// A negotiating strategy. Instances belong to one session.
pub trait Agent: Send {
    fn name(&self) -> &str;

    fn act(&mut self, ctx: &AgentContext<'_>, rng: &mut AgentRng) -> Action;
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn act(&mut self, ctx: &AgentContext<'_>, rng: &mut AgentRng) -> Action {
        (**self).act(ctx, rng)
    }
}
