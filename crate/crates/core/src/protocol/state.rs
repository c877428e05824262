use serde::{Deserialize, Serialize};

use crate::error::ProtocolError;
use crate::outcome::{Outcome, OutcomeSpace};

/// Seat in a bilateral negotiation. In a session the center is always `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Offer(Outcome),
    Accept,
    EndNegotiation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Offer,
    Accept,
    End,
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Offer(_) => ActionKind::Offer,
            Action::Accept => ActionKind::Accept,
            Action::EndNegotiation => ActionKind::End,
        }
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        match self {
            Action::Offer(o) => Some(o),
            _ => None,
        }
    }

    pub fn from_parts(kind: ActionKind, levels: Option<Vec<usize>>) -> Result<Action, ProtocolError> {
        match (kind, levels) {
            (ActionKind::Offer, Some(l)) => Ok(Action::Offer(Outcome::new(l))),
            (ActionKind::Offer, None) => Err(ProtocolError::IllegalAction("offer without levels".into())),
            (ActionKind::Accept, _) => Ok(Action::Accept),
            (ActionKind::End, _) => Ok(Action::EndNegotiation),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    WalkAway,
    Deadline,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Agreed(Outcome),
    NoAgreement(EndReason),
}

impl Status {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, Status::Running)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub side: Side,
    pub action: Action,
    /// Round in which the action was taken.
    pub round: u32,
}

/// One alternating-offers negotiation. A round is one action by each side;
/// it advances when the turn returns to the starting side.
#[derive(Debug, Clone, PartialEq)]
pub struct NegotiationState {
    space: OutcomeSpace,
    round: u32,
    deadline_rounds: u32,
    starting_side: Side,
    turn: Side,
    standing_offer: Option<Outcome>,
    history: Vec<Move>,
    status: Status,
}

impl NegotiationState {
    pub fn new(space: OutcomeSpace, deadline_rounds: u32, starting_side: Side) -> Result<Self, ProtocolError> {
        if deadline_rounds == 0 {
            return Err(ProtocolError::ZeroDeadline);
        }
        Ok(Self {
            space,
            round: 0,
            deadline_rounds,
            starting_side,
            turn: starting_side,
            standing_offer: None,
            history: Vec::new(),
            status: Status::Running,
        })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn deadline_rounds(&self) -> u32 {
        self.deadline_rounds
    }

    pub fn starting_side(&self) -> Side {
        self.starting_side
    }

    pub fn turn(&self) -> Side {
        self.turn
    }

    pub fn standing_offer(&self) -> Option<&Outcome> {
        self.standing_offer.as_ref()
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn is_running(&self) -> bool {
        self.status == Status::Running
    }

    /// `round / deadline`, in `[0, 1]`.
    pub fn relative_time(&self) -> f64 {
        f64::from(self.round) / f64::from(self.deadline_rounds)
    }

    /// True when the deadline has been reached and the next step will close
    /// the negotiation.
    pub fn deadline_due(&self) -> bool {
        self.is_running() && self.round >= self.deadline_rounds
    }

    /// Closes a due negotiation with `NoAgreement(Deadline)`. Returns whether it did.
    pub fn expire(&mut self) -> bool {
        if self.deadline_due() {
            self.status = Status::NoAgreement(EndReason::Deadline);
            true
        } else {
            false
        }
    }

    /// Validates `action` for `side` without changing anything.
    pub fn check(&self, side: Side, action: &Action) -> Result<(), ProtocolError> {
        if self.status.is_terminal() {
            return Err(ProtocolError::Terminal);
        }
        if side != self.turn {
            return Err(ProtocolError::WrongTurn {
                expected: self.turn,
                got: side,
            });
        }
        if self.deadline_due() {
            return Ok(());
        }
        match action {
            Action::Offer(o) if !self.space.contains(o) => {
                Err(ProtocolError::IllegalAction(format!("offer {o} is outside the outcome space")))
            }
            Action::Accept if self.standing_offer.is_none() => {
                Err(ProtocolError::IllegalAction("nothing to accept".into()))
            }
            _ => Ok(()),
        }
    }

    /// Applies `action` by `side`. On error the state is unchanged. Once the
    /// deadline is due any action closes the negotiation without being recorded.
    pub fn step(&mut self, side: Side, action: Action) -> Result<&Status, ProtocolError> {
        self.check(side, &action)?;
        if self.expire() {
            return Ok(&self.status);
        }
        let round = self.round;
        match &action {
            Action::Offer(o) => {
                self.standing_offer = Some(o.clone());
                self.turn = side.other();
                if self.turn == self.starting_side {
                    self.round += 1;
                }
            }
            Action::Accept => {
                let agreed = self.standing_offer.clone().expect("checked above");
                self.status = Status::Agreed(agreed);
            }
            Action::EndNegotiation => {
                self.status = Status::NoAgreement(EndReason::WalkAway);
            }
        }
        self.history.push(Move { side, action, round });
        Ok(&self.status)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::Issue;

    fn space() -> OutcomeSpace {
        OutcomeSpace::new(vec![Issue::integer_range("x", 0, 2).unwrap()]).unwrap()
    }

    fn o(l: usize) -> Outcome {
        Outcome::new(vec![l])
    }

    #[test]
    fn fresh_state() {
        let s = NegotiationState::new(space(), 10, Side::A).unwrap();
        assert!(s.is_running());
        assert_eq!(s.turn(), Side::A);
        assert_eq!(s.round(), 0);
        assert!(s.history().is_empty());
        assert!(s.standing_offer().is_none());
    }

    #[test]
    fn zero_deadline_rejected() {
        assert_eq!(
            NegotiationState::new(space(), 0, Side::A).unwrap_err(),
            ProtocolError::ZeroDeadline
        );
    }

    #[test]
    fn offer_then_accept_agrees() {
        let mut s = NegotiationState::new(space(), 10, Side::A).unwrap();
        s.step(Side::A, Action::Offer(o(1))).unwrap();
        assert_eq!(s.standing_offer(), Some(&o(1)));
        let st = s.step(Side::B, Action::Accept).unwrap();
        assert_eq!(st, &Status::Agreed(o(1)));
        assert_eq!(s.history().len(), 2);
    }

    #[test]
    fn opening_accept_is_illegal() {
        let mut s = NegotiationState::new(space(), 10, Side::A).unwrap();
        let before = s.clone();
        assert!(matches!(s.step(Side::A, Action::Accept), Err(ProtocolError::IllegalAction(_))));
        assert_eq!(s, before);
    }

    #[test]
    fn deadline_one_round() {
        let mut s = NegotiationState::new(space(), 1, Side::A).unwrap();
        s.step(Side::A, Action::Offer(o(0))).unwrap();
        assert_eq!(s.round(), 0);
        s.step(Side::B, Action::Offer(o(2))).unwrap();
        assert_eq!(s.round(), 1);
        let st = s.step(Side::A, Action::Accept).unwrap();
        assert_eq!(st, &Status::NoAgreement(EndReason::Deadline));
        assert_eq!(s.history().len(), 2);
    }

    #[test]
    fn terminal_is_absorbing() {
        let mut s = NegotiationState::new(space(), 5, Side::B).unwrap();
        s.step(Side::B, Action::EndNegotiation).unwrap();
        assert_eq!(s.status(), &Status::NoAgreement(EndReason::WalkAway));
        for a in [Action::Accept, Action::EndNegotiation, Action::Offer(o(0))] {
            assert_eq!(s.step(Side::A, a.clone()), Err(ProtocolError::Terminal));
            assert_eq!(s.step(Side::B, a), Err(ProtocolError::Terminal));
        }
    }

    #[test]
    fn wrong_turn_and_out_of_space() {
        let mut s = NegotiationState::new(space(), 5, Side::A).unwrap();
        assert!(matches!(
            s.step(Side::B, Action::Offer(o(0))),
            Err(ProtocolError::WrongTurn { .. })
        ));
        assert!(matches!(
            s.step(Side::A, Action::Offer(o(3))),
            Err(ProtocolError::IllegalAction(_))
        ));
        assert!(matches!(
            s.step(Side::A, Action::Offer(Outcome::new(vec![0, 0]))),
            Err(ProtocolError::IllegalAction(_))
        ));
    }
}
