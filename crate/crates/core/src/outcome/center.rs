use serde::{Deserialize, Serialize};

use crate::error::OutcomeError;
use crate::outcome::{Outcome, OutcomeSpace, SideUtility};

/// Largest combined outcome count any exhaustive enumeration may visit.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Maps the per-slot agreements of a center agent to one utility.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterCombiner {
    /// The best side utility among all agreed slots.
    MaxOfDeals,
    /// `max(0, 1 - |Q - target| / slope)` where `Q` sums the agreed quantities.
    TargetQuantity {
        target: u32,
        slope: f64,
        quantity_issue: String,
    },
}

impl CenterCombiner {
    pub fn target_quantity(target: u32, slope: f64, quantity_issue: impl Into<String>) -> Result<Self, OutcomeError> {
        if target < 1 {
            return Err(OutcomeError::Contract("target quantity must be at least 1".into()));
        }
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(OutcomeError::Contract(format!("slope {slope} must be positive")));
        }
        Ok(CenterCombiner::TargetQuantity {
            target,
            slope,
            quantity_issue: quantity_issue.into(),
        })
    }

    /// Target-quantity curve evaluated at a total quantity. `None` for `MaxOfDeals`.
    pub fn quantity_curve(&self, total: i64) -> Option<f64> {
        match self {
            CenterCombiner::MaxOfDeals => None,
            CenterCombiner::TargetQuantity { target, slope, .. } => {
                let gap = (total - i64::from(*target)).abs() as f64;
                Some((1.0 - gap / slope).max(0.0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Slot {
    Open,
    Deal { outcome: Outcome },
    NoDeal,
}

impl Slot {
    pub fn is_open(&self) -> bool {
        matches!(self, Slot::Open)
    }

    pub fn deal(&self) -> Option<&Outcome> {
        match self {
            Slot::Deal { outcome } => Some(outcome),
            _ => None,
        }
    }
}

/// Per-slot agreement record of a session. A slot can be finalized once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgreementVector {
    slots: Vec<Slot>,
}

impl AgreementVector {
    pub fn open(n: usize) -> Self {
        Self {
            slots: vec![Slot::Open; n],
        }
    }

    pub fn from_slots(slots: Vec<Slot>) -> Self {
        Self { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn get(&self, k: usize) -> Option<&Slot> {
        self.slots.get(k)
    }

    pub fn finalize(&mut self, k: usize, deal: Option<Outcome>) -> Result<(), OutcomeError> {
        let slot = self
            .slots
            .get_mut(k)
            .ok_or_else(|| OutcomeError::Contract(format!("slot {k} out of range")))?;
        if !slot.is_open() {
            return Err(OutcomeError::Contract(format!("slot {k} already finalized")));
        }
        *slot = match deal {
            Some(outcome) => Slot::Deal { outcome },
            None => Slot::NoDeal,
        };
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(|s| !s.is_open())
    }

    pub fn deal_count(&self) -> usize {
        self.slots.iter().filter(|s| s.deal().is_some()).count()
    }
}

/// Running aggregate of a set of deals, sufficient for both combiners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tally {
    pub deals: u32,
    pub best_side: f64,
    pub quantity: i64,
}

impl Tally {
    pub const EMPTY: Tally = Tally {
        deals: 0,
        best_side: 0.0,
        quantity: 0,
    };
}

#[derive(Debug, Clone, PartialEq)]
struct SlotModel {
    space: OutcomeSpace,
    utility: SideUtility,
    side: Vec<f64>,
    quantity: Vec<i64>,
}

/// The center agent's full preference: combiner plus per-slot side utilities,
/// with every slot's values tabulated in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterModel {
    combiner: CenterCombiner,
    slots: Vec<SlotModel>,
    cap: u128,
}

impl CenterModel {
    pub fn new(combiner: CenterCombiner, slots: Vec<(OutcomeSpace, SideUtility)>) -> Result<Self, OutcomeError> {
        Self::with_cap(combiner, slots, ENUMERATION_CAP)
    }

    pub fn with_cap(
        combiner: CenterCombiner,
        slots: Vec<(OutcomeSpace, SideUtility)>,
        cap: u128,
    ) -> Result<Self, OutcomeError> {
        let mut models = Vec::with_capacity(slots.len());
        for (k, (space, utility)) in slots.into_iter().enumerate() {
            utility.validate_for(&space)?;
            let side = utility.table(&space, cap)?;
            let quantity = match &combiner {
                CenterCombiner::MaxOfDeals => vec![0; side.len()],
                CenterCombiner::TargetQuantity { quantity_issue, .. } => {
                    let idx = space.issue_index(quantity_issue).ok_or_else(|| {
                        OutcomeError::MalformedUtility(format!("slot {k} has no issue `{quantity_issue}`"))
                    })?;
                    let issue = &space.issues()[idx];
                    space
                        .enumerate()
                        .map(|o| issue.numeric(o.levels()[idx]).unwrap_or_default())
                        .collect()
                }
            };
            models.push(SlotModel {
                space,
                utility,
                side,
                quantity,
            });
        }
        Ok(Self {
            combiner,
            slots: models,
            cap,
        })
    }

    pub fn combiner(&self) -> &CenterCombiner {
        &self.combiner
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    pub fn space(&self, k: usize) -> &OutcomeSpace {
        &self.slots[k].space
    }

    pub fn side_utility(&self, k: usize) -> &SideUtility {
        &self.slots[k].utility
    }

    /// Center side utility of every outcome of slot `k`, canonical order.
    pub fn side_values(&self, k: usize) -> &[f64] {
        &self.slots[k].side
    }

    pub fn with_deal(&self, tally: Tally, k: usize, index: usize) -> Tally {
        let slot = &self.slots[k];
        Tally {
            deals: tally.deals + 1,
            best_side: tally.best_side.max(slot.side[index]),
            quantity: tally.quantity + slot.quantity[index],
        }
    }

    pub fn finish(&self, tally: Tally) -> f64 {
        if tally.deals == 0 {
            return 0.0;
        }
        match &self.combiner {
            CenterCombiner::MaxOfDeals => tally.best_side,
            CenterCombiner::TargetQuantity { .. } => self.combiner.quantity_curve(tally.quantity).unwrap_or(0.0),
        }
    }

    fn check_len(&self, agreements: &AgreementVector) -> Result<(), OutcomeError> {
        if agreements.len() != self.slots.len() {
            return Err(OutcomeError::Contract(format!(
                "{} agreement slots for {} subnegotiations",
                agreements.len(),
                self.slots.len()
            )));
        }
        Ok(())
    }

    fn checked_index(&self, k: usize, o: &Outcome) -> Result<usize, OutcomeError> {
        let space = &self.slots[k].space;
        space.check(o)?;
        Ok(space.index_of(o))
    }

    /// Center utility of a (possibly partial) agreement vector; open slots count as no deal.
    pub fn eval(&self, agreements: &AgreementVector) -> Result<f64, OutcomeError> {
        self.check_len(agreements)?;
        let mut tally = Tally::EMPTY;
        for (k, slot) in agreements.slots().iter().enumerate() {
            if let Some(o) = slot.deal() {
                let idx = self.checked_index(k, o)?;
                tally = self.with_deal(tally, k, idx);
            }
        }
        Ok(self.finish(tally))
    }

    /// Tally of the slots before `k`, which must all be finalized, while `k`
    /// and every later slot are still open.
    pub fn prior_tally(&self, partial: &AgreementVector, k: usize) -> Result<Tally, OutcomeError> {
        self.check_len(partial)?;
        if k >= self.slots.len() {
            return Err(OutcomeError::Contract(format!("slot {k} out of range")));
        }
        let slots = partial.slots();
        if let Some(j) = (0..k).find(|&j| slots[j].is_open()) {
            return Err(OutcomeError::Contract(format!("earlier slot {j} is not finalized")));
        }
        if !slots[k].is_open() {
            return Err(OutcomeError::Contract(format!("slot {k} already finalized")));
        }
        if let Some(j) = (k + 1..slots.len()).find(|&j| !slots[j].is_open()) {
            return Err(OutcomeError::Contract(format!("later slot {j} is already set")));
        }
        let mut tally = Tally::EMPTY;
        for (j, slot) in slots[..k].iter().enumerate() {
            if let Some(o) = slot.deal() {
                tally = self.with_deal(tally, j, self.checked_index(j, o)?);
            }
        }
        Ok(tally)
    }

    /// Center utility with `candidate` agreed at `k` and no deal in any later slot.
    pub fn pessimistic_view(&self, partial: &AgreementVector, k: usize, candidate: &Outcome) -> Result<f64, OutcomeError> {
        let tally = self.prior_tally(partial, k)?;
        let idx = self.checked_index(k, candidate)?;
        Ok(self.finish(self.with_deal(tally, k, idx)))
    }

    /// Pessimistic value of every outcome of slot `k`, canonical order.
    pub fn pessimistic_values(&self, partial: &AgreementVector, k: usize) -> Result<Vec<f64>, OutcomeError> {
        let tally = self.prior_tally(partial, k)?;
        Ok((0..self.slots[k].side.len())
            .map(|i| self.finish(self.with_deal(tally, k, i)))
            .collect())
    }

    /// Combined outcome count from slot `k` onward.
    pub fn combined_from(&self, k: usize) -> u128 {
        self.slots[k..]
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.side.len() as u128))
    }

    fn check_combined(&self, k: usize) -> Result<(), OutcomeError> {
        let required = self.combined_from(k);
        if required > self.cap {
            return Err(OutcomeError::Capacity {
                required,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Best center utility over every completion of the slots after `k`, each
    /// of which may end with any outcome or no deal.
    fn best_completion(&self, tally: Tally, k: usize) -> f64 {
        if k == self.slots.len() {
            return self.finish(tally);
        }
        let mut best = self.best_completion(tally, k + 1);
        for i in 0..self.slots[k].side.len() {
            best = best.max(self.best_completion(self.with_deal(tally, k, i), k + 1));
        }
        best
    }

    /// Center utility of `candidate` at `k` assuming the best possible future.
    /// Exhaustive; fails with a capacity error when the combined outcome count
    /// from slot `k` onward exceeds the cap.
    pub fn optimistic_view(&self, partial: &AgreementVector, k: usize, candidate: &Outcome) -> Result<f64, OutcomeError> {
        let tally = self.prior_tally(partial, k)?;
        let idx = self.checked_index(k, candidate)?;
        self.check_combined(k)?;
        Ok(self.best_completion(self.with_deal(tally, k, idx), k + 1))
    }

    pub fn optimistic_values(&self, partial: &AgreementVector, k: usize) -> Result<Vec<f64>, OutcomeError> {
        let tally = self.prior_tally(partial, k)?;
        self.check_combined(k)?;
        Ok((0..self.slots[k].side.len())
            .map(|i| self.best_completion(self.with_deal(tally, k, i), k + 1))
            .collect())
    }
}
