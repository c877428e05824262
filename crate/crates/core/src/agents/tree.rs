//! Depth-limited expected-utility tree over the center's future slots.
//!
//! Each future slot either ends without a deal (probability `1 - p`) or with
//! one of its top-`K` outcomes by center side utility (probability `p`,
//! split among the children by a softmax over their values). Slots beyond
//! the depth limit are assumed to end without a deal.

use crate::agents::softmax;
use crate::error::OutcomeError;
use crate::outcome::{AgreementVector, CenterModel, Outcome, Tally};
use crate::protocol::AgentContext;

/// What the per-slot softmax is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChildWeighting {
    /// The children's own subtree expected values.
    #[default]
    SubtreeValue,
    /// The children's immediate center side utilities.
    SideUtility,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeSearchConfig {
    pub depth_limit: u32,
    pub temperature: f64,
    pub branching_cap: usize,
    pub deal_prior: f64,
    pub node_budget: u64,
    pub weighting: ChildWeighting,
}

impl Default for TreeSearchConfig {
    fn default() -> Self {
        Self {
            depth_limit: 2,
            temperature: 0.2,
            branching_cap: 16,
            deal_prior: 0.5,
            node_budget: 100_000,
            weighting: ChildWeighting::SubtreeValue,
        }
    }
}

impl TreeSearchConfig {
    pub fn validate(&self) -> Result<(), OutcomeError> {
        if self.depth_limit < 1 {
            return Err(OutcomeError::Contract("depth limit must be at least 1".into()));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(OutcomeError::Contract("temperature must be positive".into()));
        }
        if self.branching_cap < 1 {
            return Err(OutcomeError::Contract("branching cap must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.deal_prior) {
            return Err(OutcomeError::Contract("deal prior must lie in [0,1]".into()));
        }
        Ok(())
    }
}

struct Search<'a> {
    model: &'a CenterModel,
    cfg: &'a TreeSearchConfig,
    /// Top-K child indices for each future slot, best first.
    children: Vec<Vec<usize>>,
    first_future: usize,
}

impl<'a> Search<'a> {
    fn new(model: &'a CenterModel, slot: usize, cfg: &'a TreeSearchConfig) -> Result<Self, OutcomeError> {
        cfg.validate()?;
        let first_future = slot + 1;
        let depth = (model.slot_count() - first_future).min(cfg.depth_limit as usize);
        let mut children = Vec::with_capacity(depth);
        let mut nodes: u128 = 0;
        let mut level: u128 = 1;
        for k in first_future..first_future + depth {
            let values = model.side_values(k);
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
            order.truncate(cfg.branching_cap);
            level = level.saturating_mul(order.len() as u128 + 1);
            nodes = nodes.saturating_add(level);
            children.push(order);
        }
        if nodes > u128::from(cfg.node_budget) {
            return Err(OutcomeError::Capacity {
                required: nodes,
                cap: u128::from(cfg.node_budget),
            });
        }
        Ok(Self {
            model,
            cfg,
            children,
            first_future,
        })
    }

    fn value(&self, tally: Tally, depth: usize) -> f64 {
        if depth == self.children.len() {
            return self.model.finish(tally);
        }
        let k = self.first_future + depth;
        let no_deal = self.value(tally, depth + 1);
        let kids = &self.children[depth];
        let values: Vec<f64> = kids
            .iter()
            .map(|&i| self.value(self.model.with_deal(tally, k, i), depth + 1))
            .collect();
        let weights = match self.cfg.weighting {
            ChildWeighting::SubtreeValue => softmax(&values, self.cfg.temperature),
            ChildWeighting::SideUtility => {
                let side = self.model.side_values(k);
                let own: Vec<f64> = kids.iter().map(|&i| side[i]).collect();
                softmax(&own, self.cfg.temperature)
            }
        };
        let mixture: f64 = weights.iter().zip(&values).map(|(w, v)| w * v).sum();
        let p = self.cfg.deal_prior;
        (1.0 - p) * no_deal + p * mixture
    }
}

/// Tree value of every outcome of `slot`, canonical order.
pub fn tree_values(
    model: &CenterModel,
    agreements: &AgreementVector,
    slot: usize,
    cfg: &TreeSearchConfig,
) -> Result<Vec<f64>, OutcomeError> {
    let prior = model.prior_tally(agreements, slot)?;
    let search = Search::new(model, slot, cfg)?;
    Ok((0..model.side_values(slot).len())
        .map(|i| search.value(model.with_deal(prior, slot, i), 0))
        .collect())
}

/// Expected center utility of agreeing on `candidate` in the active slot.
pub fn expected_utility_tree(ctx: &AgentContext<'_>, candidate: &Outcome, cfg: &TreeSearchConfig) -> Result<f64, OutcomeError> {
    let view = ctx
        .center
        .ok_or_else(|| OutcomeError::Contract("tree search needs the center's view".into()))?;
    let model = view.model;
    let prior = model.prior_tally(view.agreements, view.slot)?;
    let space = model.space(view.slot);
    space.check(candidate)?;
    let search = Search::new(model, view.slot, cfg)?;
    Ok(search.value(model.with_deal(prior, view.slot, space.index_of(candidate)), 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::{CenterCombiner, Issue, OutcomeSpace, SideUtility};

    fn slot(values: &[f64]) -> (OutcomeSpace, SideUtility) {
        let space = OutcomeSpace::new(vec![Issue::integer_range("x", 0, values.len() as i64 - 1).unwrap()]).unwrap();
        (space, SideUtility::linear_additive(vec![1.0], vec![values.to_vec()]).unwrap())
    }

    fn max_model(slots: &[&[f64]]) -> CenterModel {
        CenterModel::new(CenterCombiner::MaxOfDeals, slots.iter().map(|v| slot(v)).collect()).unwrap()
    }

    fn cfg(p: f64, tau: f64, k: usize) -> TreeSearchConfig {
        TreeSearchConfig {
            deal_prior: p,
            temperature: tau,
            branching_cap: k,
            ..TreeSearchConfig::default()
        }
    }

    #[test]
    fn no_future_is_pessimistic() {
        let m = max_model(&[&[0.2, 0.7]]);
        let open = AgreementVector::open(1);
        assert_eq!(tree_values(&m, &open, 0, &cfg(1.0, 0.2, 16)).unwrap(), m.pessimistic_values(&open, 0).unwrap());
    }

    #[test]
    fn singleton_child_dominates() {
        let m = max_model(&[&[0.5], &[1.0]]);
        let v = tree_values(&m, &AgreementVector::open(2), 0, &cfg(1.0, 3.7, 1)).unwrap();
        assert_eq!(v, vec![1.0]);
    }

    #[test]
    fn two_children_mixture() {
        // children (1.0, 0.5): weights 1/(1+e^-0.5) and its complement
        let m = max_model(&[&[0.5], &[1.0, 0.5]]);
        let v = tree_values(&m, &AgreementVector::open(2), 0, &cfg(1.0, 1.0, 16)).unwrap()[0];
        let w = 1.0 / (1.0 + (-0.5f64).exp());
        assert!((w - 0.6225).abs() < 1e-4);
        assert!((v - (w * 1.0 + (1.0 - w) * 0.5)).abs() < 1e-12);
        assert!((v - 0.8112).abs() < 1e-4);
    }

    #[test]
    fn zero_prior_is_exactly_pessimistic() {
        let m = max_model(&[&[0.1, 0.4, 0.3], &[0.9, 0.2], &[0.6, 0.8]]);
        let open = AgreementVector::open(3);
        assert_eq!(tree_values(&m, &open, 0, &cfg(0.0, 0.2, 16)).unwrap(), m.pessimistic_values(&open, 0).unwrap());
    }

    #[test]
    fn depth_limit_truncates_pessimistically() {
        let m = max_model(&[&[0.1], &[0.2], &[1.0]]);
        let c = TreeSearchConfig {
            depth_limit: 1,
            ..cfg(1.0, 0.2, 16)
        };
        // slot 2's 1.0 lies beyond the limit
        assert_eq!(tree_values(&m, &AgreementVector::open(3), 0, &c).unwrap(), vec![0.2]);
    }

    #[test]
    fn node_budget_enforced() {
        let m = max_model(&[&[0.1], &[0.1; 20], &[0.1; 20]]);
        let c = TreeSearchConfig {
            node_budget: 100,
            ..cfg(0.5, 0.2, 16)
        };
        // 17 + 17*17 = 306 nodes
        assert_eq!(
            tree_values(&m, &AgreementVector::open(3), 0, &c).unwrap_err(),
            OutcomeError::Capacity { required: 306, cap: 100 }
        );
    }
}
