use std::collections::BTreeMap;

use crate::outcome::{CenterCombiner, CenterModel, OutcomeSpace, SideUtility};
use crate::scenario::ScenarioError;

#[derive(Debug, Clone, PartialEq)]
pub struct Subnegotiation {
    pub space: OutcomeSpace,
    pub center_utility: SideUtility,
    pub edge_utility: SideUtility,
}

/// A sequential multi-deal scenario: the center meets one edge per
/// subnegotiation, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    id: String,
    subnegotiations: Vec<Subnegotiation>,
    combiner: CenterCombiner,
    metadata: BTreeMap<String, String>,
    center: CenterModel,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        subnegotiations: Vec<Subnegotiation>,
        combiner: CenterCombiner,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self, ScenarioError> {
        if subnegotiations.is_empty() {
            return Err(ScenarioError::invalid(None, "scenario has no subnegotiations"));
        }
        for (k, sub) in subnegotiations.iter().enumerate() {
            sub.center_utility
                .validate_for(&sub.space)
                .map_err(|e| ScenarioError::invalid(Some(k), format!("center utility: {e}")))?;
            sub.edge_utility
                .validate_for(&sub.space)
                .map_err(|e| ScenarioError::invalid(Some(k), format!("edge utility: {e}")))?;
        }
        let center = CenterModel::new(
            combiner.clone(),
            subnegotiations
                .iter()
                .map(|s| (s.space.clone(), s.center_utility.clone()))
                .collect(),
        )
        .map_err(|e| ScenarioError::invalid(None, e.to_string()))?;
        Ok(Self {
            id: id.into(),
            subnegotiations,
            combiner,
            metadata,
            center,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn subnegotiations(&self) -> &[Subnegotiation] {
        &self.subnegotiations
    }

    pub fn subnegotiation(&self, k: usize) -> &Subnegotiation {
        &self.subnegotiations[k]
    }

    pub fn edge_count(&self) -> usize {
        self.subnegotiations.len()
    }

    pub fn combiner(&self) -> &CenterCombiner {
        &self.combiner
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn center_model(&self) -> &CenterModel {
        &self.center
    }

    /// Expands a single-subnegotiation scenario into `n` identical sequential
    /// slots, one per edge.
    pub fn replicated(&self, n: usize) -> Result<Scenario, ScenarioError> {
        if self.subnegotiations.len() != 1 {
            return Err(ScenarioError::invalid(None, "only bilateral scenarios can be replicated"));
        }
        if n == 0 {
            return Err(ScenarioError::invalid(None, "at least one edge is required"));
        }
        let mut metadata = self.metadata.clone();
        metadata.insert("replicated_from".into(), self.id.clone());
        Scenario::new(
            format!("{}x{n}", self.id),
            vec![self.subnegotiations[0].clone(); n],
            self.combiner.clone(),
            metadata,
        )
    }
}
