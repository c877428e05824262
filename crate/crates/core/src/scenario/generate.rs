//! Seeded scenario families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::outcome::{CenterCombiner, Issue, Level, OutcomeSpace, SideUtility};
use crate::scenario::{quantize, Scenario, ScenarioError, Subnegotiation};
use crate::seed::{rng_for, AgentRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// A job seeker negotiating days-off and salary with several employers;
    /// only the best offer counts.
    JobHunt,
    /// A buyer assembling a target quantity from several sellers.
    TargetQuantity,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::JobHunt => "jobhunt",
            Family::TargetQuantity => "targetqty",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jobhunt" => Ok(Family::JobHunt),
            "targetqty" => Ok(Family::TargetQuantity),
            other => Err(ScenarioError::Params(format!(
                "unknown family `{other}` (expected `jobhunt` or `targetqty`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n_edges: usize,
    pub seed: u64,
    /// Inclusive day-off range for job hunts.
    pub days: (i64, i64),
    pub salary_levels: usize,
    /// Target quantity `T`.
    pub target: u32,
    pub q_max: i64,
}

impl GenParams {
    pub fn new(n_edges: usize, seed: u64) -> Self {
        Self {
            n_edges,
            seed,
            ..Self::default()
        }
    }
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n_edges: 3,
            seed: 0,
            days: (0, 5),
            salary_levels: 10,
            target: 10,
            q_max: 10,
        }
    }
}

pub fn generate(family: Family, params: &GenParams) -> Result<Scenario, ScenarioError> {
    match family {
        Family::JobHunt => job_hunt(params),
        Family::TargetQuantity => target_quantity(params),
    }
}

/// Strictly increasing values from 0 to 1 with random positive steps.
fn monotone(rng: &mut AgentRng, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let steps: Vec<f64> = (1..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = steps.iter().sum();
    let mut acc = 0.0;
    let mut values = vec![0.0];
    for s in &steps[..steps.len() - 1] {
        acc += s;
        values.push(quantize(acc / total));
    }
    values.push(1.0);
    values
}

fn weights(rng: &mut AgentRng) -> Vec<f64> {
    let w = quantize(rng.gen_range(0.2..0.8));
    vec![w, quantize(1.0 - w)]
}

fn reversed(mut v: Vec<f64>) -> Vec<f64> {
    v.reverse();
    v
}

fn base_metadata(family: Family, params: &GenParams) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("family".to_string(), family.name().to_string()),
        ("seed".to_string(), params.seed.to_string()),
        ("n_edges".to_string(), params.n_edges.to_string()),
    ])
}

fn check_edges(params: &GenParams) -> Result<(), ScenarioError> {
    if params.n_edges == 0 {
        return Err(ScenarioError::Params("n_edges must be at least 1".into()));
    }
    Ok(())
}

/// Each employer gets its own salary grid; the seeker prefers fewer days and
/// more salary, the employer the reverse. Only the best deal counts.
pub fn job_hunt(params: &GenParams) -> Result<Scenario, ScenarioError> {
    check_edges(params)?;
    let (lo, hi) = params.days;
    if lo > hi {
        return Err(ScenarioError::Params(format!("empty day range {lo}..={hi}")));
    }
    if params.salary_levels < 2 {
        return Err(ScenarioError::Params("at least two salary levels are required".into()));
    }
    let days = Issue::integer_range("days", lo, hi).map_err(|e| ScenarioError::Params(e.to_string()))?;
    let mut subs = Vec::with_capacity(params.n_edges);
    for edge in 0..params.n_edges {
        let mut rng = rng_for(params.seed, &[edge as u64]);
        let base = 1000 * rng.gen_range(3..=6i64);
        let step = 100 * rng.gen_range(1..=5i64);
        let salary = Issue::new(
            "salary",
            (0..params.salary_levels as i64).map(|i| Level::Int(base + i * step)).collect(),
        )
        .map_err(|e| ScenarioError::Params(e.to_string()))?;
        let (n_days, n_salary) = (days.cardinality(), salary.cardinality());
        let space = OutcomeSpace::new(vec![days.clone(), salary]).map_err(|e| ScenarioError::invalid(Some(edge), e.to_string()))?;
        let center = SideUtility::linear_additive(
            weights(&mut rng),
            vec![reversed(monotone(&mut rng, n_days)), monotone(&mut rng, n_salary)],
        );
        let employer = SideUtility::linear_additive(
            weights(&mut rng),
            vec![monotone(&mut rng, n_days), reversed(monotone(&mut rng, n_salary))],
        );
        subs.push(Subnegotiation {
            space,
            center_utility: center.map_err(|e| ScenarioError::invalid(Some(edge), e.to_string()))?,
            edge_utility: employer.map_err(|e| ScenarioError::invalid(Some(edge), e.to_string()))?,
        });
    }
    Scenario::new(
        format!("jobhunt-s{}-e{}", params.seed, params.n_edges),
        subs,
        CenterCombiner::MaxOfDeals,
        base_metadata(Family::JobHunt, params),
    )
}

/// Every seller offers quantities `0..=q_max`; the buyer's utility peaks
/// when the agreed quantities sum to `T`. Each seller has a random capacity
/// beyond which extra units are worth nothing to it.
pub fn target_quantity(params: &GenParams) -> Result<Scenario, ScenarioError> {
    check_edges(params)?;
    if params.q_max < 1 {
        return Err(ScenarioError::Params(format!("q_max must be at least 1, got {}", params.q_max)));
    }
    if params.target < 1 {
        return Err(ScenarioError::Params("target quantity must be at least 1".into()));
    }
    let target = params.target;
    let combiner = CenterCombiner::target_quantity(target, f64::from(target), "quantity")
        .map_err(|e| ScenarioError::Params(e.to_string()))?;
    let quantity = Issue::integer_range("quantity", 0, params.q_max).map_err(|e| ScenarioError::Params(e.to_string()))?;
    let space = OutcomeSpace::new(vec![quantity]).map_err(|e| ScenarioError::Params(e.to_string()))?;
    let span = i64::from(target).max(params.q_max) as f64;
    let center_table: BTreeMap<i64, f64> = (0..=params.q_max)
        .map(|q| (q, quantize((1.0 - (q - i64::from(target)).abs() as f64 / span).clamp(0.0, 1.0))))
        .collect();
    let mut subs = Vec::with_capacity(params.n_edges);
    for edge in 0..params.n_edges {
        let mut rng = rng_for(params.seed, &[edge as u64]);
        let capacity = rng.gen_range(1..=params.q_max);
        let seller: BTreeMap<i64, f64> = (0..=params.q_max)
            .map(|q| (q, quantize(q.min(capacity) as f64 / capacity as f64)))
            .collect();
        let invalid = |e: crate::error::OutcomeError| ScenarioError::invalid(Some(edge), e.to_string());
        subs.push(Subnegotiation {
            space: space.clone(),
            center_utility: SideUtility::quantity_table("quantity", center_table.clone()).map_err(invalid)?,
            edge_utility: SideUtility::quantity_table("quantity", seller).map_err(invalid)?,
        });
    }
    let mut metadata = base_metadata(Family::TargetQuantity, params);
    metadata.insert("target".into(), target.to_string());
    metadata.insert("q_max".into(), params.q_max.to_string());
    Scenario::new(
        format!("targetqty-s{}-e{}", params.seed, params.n_edges),
        subs,
        combiner,
        metadata,
    )
}
