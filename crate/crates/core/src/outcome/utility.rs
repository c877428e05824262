use std::collections::BTreeMap;

use crate::error::OutcomeError;
use crate::outcome::{Outcome, OutcomeSpace};

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// One party's preference over a single subnegotiation's outcomes.
#[derive(Debug, Clone, PartialEq)]
pub enum SideUtility {
    /// `u(o) = Σ wᵢ · vᵢ(oᵢ)`; `valuations[i][level]` is issue `i`'s value table.
    LinearAdditive {
        weights: Vec<f64>,
        valuations: Vec<Vec<f64>>,
    },
    /// `u(o) = table[q]` where `q` is the numeric level of `issue`.
    QuantityTable {
        issue: String,
        table: BTreeMap<i64, f64>,
    },
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl SideUtility {
    pub fn linear_additive(weights: Vec<f64>, valuations: Vec<Vec<f64>>) -> Result<Self, OutcomeError> {
        if weights.len() != valuations.len() {
            return Err(OutcomeError::MalformedUtility(format!(
                "{} weights for {} valuation tables",
                weights.len(),
                valuations.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !unit(**w)) {
            return Err(OutcomeError::MalformedUtility(format!("weight {w} outside [0,1]")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(OutcomeError::MalformedUtility(format!("weights sum to {sum}")));
        }
        for (i, table) in valuations.iter().enumerate() {
            if let Some(v) = table.iter().find(|v| !unit(**v)) {
                return Err(OutcomeError::MalformedUtility(format!(
                    "issue {i} valuation {v} outside [0,1]"
                )));
            }
        }
        Ok(SideUtility::LinearAdditive { weights, valuations })
    }

    pub fn quantity_table(issue: impl Into<String>, table: BTreeMap<i64, f64>) -> Result<Self, OutcomeError> {
        if let Some((q, v)) = table.iter().find(|(_, v)| !unit(**v)) {
            return Err(OutcomeError::MalformedUtility(format!(
                "quantity {q} valued {v}, outside [0,1]"
            )));
        }
        Ok(SideUtility::QuantityTable {
            issue: issue.into(),
            table,
        })
    }

    /// Checks that the utility is defined on every outcome of `space`.
    pub fn validate_for(&self, space: &OutcomeSpace) -> Result<(), OutcomeError> {
        match self {
            SideUtility::LinearAdditive { valuations, .. } => {
                if valuations.len() != space.issues().len() {
                    return Err(OutcomeError::MalformedUtility(format!(
                        "{} valuation tables for {} issues",
                        valuations.len(),
                        space.issues().len()
                    )));
                }
                for (table, issue) in valuations.iter().zip(space.issues()) {
                    if table.len() != issue.cardinality() {
                        return Err(OutcomeError::MalformedUtility(format!(
                            "issue `{}` has {} levels but {} valuations",
                            issue.name(),
                            issue.cardinality(),
                            table.len()
                        )));
                    }
                }
                Ok(())
            }
            SideUtility::QuantityTable { issue, table } => {
                let idx = space.issue_index(issue).ok_or_else(|| {
                    OutcomeError::MalformedUtility(format!("no issue named `{issue}`"))
                })?;
                let iss = &space.issues()[idx];
                for level in 0..iss.cardinality() {
                    let q = iss.numeric(level).unwrap_or_default();
                    if !table.contains_key(&q) {
                        return Err(OutcomeError::MalformedUtility(format!(
                            "no table entry for quantity {q}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, space: &OutcomeSpace, o: &Outcome) -> Result<f64, OutcomeError> {
        space.check(o)?;
        match self {
            SideUtility::LinearAdditive { weights, valuations } => {
                let mut total = 0.0;
                for (i, &level) in o.levels().iter().enumerate() {
                    let v = valuations
                        .get(i)
                        .and_then(|t| t.get(level))
                        .ok_or_else(|| {
                            OutcomeError::MalformedUtility(format!("no valuation for issue {i} level {level}"))
                        })?;
                    total += weights[i] * v;
                }
                Ok(total.clamp(0.0, 1.0))
            }
            SideUtility::QuantityTable { issue, table } => {
                let idx = space.issue_index(issue).ok_or_else(|| {
                    OutcomeError::MalformedUtility(format!("no issue named `{issue}`"))
                })?;
                let q = space.issues()[idx]
                    .numeric(o.levels()[idx])
                    .unwrap_or_default();
                table.get(&q).copied().ok_or_else(|| {
                    OutcomeError::MalformedUtility(format!("no table entry for quantity {q}"))
                })
            }
        }
    }

    /// Values of every outcome in canonical order.
    pub fn table(&self, space: &OutcomeSpace, cap: u128) -> Result<Vec<f64>, OutcomeError> {
        space.bounded_len(cap)?;
        space.enumerate().map(|o| self.eval(space, &o)).collect()
    }
}
