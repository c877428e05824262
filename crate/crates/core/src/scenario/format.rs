//! Versioned JSON scenario files.
//!
//! Utility values are written as decimal strings. Every value is rounded to
//! 12 significant digits both when generated and when loaded, so a save/load
//! round trip reproduces the in-memory scenario bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::outcome::{CenterCombiner, Issue, Level, OutcomeSpace, SideUtility, WEIGHT_SUM_TOLERANCE};
use crate::scenario::{Scenario, ScenarioError, Subnegotiation};

pub const SCHEMA: &str = "multideal/1";

/// Tolerance the loader allows on linear-additive weight sums.
pub const FILE_WEIGHT_TOLERANCE: f64 = 1e-6;

/// Rounds to 12 significant digits.
pub fn quantize(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decimal(pub String);

impl Decimal {
    pub fn from_f64(x: f64) -> Self {
        Decimal(quantize(x).to_string())
    }

    fn value(&self, field: &str) -> Result<f64, String> {
        let v: f64 = self
            .0
            .trim()
            .parse()
            .map_err(|_| format!("{field}: `{}` is not a decimal number", self.0))?;
        if !v.is_finite() {
            return Err(format!("{field}: `{}` is not finite", self.0));
        }
        Ok(quantize(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: String,
    pub id: String,
    pub combiner: CombinerFile,
    pub subnegotiations: Vec<SubnegotiationFile>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CombinerFile {
    Max,
    TargetQuantity {
        #[serde(rename = "T")]
        target: u32,
        #[serde(rename = "s")]
        slope: Decimal,
        quantity_issue: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssueFile {
    pub name: String,
    pub values: Vec<Level>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssueValuation {
    pub issue: String,
    pub weight: Decimal,
    pub values: Vec<Decimal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilityFile {
    LinearAdditive { issues: Vec<IssueValuation> },
    QuantityTable { issue: String, table: Vec<(i64, Decimal)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubnegotiationFile {
    pub issues: Vec<IssueFile>,
    pub center_utility: UtilityFile,
    pub edge_utility: UtilityFile,
}

fn utility_file(space: &OutcomeSpace, u: &SideUtility) -> UtilityFile {
    match u {
        SideUtility::LinearAdditive { weights, valuations } => UtilityFile::LinearAdditive {
            issues: space
                .issues()
                .iter()
                .zip(weights.iter().zip(valuations))
                .map(|(issue, (w, vals))| IssueValuation {
                    issue: issue.name().to_string(),
                    weight: Decimal::from_f64(*w),
                    values: vals.iter().map(|v| Decimal::from_f64(*v)).collect(),
                })
                .collect(),
        },
        SideUtility::QuantityTable { issue, table } => UtilityFile::QuantityTable {
            issue: issue.clone(),
            table: table.iter().map(|(q, v)| (*q, Decimal::from_f64(*v))).collect(),
        },
    }
}

fn parse_utility(space: &OutcomeSpace, u: &UtilityFile, which: &str) -> Result<SideUtility, String> {
    match u {
        UtilityFile::LinearAdditive { issues } => {
            if issues.len() != space.issues().len() {
                return Err(format!(
                    "{which}: {} issue valuations for {} issues",
                    issues.len(),
                    space.issues().len()
                ));
            }
            let mut weights = Vec::with_capacity(issues.len());
            let mut valuations = Vec::with_capacity(issues.len());
            for (iv, issue) in issues.iter().zip(space.issues()) {
                if iv.issue != issue.name() {
                    return Err(format!(
                        "{which}: valuation for `{}` where issue `{}` was expected",
                        iv.issue,
                        issue.name()
                    ));
                }
                weights.push(iv.weight.value(&format!("{which}.{}.weight", iv.issue))?);
                valuations.push(
                    iv.values
                        .iter()
                        .map(|d| d.value(&format!("{which}.{}.values", iv.issue)))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            let sum: f64 = weights.iter().sum();
            if (sum - 1.0).abs() > FILE_WEIGHT_TOLERANCE {
                return Err(format!("{which}: weights sum to {sum}"));
            }
            // hand-written files often round weights; exact sums are left alone
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                weights.iter_mut().for_each(|w| *w = quantize(*w / sum));
            }
            SideUtility::linear_additive(weights, valuations).map_err(|e| format!("{which}: {e}"))
        }
        UtilityFile::QuantityTable { issue, table } => {
            let mut map = BTreeMap::new();
            for (q, d) in table {
                if map.insert(*q, d.value(&format!("{which}.table"))?).is_some() {
                    return Err(format!("{which}: quantity {q} listed twice"));
                }
            }
            SideUtility::quantity_table(issue.clone(), map).map_err(|e| format!("{which}: {e}"))
        }
    }
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        let combiner = match s.combiner() {
            CenterCombiner::MaxOfDeals => CombinerFile::Max,
            CenterCombiner::TargetQuantity {
                target,
                slope,
                quantity_issue,
            } => CombinerFile::TargetQuantity {
                target: *target,
                slope: Decimal::from_f64(*slope),
                quantity_issue: quantity_issue.clone(),
            },
        };
        ScenarioFile {
            schema: SCHEMA.into(),
            id: s.id().into(),
            combiner,
            subnegotiations: s
                .subnegotiations()
                .iter()
                .map(|sub| SubnegotiationFile {
                    issues: sub
                        .space
                        .issues()
                        .iter()
                        .map(|i| IssueFile {
                            name: i.name().into(),
                            values: i.values().to_vec(),
                        })
                        .collect(),
                    center_utility: utility_file(&sub.space, &sub.center_utility),
                    edge_utility: utility_file(&sub.space, &sub.edge_utility),
                })
                .collect(),
            metadata: s.metadata().clone(),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        if self.schema != SCHEMA {
            return Err(ScenarioError::Version {
                found: self.schema.clone(),
            });
        }
        let combiner = match &self.combiner {
            CombinerFile::Max => CenterCombiner::MaxOfDeals,
            CombinerFile::TargetQuantity {
                target,
                slope,
                quantity_issue,
            } => {
                let slope = slope.value("combiner.s").map_err(|e| ScenarioError::invalid(None, e))?;
                CenterCombiner::target_quantity(*target, slope, quantity_issue.clone())
                    .map_err(|e| ScenarioError::invalid(None, format!("combiner: {e}")))?
            }
        };
        let mut subs = Vec::with_capacity(self.subnegotiations.len());
        for (k, sf) in self.subnegotiations.iter().enumerate() {
            let invalid = |reason: String| ScenarioError::invalid(Some(k), reason);
            let issues = sf
                .issues
                .iter()
                .map(|i| Issue::new(i.name.clone(), i.values.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(e.to_string()))?;
            let space = OutcomeSpace::new(issues).map_err(|e| invalid(e.to_string()))?;
            let center_utility = parse_utility(&space, &sf.center_utility, "center_utility").map_err(invalid)?;
            let edge_utility = parse_utility(&space, &sf.edge_utility, "edge_utility").map_err(invalid)?;
            subs.push(Subnegotiation {
                space,
                center_utility,
                edge_utility,
            });
        }
        Scenario::new(self.id.clone(), subs, combiner, self.metadata.clone())
    }
}

fn parse_error(e: serde_json::Error) -> ScenarioError {
    ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Canonical pretty-printed JSON text of `s`.
pub fn scenario_to_string(s: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes");
    text.push('\n');
    text
}

pub fn scenario_from_str(text: &str) -> Result<Scenario, ScenarioError> {
    #[derive(Deserialize)]
    struct Probe {
        schema: Option<String>,
    }
    let probe: Probe = serde_json::from_str(text).map_err(parse_error)?;
    match probe.schema.as_deref() {
        Some(SCHEMA) => {}
        Some(other) => return Err(ScenarioError::Version { found: other.into() }),
        None => {
            return Err(ScenarioError::Parse {
                line: 1,
                column: 1,
                message: "missing field `schema`".into(),
            })
        }
    }
    let file: ScenarioFile = serde_json::from_str(text).map_err(parse_error)?;
    file.to_scenario()
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    fs::write(path, scenario_to_string(s))?;
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    scenario_from_str(&fs::read_to_string(path)?)
}

/// Loads every `*.json` file of `dir`, sorted by file name.
pub fn load_scenario_dir(dir: impl AsRef<Path>) -> Result<Vec<Scenario>, ScenarioError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(load_scenario).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
  "schema": "multideal/1",
  "id": "tiny",
  "combiner": { "kind": "max" },
  "subnegotiations": [
    {
      "issues": [ { "name": "x", "values": [0, 1] } ],
      "center_utility": { "kind": "linear_additive", "issues": [ { "issue": "x", "weight": "1", "values": ["0", "1"] } ] },
      "edge_utility": { "kind": "linear_additive", "issues": [ { "issue": "x", "weight": "1", "values": ["1", "0"] } ] }
    }
  ]
}"#;

    #[test]
    fn quantize_is_idempotent() {
        for x in [0.1, 1.0 / 3.0, 0.123456789012345, 1e-13, 0.0, 1.0] {
            let q = quantize(x);
            assert_eq!(quantize(q), q);
            assert_eq!(q.to_string().parse::<f64>().unwrap(), q);
        }
    }

    #[test]
    fn loads_minimal_file() {
        let s = scenario_from_str(TINY).unwrap();
        assert_eq!(s.id(), "tiny");
        assert_eq!(scenario_from_str(&scenario_to_string(&s)).unwrap(), s);
    }

    #[test]
    fn truncated_file_reports_position() {
        let err = scenario_from_str(&TINY[..TINY.len() / 2]).unwrap_err();
        match err {
            ScenarioError::Parse { line, column, .. } => assert!(line > 0 && column > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_schema_is_version_error() {
        let err = scenario_from_str(&TINY.replace("multideal/1", "multideal/9")).unwrap_err();
        assert!(matches!(err, ScenarioError::Version { found } if found == "multideal/9"));
    }

    #[test]
    fn bad_weight_sum_names_subnegotiation() {
        let bad = TINY.replacen(r#""weight": "1""#, r#""weight": "0.8""#, 1);
        let err = scenario_from_str(&bad).unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid { subnegotiation: Some(0), .. }));
        assert!(err.to_string().contains("subnegotiation 0"), "{err}");
        assert!(err.to_string().contains("0.8"), "{err}");
    }

    #[test]
    fn missing_field_names_it() {
        let err = scenario_from_str(&TINY.replace(r#""id": "tiny","#, "")).unwrap_err();
        assert!(err.to_string().contains("`id`"), "{err}");
    }
}
