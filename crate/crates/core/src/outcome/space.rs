use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::OutcomeError;

/// One level of an issue. Integer levels carry their own numeric value,
/// labeled levels are valued by their position in the issue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Int(i64),
    Label(String),
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Int(v) => write!(f, "{v}"),
            Level::Label(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    name: String,
    values: Vec<Level>,
}

impl Issue {
    pub fn new(name: impl Into<String>, values: Vec<Level>) -> Result<Self, OutcomeError> {
        let name = name.into();
        if values.is_empty() {
            return Err(OutcomeError::EmptyIssue(name));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(OutcomeError::DuplicateLevel {
                    issue: name,
                    level: v.to_string(),
                });
            }
        }
        Ok(Self { name, values })
    }

    /// Integer issue with levels `lo..=hi`.
    pub fn integer_range(name: impl Into<String>, lo: i64, hi: i64) -> Result<Self, OutcomeError> {
        Self::new(name, (lo..=hi).map(Level::Int).collect())
    }

    pub fn labeled<S: AsRef<str>>(name: impl Into<String>, labels: &[S]) -> Result<Self, OutcomeError> {
        Self::new(
            name,
            labels.iter().map(|s| Level::Label(s.as_ref().to_string())).collect(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[Level] {
        &self.values
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    /// Numeric value of the level at `index`.
    pub fn numeric(&self, index: usize) -> Option<i64> {
        self.values.get(index).map(|lv| match lv {
            Level::Int(v) => *v,
            Level::Label(_) => index as i64,
        })
    }
}

/// An agreement candidate: one level index per issue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(Vec<usize>);

impl Outcome {
    pub fn new(levels: Vec<usize>) -> Self {
        Self(levels)
    }

    pub fn levels(&self) -> &[usize] {
        &self.0
    }

    pub fn into_levels(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for Outcome {
    fn from(levels: Vec<usize>) -> Self {
        Self(levels)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

/// Discrete multi-issue outcome space. Outcomes are enumerated in
/// lexicographic order over the issue list, the last issue varying fastest;
/// the position in that order is the outcome's canonical index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSpace {
    issues: Vec<Issue>,
}

impl OutcomeSpace {
    pub fn new(issues: Vec<Issue>) -> Result<Self, OutcomeError> {
        if issues.is_empty() {
            return Err(OutcomeError::NoIssues);
        }
        for (i, issue) in issues.iter().enumerate() {
            if issues[..i].iter().any(|o| o.name == issue.name) {
                return Err(OutcomeError::DuplicateIssue(issue.name.clone()));
            }
        }
        Ok(Self { issues })
    }

    pub fn issues(&self) -> &[Issue] {
        &self.issues
    }

    pub fn issue_index(&self, name: &str) -> Option<usize> {
        self.issues.iter().position(|i| i.name == name)
    }

    /// Number of outcomes, saturating at `u128::MAX`.
    pub fn cardinality(&self) -> u128 {
        self.issues
            .iter()
            .fold(1u128, |acc, i| acc.saturating_mul(i.cardinality() as u128))
    }

    /// Cardinality as `usize` when it is at most `cap`.
    pub fn bounded_len(&self, cap: u128) -> Result<usize, OutcomeError> {
        let n = self.cardinality();
        if n > cap {
            return Err(OutcomeError::Capacity { required: n, cap });
        }
        Ok(n as usize)
    }

    pub fn contains(&self, o: &Outcome) -> bool {
        o.0.len() == self.issues.len()
            && o.0.iter().zip(&self.issues).all(|(&l, i)| l < i.cardinality())
    }

    pub fn check(&self, o: &Outcome) -> Result<(), OutcomeError> {
        if self.contains(o) {
            Ok(())
        } else {
            Err(OutcomeError::OutOfSpace(o.clone()))
        }
    }

    /// Canonical index of `o`. Panics if `o` is not in the space.
    pub fn index_of(&self, o: &Outcome) -> usize {
        assert!(self.contains(o), "outcome {o} not in space");
        o.0.iter()
            .zip(&self.issues)
            .fold(0usize, |acc, (&l, i)| acc * i.cardinality() + l)
    }

    pub fn outcome_at(&self, mut index: usize) -> Outcome {
        let mut levels = vec![0; self.issues.len()];
        for (slot, issue) in levels.iter_mut().zip(&self.issues).rev() {
            *slot = index % issue.cardinality();
            index /= issue.cardinality();
        }
        assert!(index == 0, "index out of range");
        Outcome(levels)
    }

    pub fn enumerate(&self) -> Outcomes<'_> {
        Outcomes {
            space: self,
            next: Some(vec![0; self.issues.len()]),
        }
    }
}

/// Odometer iterator over an [`OutcomeSpace`] in canonical order.
#[derive(Debug, Clone)]
pub struct Outcomes<'a> {
    space: &'a OutcomeSpace,
    next: Option<Vec<usize>>,
}

impl Iterator for Outcomes<'_> {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for (pos, issue) in self.space.issues.iter().enumerate().rev() {
            succ[pos] += 1;
            if succ[pos] < issue.cardinality() {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(Outcome(current))
    }
}
