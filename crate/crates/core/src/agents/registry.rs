//! String-addressable strategies: `name[:key=value]*`, e.g. `contingent:p=0.8:tau=0.1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::agents::{Acceptor, ChildWeighting, ConcessionSchedule, Conceder, FaultMode, Faulty, RandomAgent, TreeSearchConfig};
use crate::protocol::Agent;

pub const STRATEGIES: &[&str] = &["conceder", "contingent", "optimistic", "random", "acceptor", "faulty"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("strategy `{strategy}` has no parameter `{param}`")]
    UnknownParam { strategy: String, param: String },
    #[error("bad value `{value}` for `{param}`: {reason}")]
    BadValue { param: String, value: String, reason: String },
    #[error("malformed agent spec `{0}`")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentSpec {
    pub strategy: String,
    pub params: BTreeMap<String, String>,
}

impl AgentSpec {
    pub fn new(strategy: impl Into<String>) -> Self {
        Self {
            strategy: strategy.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn build(&self) -> Result<Box<dyn Agent>, RegistryError> {
        build(self)
    }

    /// Parses a comma-separated lineup.
    pub fn parse_list(s: &str) -> Result<Vec<AgentSpec>, RegistryError> {
        s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.strategy)?;
        for (k, v) in &self.params {
            write!(f, ":{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for AgentSpec {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().split(':');
        let strategy = parts.next().unwrap_or_default().trim();
        if strategy.is_empty() {
            return Err(RegistryError::Malformed(s.into()));
        }
        let mut spec = AgentSpec::new(strategy);
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| RegistryError::Malformed(s.into()))?;
            spec.params.insert(k.trim().into(), v.trim().into());
        }
        Ok(spec)
    }
}

struct Params<'a> {
    spec: &'a AgentSpec,
    allowed: &'static [&'static str],
}

impl Params<'_> {
    fn check(&self) -> Result<(), RegistryError> {
        match self.spec.params.keys().find(|k| !self.allowed.contains(&k.as_str())) {
            Some(k) => Err(RegistryError::UnknownParam {
                strategy: self.spec.strategy.clone(),
                param: k.clone(),
            }),
            None => Ok(()),
        }
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, RegistryError>
    where
        T::Err: fmt::Display,
    {
        match self.spec.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e: T::Err| RegistryError::BadValue {
                param: key.into(),
                value: v.clone(),
                reason: e.to_string(),
            }),
        }
    }

    fn schedule(&self) -> Result<ConcessionSchedule, RegistryError> {
        let d = ConcessionSchedule::default();
        ConcessionSchedule::new(
            self.get("u_min", d.u_min())?,
            self.get("u_max", d.u_max())?,
            self.get("e", d.exponent())?,
        )
        .map_err(|e| RegistryError::BadValue {
            param: "schedule".into(),
            value: self.spec.to_string(),
            reason: e.to_string(),
        })
    }

    fn tree(&self) -> Result<TreeSearchConfig, RegistryError> {
        let d = TreeSearchConfig::default();
        let weighting = match self.spec.params.get("weights").map(String::as_str) {
            None | Some("ev") => ChildWeighting::SubtreeValue,
            Some("side") => ChildWeighting::SideUtility,
            Some(other) => {
                return Err(RegistryError::BadValue {
                    param: "weights".into(),
                    value: other.into(),
                    reason: "expected `ev` or `side`".into(),
                })
            }
        };
        let cfg = TreeSearchConfig {
            depth_limit: self.get("depth", d.depth_limit)?,
            temperature: self.get("tau", d.temperature)?,
            branching_cap: self.get("k", d.branching_cap)?,
            deal_prior: self.get("p", d.deal_prior)?,
            node_budget: self.get("budget", d.node_budget)?,
            weighting,
        };
        cfg.validate().map_err(|e| RegistryError::BadValue {
            param: "tree".into(),
            value: self.spec.to_string(),
            reason: e.to_string(),
        })?;
        Ok(cfg)
    }
}

const SCHEDULE_KEYS: &[&str] = &["u_min", "u_max", "e"];
const TREE_KEYS: &[&str] = &["u_min", "u_max", "e", "depth", "tau", "k", "p", "budget", "weights"];

pub fn build(spec: &AgentSpec) -> Result<Box<dyn Agent>, RegistryError> {
    let params = |allowed| {
        let p = Params { spec, allowed };
        p.check().map(|_| p)
    };
    let name = spec.to_string();
    let agent: Box<dyn Agent> = match spec.strategy.as_str() {
        "conceder" => {
            let p = params(SCHEDULE_KEYS)?;
            Box::new(Conceder::new(name, p.schedule()?, crate::agents::Foresight::Pessimistic))
        }
        "contingent" => {
            let p = params(TREE_KEYS)?;
            Box::new(Conceder::new(name, p.schedule()?, crate::agents::Foresight::Contingent(p.tree()?)))
        }
        "optimistic" => {
            let p = params(SCHEDULE_KEYS)?;
            Box::new(Conceder::new(name, p.schedule()?, crate::agents::Foresight::Optimistic))
        }
        "random" => {
            params(&[])?;
            Box::new(RandomAgent::new())
        }
        "acceptor" => {
            params(&[])?;
            Box::new(Acceptor::new())
        }
        "faulty" => {
            let p = params(&["mode"])?;
            let mode = match p.get("mode", "illegal".to_string())?.as_str() {
                "illegal" => FaultMode::Illegal,
                "panic" => FaultMode::Panic,
                other => {
                    return Err(RegistryError::BadValue {
                        param: "mode".into(),
                        value: other.into(),
                        reason: "expected `illegal` or `panic`".into(),
                    })
                }
            };
            Box::new(Faulty::new(mode))
        }
        other => return Err(RegistryError::UnknownStrategy(other.into())),
    };
    Ok(agent)
}
