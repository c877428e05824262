use std::path::PathBuf;
use std::str::FromStr;

use multideal::agents::{AgentSpec, RegistryError};
use multideal::scenario::{generate, load_scenario_dir, Family, GenParams, Scenario, ScenarioError};
use multideal::seed::derive_seed;
use thiserror::Error;

/// Seed-derivation tag for generated scenarios.
const GEN_TAG: u64 = 0x5CE0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("a tournament needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("agent `{0}` appears twice in the lineup")]
    DuplicateAgent(String),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("parallelism must be at least 1")]
    NoWorkers,
    #[error("deadline must be at least 1 round")]
    ZeroDeadline,
    #[error("agent `{spec}`: {source}")]
    Agent { spec: String, source: RegistryError },
    #[error("scenario directory {} does not exist", .0.display())]
    MissingScenarioDir(PathBuf),
    #[error("no scenarios found in {}", .0.display())]
    EmptyScenarioDir(PathBuf),
    #[error("bad generator source `{0}` (expected family:count, e.g. jobhunt:10)")]
    GenSpec(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

impl ConfigError {
    /// Whether the failure came from the file system rather than the config itself.
    pub fn is_io(&self) -> bool {
        matches!(self, ConfigError::Scenario(ScenarioError::Io(_)) | ConfigError::MissingScenarioDir(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Generated { family: Family, count: usize, n_edges: usize },
    Directory(PathBuf),
}

impl ScenarioSource {
    /// Parses `family:count`.
    pub fn generated(spec: &str, n_edges: usize) -> Result<Self, ConfigError> {
        let bad = || ConfigError::GenSpec(spec.into());
        let (family, count) = spec.split_once(':').ok_or_else(bad)?;
        let family = Family::from_str(family).map_err(|_| bad())?;
        let count: usize = count.parse().map_err(|_| bad())?;
        if count == 0 || n_edges == 0 {
            return Err(bad());
        }
        Ok(ScenarioSource::Generated { family, count, n_edges })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TournamentConfig {
    pub agents: Vec<AgentSpec>,
    pub source: ScenarioSource,
    pub reps: u32,
    pub deadline: u32,
    pub master_seed: u64,
    pub jobs: usize,
}

impl TournamentConfig {
    pub fn new(agents: Vec<AgentSpec>, source: ScenarioSource) -> Self {
        Self {
            agents,
            source,
            reps: 1,
            deadline: multideal::protocol::DEFAULT_DEADLINE_ROUNDS,
            master_seed: 0,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.agents.len() < 2 {
            return Err(ConfigError::TooFewAgents(self.agents.len()));
        }
        if self.reps == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        if self.jobs == 0 {
            return Err(ConfigError::NoWorkers);
        }
        if self.deadline == 0 {
            return Err(ConfigError::ZeroDeadline);
        }
        for (i, spec) in self.agents.iter().enumerate() {
            if self.agents[..i].contains(spec) {
                return Err(ConfigError::DuplicateAgent(spec.to_string()));
            }
            spec.build().map_err(|source| ConfigError::Agent {
                spec: spec.to_string(),
                source,
            })?;
        }
        Ok(())
    }

    pub fn agent_names(&self) -> Vec<String> {
        self.agents.iter().map(ToString::to_string).collect()
    }

    pub fn load_scenarios(&self) -> Result<Vec<Scenario>, ConfigError> {
        match &self.source {
            ScenarioSource::Generated { family, count, n_edges } => (0..*count)
                .map(|i| {
                    let params = GenParams::new(*n_edges, derive_seed(self.master_seed, &[GEN_TAG, i as u64]));
                    Ok(generate(*family, &params)?)
                })
                .collect(),
            ScenarioSource::Directory(dir) => {
                if !dir.is_dir() {
                    return Err(ConfigError::MissingScenarioDir(dir.clone()));
                }
                let scenarios = load_scenario_dir(dir)?;
                if scenarios.is_empty() {
                    return Err(ConfigError::EmptyScenarioDir(dir.clone()));
                }
                Ok(scenarios)
            }
        }
    }
}
