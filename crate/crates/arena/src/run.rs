use std::sync::Arc;

use multideal::agents::AgentSpec;
use multideal::protocol::{run_session, Agent};
use multideal::record::MatchRecord;
use multideal::scenario::Scenario;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, TournamentConfig};
use crate::schedule::{schedule_round_robin, MatchStub};

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("match {match_id}: {reason}")]
    Match { match_id: u64, reason: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone)]
pub struct Tournament {
    pub config: TournamentConfig,
    pub scenarios: Vec<Arc<Scenario>>,
    pub matches: Vec<MatchRecord>,
}

fn build(spec: &AgentSpec) -> Box<dyn Agent> {
    spec.build().expect("lineup validated before scheduling")
}

pub fn run_match(
    config: &TournamentConfig,
    scenario: &Arc<Scenario>,
    stub: &MatchStub,
) -> Result<MatchRecord, TournamentError> {
    let fail = |reason: String| TournamentError::Match {
        match_id: stub.match_id,
        reason,
    };
    let mut center = build(&config.agents[stub.center]);
    let mut edges: Vec<Box<dyn Agent>> = stub.edges.iter().map(|&e| build(&config.agents[e])).collect();
    let result = run_session(center.as_mut(), &mut edges, scenario, config.deadline, stub.seed)
        .map_err(|e| fail(e.to_string()))?;
    MatchRecord::new(
        stub.match_id,
        scenario,
        stub.scenario_index,
        stub.rep,
        config.agents[stub.center].to_string(),
        stub.edges.iter().map(|&e| config.agents[e].to_string()).collect(),
        stub.seed,
        config.deadline,
        result,
    )
    .map_err(|e| fail(e.to_string()))
}

/// Runs every stub on a pool of `config.jobs` workers. Records come back in
/// match-id order whatever the parallelism.
pub fn run_matches(
    config: &TournamentConfig,
    scenarios: &[Arc<Scenario>],
    stubs: &[MatchStub],
) -> Result<Vec<MatchRecord>, TournamentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| TournamentError::Pool(e.to_string()))?;
    let mut records: Vec<MatchRecord> = pool.install(|| {
        stubs
            .par_iter()
            .map(|stub| run_match(config, &scenarios[stub.scenario_index], stub))
            .collect::<Result<_, _>>()
    })?;
    records.sort_by_key(|r| r.match_id);
    Ok(records)
}

pub fn run_tournament(config: &TournamentConfig) -> Result<Tournament, TournamentError> {
    config.validate()?;
    let scenarios: Vec<Arc<Scenario>> = config.load_scenarios()?.into_iter().map(Arc::new).collect();
    let edge_counts: Vec<usize> = scenarios.iter().map(|s| s.edge_count()).collect();
    let stubs = schedule_round_robin(config, &edge_counts)?;
    log::info!(
        "{} agents, {} scenarios, {} reps: {} matches on {} workers",
        config.agents.len(),
        scenarios.len(),
        config.reps,
        stubs.len(),
        config.jobs
    );
    let matches = run_matches(config, &scenarios, &stubs)?;
    Ok(Tournament {
        config: config.clone(),
        scenarios,
        matches,
    })
}
