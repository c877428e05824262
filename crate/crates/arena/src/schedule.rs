use multideal::seed::{derive_seed, rng_for};
use rand::seq::SliceRandom;

use crate::config::{ConfigError, TournamentConfig};

/// Seed-derivation tag for edge permutations.
const PERMUTE_TAG: u64 = 0xED6E;

/// One scheduled session; agents are indices into the config lineup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchStub {
    pub match_id: u64,
    pub scenario_index: usize,
    pub rep: u32,
    pub center: usize,
    pub edges: Vec<usize>,
    pub seed: u64,
}

/// For every scenario and repetition, each agent plays center exactly once
/// against a seed-determined permutation of the others, cycled to fill the
/// scenario's edge slots.
pub fn schedule_round_robin(config: &TournamentConfig, edge_counts: &[usize]) -> Result<Vec<MatchStub>, ConfigError> {
    let n = config.agents.len();
    if n < 2 {
        return Err(ConfigError::TooFewAgents(n));
    }
    if config.reps == 0 {
        return Err(ConfigError::NoRepetitions);
    }
    let mut stubs = Vec::with_capacity(edge_counts.len() * config.reps as usize * n);
    for (s, &n_edges) in edge_counts.iter().enumerate() {
        for rep in 0..config.reps {
            for center in 0..n {
                let path = [s as u64, u64::from(rep), center as u64];
                let mut others: Vec<usize> = (0..n).filter(|&a| a != center).collect();
                let mut rng = rng_for(config.master_seed, &[PERMUTE_TAG, path[0], path[1], path[2]]);
                others.shuffle(&mut rng);
                let edges = others.iter().copied().cycle().take(n_edges).collect();
                stubs.push(MatchStub {
                    match_id: stubs.len() as u64,
                    scenario_index: s,
                    rep,
                    center,
                    edges,
                    seed: derive_seed(config.master_seed, &path),
                });
            }
        }
    }
    Ok(stubs)
}
