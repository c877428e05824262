//! Round-robin tournaments over multi-deal negotiation scenarios: scheduling,
//! parallel execution, scoring, reports and offline analysis.

pub mod analyze;
pub mod config;
pub mod report;
pub mod run;
pub mod schedule;
pub mod score;

pub use config::{ConfigError, ScenarioSource, TournamentConfig};
pub use run::{run_tournament, Tournament, TournamentError};
pub use score::{score, ScoreRecord};
