//! Scenarios: model, versioned file format, generators and pilot templates.

mod format;
mod generate;
mod model;
mod templates;

use thiserror::Error;

pub use format::{
    load_scenario, load_scenario_dir, quantize, save_scenario, scenario_from_str, scenario_to_string, CombinerFile,
    Decimal, IssueFile, IssueValuation, ScenarioFile, SubnegotiationFile, UtilityFile, FILE_WEIGHT_TOLERANCE, SCHEMA,
};
pub use generate::{generate, job_hunt, target_quantity, Family, GenParams};
pub use model::{Scenario, Subnegotiation};
pub use templates::{pilot_template, pilot_templates, TEMPLATE_NAMES};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{}{reason}", subnegotiation.map(|k| format!("subnegotiation {k}: ")).unwrap_or_default())]
    Invalid {
        subnegotiation: Option<usize>,
        reason: String,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported scenario schema `{found}`, expected `{SCHEMA}`")]
    Version { found: String },
    #[error("generator parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    pub fn invalid(subnegotiation: Option<usize>, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            subnegotiation,
            reason: reason.into(),
        }
    }
}
