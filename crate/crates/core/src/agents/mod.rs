//! Baseline strategies for the three future-deal archetypes (pessimistic,
//! contingent, optimistic) plus random, accepting and faulty agents.

mod concession;
mod registry;
mod softmax;
mod strategies;
mod tree;

pub use concession::{concession_target, ConcessionSchedule};
pub use registry::{build, AgentSpec, RegistryError, STRATEGIES};
pub use softmax::softmax;
pub use strategies::{
    conceder_decision, contingent_act, next_bid, optimistic_act, pessimistic_conceder_act, random_act, valuations,
    Acceptor, Conceder, Decision, FaultMode, Faulty, Foresight, RandomAgent,
};
pub use tree::{expected_utility_tree, tree_values, ChildWeighting, TreeSearchConfig};
