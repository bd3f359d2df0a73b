//! Synchronizing objectives in Markov decision processes.
//!
//! The crate decides sure, almost-sure and limit-sure winning for always and
//! eventually synchronizing objectives, synthesizes validated witness
//! strategies, and ships a small library of one-letter alternating automata.
//! All probabilities are exact rationals.

pub mod afa;
pub mod decide;
pub mod error;
pub mod format;
pub mod gen;
pub mod lasso;
pub mod mdp;
pub mod oracle;
pub mod rational;
pub mod set;
pub mod strategy;

pub use decide::{classify, Mode, Objective, SyncFunction, TargetSpec, Verdict};
pub use error::{Error, Result};
pub use lasso::Lasso;
pub use mdp::{ActionId, Distribution, Mdp, StateId};
pub use rational::Rational;
pub use set::StateSet;

/// Resource guards for the exponential parts of the algorithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Longest set sequence explored before a lasso must close.
    pub max_lasso_iterations: usize,
    /// Largest model on which the almost-sure decider enumerates subsets.
    pub max_subset_states: usize,
    /// Longest forward simulation during limit-sure synthesis.
    pub max_sim_steps: usize,
    /// Largest model accepted by the brute-force oracles.
    pub max_oracle_states: usize,
    /// Number of counting strategies the bounded oracle may enumerate.
    pub enumeration_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_lasso_iterations: 1_000_000,
            max_subset_states: 20,
            max_sim_steps: 10_000,
            max_oracle_states: 12,
            enumeration_budget: 1_000_000,
        }
    }
}
