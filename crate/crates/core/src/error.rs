use thiserror::Error;

use crate::mdp::Violation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Violation>),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("target set must be nonempty")]
    EmptyTarget,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource cap exceeded: {what} (limit {limit})")]
    ResourceCap { what: &'static str, limit: usize },
    #[error("not winning: {0}")]
    NotWinning(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
