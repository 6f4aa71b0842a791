use num_bigint::BigUint;
use thiserror::Error;

use crate::equilibrium::DeviationWitness;
use crate::game::Format;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown agent index {0}")]
    UnknownAgent(usize),

    #[error("agent {agent}: unknown type index {index}")]
    UnknownType { agent: usize, index: usize },

    #[error("agent {agent}: unknown strategy index {index}")]
    UnknownStrategy { agent: usize, index: usize },

    #[error("unknown outcome index {0}")]
    UnknownOutcome(usize),

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("malformed input: {0}")]
    Shape(String),

    #[error("agent {agent}: type {type_index} has zero marginal probability")]
    ZeroMarginal { agent: usize, type_index: usize },

    #[error("search space of {size} candidate profiles exceeds cap {cap}")]
    SearchSpace { size: BigUint, cap: u64 },

    #[error("{expected}-format mechanism required, found {found}-format")]
    Format { expected: Format, found: Format },

    #[error("profile is not a Bayesian Nash equilibrium: {0}")]
    NotEquilibrium(Box<DeviationWitness>),

    #[error("agent {agent}: deception fixes type {type_index} (a false report must differ from the true type)")]
    DeceptionFixedPoint { agent: usize, type_index: usize },

    #[error("agent {agent} has a single type, so no false report exists")]
    SingleType { agent: usize },

    #[error("failed to start worker pool: {0}")]
    WorkerPool(String),
}
