use std::io;

use thiserror::Error;

use crate::lattice::Cell;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {0} is not part of the pattern")]
    CellNotInPattern(Cell),

    #[error("a pattern needs at least one cell")]
    EmptyPattern,

    #[error("pattern has a duplicate cell at {0}")]
    DuplicateCell(Cell),

    #[error("pattern is not connected under 8-neighbour adjacency")]
    DisconnectedPattern,

    #[error("a single agent has no neighbours, so it has no valid local state")]
    SingletonPattern,

    #[error("invalid local state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("arithmetic overflow while counting combinations ({n_states} states, {n_agents} agents)")]
    CombinationOverflow { n_states: usize, n_agents: usize },

    #[error("search budget of {limit} expansions exceeded; result is inconclusive")]
    Inconclusive { limit: u64 },

    #[error("oracle enumeration refused: {n} agents exceeds the bound of {max}")]
    OracleBound { n: usize, max: usize },

    #[error("safety violation at step {step}: {what}")]
    SafetyViolation { step: u64, what: String },

    #[error("all agents are static but the pattern is not the desired one (step {step})")]
    SpuriousStaticPattern { step: u64 },

    #[error("pattern `{0}` is not verified unique for this behaviour; pass force to run anyway")]
    NotUnique(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 3 for an inconclusive search, 4 for a safety
    /// violation, 2 for every input or configuration error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconclusive { .. } => 3,
            Error::SafetyViolation { .. } | Error::SpuriousStaticPattern { .. } => 4,
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(Error::Inconclusive { limit: 5 }.exit_code(), 3);
        assert_eq!(Error::SafetyViolation { step: 1, what: "collision".into() }.exit_code(), 4);
        assert_eq!(Error::SpuriousStaticPattern { step: 1 }.exit_code(), 4);
        assert_eq!(Error::Config("x".into()).exit_code(), 2);
        assert_eq!(Error::EmptyPattern.exit_code(), 2);
    }
}
