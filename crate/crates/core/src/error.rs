use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Invalid rule set, search parameters or budget.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was called in a phase or context that does not allow it.
    #[error("protocol error: {0}")]
    Protocol(String),
    /// The action itself is not legal in the current state.
    #[error("illegal action: {0}")]
    IllegalAction(String),
    /// No hidden-tile assignment is consistent with an observation.
    #[error("inconsistent observation: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
