use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input: unknown ids, bad indices, delay
    /// tables that are too short or decreasing.
    #[error("validation error: {0}")]
    Validation(String),

    /// The operation does not apply to this kind of game or potential.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The instance is well formed but the requested object does not exist
    /// (no perfect matching, a VCG pivot that cannot be computed, ...).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Exhaustive work would exceed the configured budget; nothing partial is
    /// returned.
    #[error("budget exceeded: {required} units needed, budget is {budget}")]
    Budget { required: u128, budget: u128 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
