use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("code/instance mismatch: {0}")]
    Mismatch(String),

    /// The state space of an exhaustive pass exceeds the configured limit.
    #[error("exhaustive check too large: {size} evaluations (limit {limit})")]
    TooLarge { size: String, limit: String },

    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("bijection chain violated on branch {branch}: {relation} (messages {m1} and {m2})")]
    ChainViolated {
        branch: usize,
        relation: String,
        m1: u64,
        m2: u64,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("instance has no branch roles; expected a reduced instance")]
    NotReduced,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
