use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point id {id} out of range for a space with {len} points")]
    InvalidPoint { id: usize, len: usize },

    #[error("capacity exceeded: {what} is {needed}, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    /// A witness search exhausted its candidates at some stage.
    #[error("no witness found: {0}")]
    NoWitness(String),

    #[error("target not achieved: {0}")]
    NotAchieved(String),

    #[error("generator failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("injectivity radius {radius} too small (need > {needed}); first adequate level: {suggestion}")]
    Injectivity {
        radius: u32,
        needed: u32,
        suggestion: String,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
