use alloc::string::String;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("no V2V peer available")]
    NoV2vPeer,

    #[error("coincident nodes")]
    CoincidentNodes,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("phase index {index} out of range for {levels} levels")]
    PhaseIndex { index: usize, levels: usize },

    #[error("negative power: {0}")]
    NegativePower(f64),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("environment has not been reset")]
    NotReset,

    #[error("episode already finished")]
    EpisodeDone,

    #[error("episode has {slots} slots but window is {window}")]
    WindowLongerThanEpisode { slots: usize, window: usize },

    #[error("nothing to aggregate")]
    Empty,

    #[error("timestamps not increasing for vehicle {vehicle}")]
    TimestampsNotIncreasing { vehicle: u64 },

    #[error("requested {requested} trajectories but only {available} available")]
    NotEnoughTrajectories { requested: usize, available: usize },
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}
