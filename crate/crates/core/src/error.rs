use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value space has no finite epsilon-net (not totally bounded)")]
    UnsupportedNet,
    #[error("value space exposes no dense sequence")]
    MissingDenseSequence,
    #[error("expert set is empty")]
    EmptyExperts,
    #[error("no active expert at time {0}")]
    NoActiveExpert(usize),
    #[error("corrupted learner state: {0}")]
    CorruptedState(String),
    #[error("no finite-time mean estimator available for this space")]
    MissingFtime,
    #[error("level learner construction failed for level {level}: {reason}")]
    LevelFactory { level: usize, reason: String },
    #[error("log-domain overflow: {0}")]
    Overflow(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("component mismatch: {0}")]
    ComponentMismatch(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}
