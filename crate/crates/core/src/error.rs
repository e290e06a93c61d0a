use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("horizon {horizon} is shorter than the longest job span {span}")]
    HorizonTooShort { horizon: u32, span: u32 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("name collision after sanitization: {0:?} and {1:?} both map to {2:?}")]
    NameCollision(String, String, String),

    #[error("solver backend: {0}")]
    Backend(String),

    #[error("relaxation is {0}")]
    Relaxation(String),

    #[error("flow audit failed: {0}")]
    Audit(String),

    #[error("instance has {n} jobs, oracle cap is {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("schedule: {0}")]
    Schedule(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
