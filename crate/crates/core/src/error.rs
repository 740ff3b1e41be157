use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative milliCPU quantity: {0}")]
    NegativeQuantity(i64),

    #[error("invalid microservice spec `{name}`: {reason}")]
    InvalidSpec { name: String, reason: String },

    #[error("invalid SLA for `{name}`: {reason}")]
    InvalidSla { name: String, reason: String },

    #[error("duplicate microservice `{0}`")]
    DuplicateService(String),

    #[error("no spec registered for microservice `{0}`")]
    MissingSpec(String),

    #[error("no balancer row for microservice `{0}`")]
    MissingFeasibility(String),

    #[error("plan targets unknown microservice `{0}`")]
    UnknownService(String),

    #[error("time {t}s outside load profile of {total}s")]
    TimeOutOfRange { t: u64, total: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("run `{0}` is not registered")]
    UnknownRun(String),

    #[error("run `{0}` is already registered")]
    RunExists(String),

    #[error("run `{0}` is closed")]
    RunClosed(String),

    #[error("run `{0}` is still open")]
    RunOpen(String),

    #[error("empty snapshot series")]
    EmptySeries,

    #[error("non-uniform sampling at t={0}s")]
    NonUniformSampling(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
