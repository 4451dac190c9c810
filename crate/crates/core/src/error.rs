use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A reaction network is malformed or produced an invalid propensity.
    #[error("model definition error: {0}")]
    Model(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),

    /// Caller supplied data that violates an operation's preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was invoked on state that is not ready for it.
    #[error("state error: {0}")]
    State(String),

    #[error("arm selection error: {0}")]
    Selection(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),
}
