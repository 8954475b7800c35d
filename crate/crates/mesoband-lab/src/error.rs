use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] mesoband::Error),
    #[error("LAPACK {routine} returned info = {info}")]
    Lapack { routine: &'static str, info: i32 },
    #[error("{0}")]
    Estimate(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("malformed {what}: {msg}")]
    Format { what: &'static str, msg: String },
    #[error("stage `{stage}` failed: {source}")]
    Stage { stage: &'static str, source: Box<LabError> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

impl LabError {
    pub(crate) fn format(what: &'static str, msg: impl Into<String>) -> Self {
        Self::Format { what, msg: msg.into() }
    }
}

/// Tags an error with the pipeline stage it came from.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T, E: Into<LabError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| LabError::Stage { stage, source: Box::new(e.into()) })
    }
}
