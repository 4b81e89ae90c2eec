use rscc_core::RsccError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] RsccError),
    #[error("{0}")]
    Usage(String),
    #[error("scenario file: {0}")]
    Ini(#[from] ini::ParseError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(RsccError::ResourceCap { .. }) => EXIT_RESOURCE,
            CliError::Acceptance { .. } => EXIT_ACCEPTANCE,
            _ => EXIT_INVALID,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
