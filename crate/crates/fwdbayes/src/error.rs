use std::path::PathBuf;

use serde::Serialize;

/// Errors surfaced by the batch runner, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config{}: {message}", field.as_deref().map(|f| format!(" field `{f}`")).unwrap_or_default())]
    Config { field: Option<String>, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("report has no `{0}` series")]
    MissingSeries(String),
    #[error(transparent)]
    Compute(fwdbayes_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit status for a run whose norm checks fail under `--strict`.
pub const EXIT_STRICT_FAILURE: i32 = 1;

/// Machine-readable error record written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub field: Option<String>,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Config { field: Some(field.into()), message: message.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::MissingSeries(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Compute(_) => 4,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (error, field) = match self {
            CliError::Config { field, .. } => ("config", field.clone()),
            CliError::Io { .. } => ("io", None),
            CliError::MissingSeries(_) => ("missing-series", None),
            CliError::Compute(_) => ("computation", None),
        };
        let message = match self {
            CliError::Config { message, .. } => message.clone(),
            other => other.to_string(),
        };
        ErrorRecord { error, field, message, exit_code: self.exit_code() }
    }
}

impl From<fwdbayes_core::Error> for CliError {
    fn from(e: fwdbayes_core::Error) -> Self {
        use fwdbayes_core::Error;
        match e {
            Error::Config { field, message } => CliError::Config { field: Some(field.into()), message },
            other => CliError::Compute(other),
        }
    }
}

/// Attributes a core error raised while building a config value to `field`.
pub(crate) fn in_field(field: &str) -> impl Fn(fwdbayes_core::Error) -> CliError + '_ {
    move |e| match e {
        fwdbayes_core::Error::Config { field, message } => CliError::Config { field: Some(field.into()), message },
        other => CliError::config(field, other),
    }
}
