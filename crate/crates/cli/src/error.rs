use std::io;

use thiserror::Error;

/// Failure of a subcommand, mapped onto a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Capability(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Capability(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Capability(_) => "capability",
        }
    }

    /// One line of JSON: `{"error":"config","code":2,"message":"..."}`.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl From<kcore_core::Error> for CliError {
    fn from(e: kcore_core::Error) -> Self {
        match e {
            kcore_core::Error::Validation(m) => CliError::Config(m),
            kcore_core::Error::Capability(m) => CliError::Capability(m),
            kcore_core::Error::Io(e) => CliError::Io(e.to_string()),
            kcore_core::Error::Parse(e) => CliError::Config(format!("kernel file: {e}")),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(format!("csv: {e}")),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
