use std::io;

use orbitlab_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("`{name}` = {value} exceeds the supported reach {reach}")]
    Reach {
        name: String,
        value: u64,
        reach: u64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Reach { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument { name, reason } => CliError::config(name, reason),
            CoreError::OutOfReach { name, value, reach } => CliError::Reach {
                name: name.into(),
                value,
                reach,
            },
            CoreError::MissingPair(m1, m2) => {
                CliError::config("K", format!("no correlation for ({m1}, {m2})"))
            }
            CoreError::Precondition { clause, detail } => CliError::config(clause, detail),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
