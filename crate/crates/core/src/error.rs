use alloc::string::String;

/// Errors raised by the laboratory's operations.
///
/// Callers that need to distinguish configuration mistakes from
/// computations that exceed the factorization reach can match on the
/// variant; the CLI maps them to different exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("`{name}` = {value} is beyond the supported reach {reach}")]
    OutOfReach {
        name: &'static str,
        value: u64,
        reach: u64,
    },

    #[error("missing correlation for index pair ({0}, {1})")]
    MissingPair(i64, i64),

    #[error("precondition `{clause}` failed: {detail}")]
    Precondition {
        clause: &'static str,
        detail: String,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn precondition(clause: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            clause,
            detail: detail.into(),
        }
    }

    /// True for errors caused by a value exceeding a computational reach.
    pub fn is_reach(&self) -> bool {
        matches!(self, Error::OutOfReach { .. })
    }
}
