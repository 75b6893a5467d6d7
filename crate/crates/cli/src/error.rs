use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {msg}")]
    Input { path: String, msg: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] jsrlab_core::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn input(path: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Input {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Process exit status of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Budget ran out; the partial report was still written.
    Incomplete,
    /// A hard assertion (explicit constant or residual) failed.
    Violation,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Incomplete => 2,
            Status::Violation => 3,
        }
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: Status) -> Status {
        if self.code() >= other.code() {
            self
        } else {
            other
        }
    }
}

/// Exit code for errors: usage and input problems.
pub const ERROR_EXIT: u8 = 1;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!([Status::Success.code(), Status::Incomplete.code(), Status::Violation.code()], [0, 2, 3]);
        assert_eq!(Status::Incomplete.worst(Status::Violation), Status::Violation);
        assert_eq!(Status::Incomplete.worst(Status::Success), Status::Incomplete);
    }
}
