use std::fmt;
use std::path::Path;

/// Failure of one invocation, classified by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed arguments or input files (exit 2).
    Parse(String),
    /// Rejected by the physics or validation layer (exit 3).
    Physics(phononet::Error),
    /// Reading or writing files failed (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<phononet::Error> for CliError {
    fn from(e: phononet::Error) -> Self {
        if e.is_parse() {
            CliError::Parse(e.to_string())
        } else {
            CliError::Physics(e)
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
