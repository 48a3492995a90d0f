use std::fmt;

/// Pipeline failure, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or invalid configuration, or an unusable output directory.
    Config(String),
    /// A hypothesis on the coefficients does not hold.
    Assumption(String),
    /// A computation failed or a check did not pass.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Assumption(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// Maps a library error raised inside `stage`.
    pub fn from_lib(stage: &str, e: lvfront::Error) -> Self {
        match e {
            lvfront::Error::Assumption(_) => CliError::Assumption(format!("{stage}: {e}")),
            lvfront::Error::InvalidInput(_) => CliError::Config(format!("{stage}: {e}")),
            _ => CliError::Numerical(format!("{stage}: {e}")),
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Config(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Assumption(m) => write!(f, "assumption failure: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
