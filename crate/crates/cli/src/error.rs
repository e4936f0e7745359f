use std::fmt;
use std::path::Path;

/// A failed command together with the process exit code it maps to.
///
/// Usage and input errors exit with 1, filesystem and network errors with 2.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    pub const USAGE: i32 = 1;
    pub const IO: i32 = 2;

    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { code: Self::USAGE, error: error.into() }
    }

    pub fn io(path: &Path, error: std::io::Error) -> Self {
        Self { code: Self::IO, error: anyhow::Error::new(error).context(format!("cannot write {}", path.display())) }
    }

    pub fn read(path: &Path, error: std::io::Error) -> Self {
        Self { code: Self::IO, error: anyhow::Error::new(error).context(format!("cannot read {}", path.display())) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for CliError {}
