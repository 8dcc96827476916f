use std::fmt;
use std::path::Path;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// A failure reported to the user as one `ERROR <CODE>: message` line.
#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.to_string(),
            message: message.into(),
            exit: EXIT_VALIDATION,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            exit: EXIT_USAGE,
            ..CliError::new("USAGE", message)
        }
    }

    pub fn config(path: &Path, message: impl fmt::Display) -> Self {
        CliError::new("CONFIG", format!("{}: {message}", path.display()))
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::new("IO", format!("{}: {err}", path.display()))
    }
}

impl From<gstsim_core::Error> for CliError {
    fn from(e: gstsim_core::Error) -> Self {
        CliError {
            code: e.code().to_string(),
            message: e.to_string(),
            exit: if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_VALIDATION
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message: Vec<&str> = self.message.split_whitespace().collect();
        write!(f, "ERROR {}: {}", self.code, message.join(" "))
    }
}

pub type CliResult<T> = Result<T, CliError>;
