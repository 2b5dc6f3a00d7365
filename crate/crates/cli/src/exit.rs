//! Process exit codes and the error that carries them.

use std::fmt;

pub const OK: u8 = 0;
pub const PARSE: u8 = 2;
pub const INVALID_DATA: u8 = 3;
pub const DEGENERATE_LEVEL: u8 = 4;
pub const CHECK_FAILED: u8 = 5;
pub const BUDGET: u8 = 6;

/// An error that ends the process with a specific exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}
