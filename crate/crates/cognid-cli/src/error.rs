//! Process-level error classification: configuration problems exit with
//! code 3, data problems with code 2.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or flags; exit code 3.
    Config(String),
    /// Unreadable, malformed, or inconsistent input data; exit code 2.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Data(_) => 2,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cognid::wordlist::WordlistError> for CliError {
    fn from(e: cognid::wordlist::WordlistError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cognid::subseq::SubseqError> for CliError {
    fn from(e: cognid::subseq::SubseqError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cognid::strsim::StrsimError> for CliError {
    fn from(e: cognid::strsim::StrsimError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cognid::classifier::ClassifierError> for CliError {
    fn from(e: cognid::classifier::ClassifierError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cognid::eval::EvalError> for CliError {
    fn from(e: cognid::eval::EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cognid::phylo::PhyloError> for CliError {
    fn from(e: cognid::phylo::PhyloError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cognid::features::DumpError> for CliError {
    fn from(e: cognid::features::DumpError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Attaches the file path to an I/O failure.
pub fn io_data(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}
