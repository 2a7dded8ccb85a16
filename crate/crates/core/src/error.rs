//! Error types shared across the simulator.

use std::fmt;
use std::io;

/// A single named validation failure, e.g. `coherent-width-exceeded`.
///
/// The `code` is a stable kebab-case identifier that callers (and the CLI
/// exit-code contract) can match on; `detail` is human-readable context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: String,
    pub detail: String,
}

impl Violation {
    pub fn new(code: &str, detail: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

#[derive(Debug)]
pub enum Error {
    /// Malformed input text; `line` is 1-based.
    Parse { line: usize, msg: String },
    /// A numeric argument outside the operation's domain.
    Domain(String),
    /// One or more named validation failures.
    Validation(Vec<Violation>),
    Io(io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn validation(code: &str, detail: impl Into<String>) -> Self {
        Error::Validation(vec![Violation::new(code, detail)])
    }

    /// Violation codes carried by this error (empty unless `Validation`).
    pub fn violation_codes(&self) -> Vec<&str> {
        match self {
            Error::Validation(v) => v.iter().map(|x| x.code.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Validation(list) => {
                write!(f, "validation failed: ")?;
                for (i, v) in list.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
