use std::fmt;
use std::path::Path;

use stable_rerank::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Data,
    Infeasible,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Data,
            message: message.into(),
        }
    }

    /// Wraps a library error, keeping its category and prefixing the file it
    /// came from.
    pub fn at(path: &Path, e: Error) -> Self {
        let mut out = Self::from(e);
        out.message = format!("{}: {}", path.display(), out.message);
        out
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Config => 1,
            Kind::Data => 2,
            Kind::Infeasible => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            Kind::Config => "configuration error",
            Kind::Data => "data error",
            Kind::Infeasible => "infeasible",
        };
        write!(f, "{label}: {}", self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::from_ref(&e)
    }
}

impl CliError {
    pub fn from_ref(e: &Error) -> Self {
        let kind = match e {
            Error::InvalidConfig(_) => Kind::Config,
            Error::InfeasibleCapacity { .. }
            | Error::ShortPreferenceList { .. }
            | Error::ExhaustedPreferences { .. } => Kind::Infeasible,
            _ => Kind::Data,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
