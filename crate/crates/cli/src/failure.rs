//! Error classification into process exit codes.

use std::fmt::{self, Display};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Data,
    NotConverged,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Data,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self.kind {
            Kind::Usage => 2,
            Kind::Data => 3,
            Kind::NotConverged => 4,
        })
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<pixent::Error> for Failure {
    fn from(e: pixent::Error) -> Self {
        let kind = match e {
            pixent::Error::NotConverged(_) => Kind::NotConverged,
            _ => Kind::Data,
        };
        Failure {
            kind,
            message: e.to_string(),
        }
    }
}

/// Attaches context and classifies library, I/O and parse errors.
pub trait ResultExt<T> {
    fn data(self, context: impl Display) -> Result<T, Failure>;
}

impl<T, E> ResultExt<T> for Result<T, E>
where
    E: Into<anyhow::Error>,
{
    fn data(self, context: impl Display) -> Result<T, Failure> {
        self.map_err(|e| {
            let e: anyhow::Error = e.into();
            let kind = match e.downcast_ref::<pixent::Error>() {
                Some(pixent::Error::NotConverged(_)) => Kind::NotConverged,
                _ => Kind::Data,
            };
            Failure {
                kind,
                message: format!("{context}: {e}"),
            }
        })
    }
}
