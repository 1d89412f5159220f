//! Rating-collection service: sessions, honey-pot validity checks and exports
//! over a crash-safe event log.

pub mod config;
pub mod events;
pub mod http;
pub mod store;
pub mod study;

use std::path::{Path, PathBuf};

pub use config::ServiceConfig;
pub use events::{Demographics, DiscardScope, Event, ServedHoneyPot};
pub use http::{router, serve, AppState};
pub use store::{read_events, EventLog};
pub use study::{Ack, MatrixExport, NextUnit, Session, SessionInfo, Study, StudyOptions, UnitPayload, ValidityReport};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("corrupt event log: {0}")]
    Corrupt(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Conflict(String),
    #[error("unknown session")]
    UnknownSession,
    #[error("no valid ratings to export")]
    NoValidRatings,
    #[error("missing or wrong admin token")]
    Unauthorized,
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Bundle(#[from] cohesion_core::bundle::BundleError),
    #[error("{0}")]
    Internal(String),
}

impl ServiceError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        ServiceError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Client-side mistakes, as opposed to failures of the service or its storage.
    pub fn is_validation(&self) -> bool {
        match self {
            ServiceError::Validation(_) | ServiceError::Conflict(_) | ServiceError::Config(_) => true,
            ServiceError::Bundle(e) => e.is_validation(),
            _ => false,
        }
    }
}
