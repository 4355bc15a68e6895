//! Append-only usage-event log with document snapshots, plus the model
//! artifact directory.

mod event;
mod log;
mod models;

pub use event::{EventKind, ModelVersionPair, NewEvent, UsageEvent};
pub use log::{replay, EventLog, LogLine, LogRecord, SCHEMA_VERSION};
pub use models::ModelDir;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("undo target seq {0} does not exist or is not a REPLACE/HIGHLIGHT")]
    UnknownUndoTarget(u64),
    #[error("{path}:{line}: corrupt log line: {reason}")]
    CorruptLine { path: PathBuf, line: usize, reason: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("model artifact {path}: {reason}")]
    BadArtifact { path: PathBuf, reason: String },
}
