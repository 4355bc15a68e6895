use std::collections::{HashMap, HashSet};
use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EventKind, NewEvent, StoreError, UsageEvent};

pub const SCHEMA_VERSION: u32 = 1;

/// One line of the log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum LogRecord {
    /// Text of a document as of this point in the log.
    Doc { doc_id: String, text: String },
    Event(UsageEvent),
    /// Iteration boundary; `last_seq` is the final event of the closed iteration.
    Close { iteration: u32, last_seq: u64, forced: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub v: u32,
    #[serde(flatten)]
    pub record: LogRecord,
}

struct Sink(Box<dyn Write + Send>);

impl std::fmt::Debug for Sink {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Sink")
    }
}

/// Newline-delimited JSON event log. Records are never modified once written.
#[derive(Debug, Default)]
pub struct EventLog {
    path: Option<PathBuf>,
    writer: Option<Sink>,
    records: Vec<Arc<LogRecord>>,
    event_at: HashMap<u64, usize>,
    undone: HashSet<u64>,
    latest_doc: HashMap<String, usize>,
    last_seq: u64,
}

impl EventLog {
    /// A log that is never written to disk.
    pub fn in_memory() -> Self {
        EventLog::default()
    }

    /// Replays `path` if it exists (creating it otherwise) and opens it for appending.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let io_err = |source| StoreError::Io { path: path.to_owned(), source };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
        let mut log = if path.exists() { replay(path)? } else { EventLog::default() };
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
        log.path = Some(path.to_owned());
        log.writer = Some(Sink(Box::new(BufWriter::new(file))));
        Ok(log)
    }

    /// An empty log whose records go to `writer`; `name` labels I/O errors.
    pub fn with_writer(name: impl Into<PathBuf>, writer: impl Write + Send + 'static) -> Self {
        EventLog { path: Some(name.into()), writer: Some(Sink(Box::new(writer))), ..EventLog::default() }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Validates `event`, assigns the next sequence number and persists it.
    pub fn append(&mut self, event: NewEvent) -> Result<UsageEvent, StoreError> {
        self.validate(&event)?;
        let event = UsageEvent { seq: self.last_seq + 1, body: event };
        self.write(LogRecord::Event(event.clone()))?;
        Ok(event)
    }

    /// Records the current text of `doc_id` unless it is unchanged. Returns whether a record was written.
    pub fn append_doc(&mut self, doc_id: &str, text: &str) -> Result<bool, StoreError> {
        if self.doc_text(doc_id) == Some(text) {
            return Ok(false);
        }
        self.write(LogRecord::Doc { doc_id: doc_id.to_owned(), text: text.to_owned() })?;
        Ok(true)
    }

    pub fn append_close(&mut self, iteration: u32, last_seq: u64, forced: bool) -> Result<(), StoreError> {
        self.write(LogRecord::Close { iteration, last_seq, forced })
    }

    fn validate(&self, event: &NewEvent) -> Result<(), StoreError> {
        event.check_shape().map_err(StoreError::InvalidEvent)?;
        if event.kind == EventKind::Undo {
            let target = event.undo_of.expect("shape check guarantees undo_of");
            match self.event(target).map(|e| e.kind) {
                Some(EventKind::Replace | EventKind::Highlight) => {}
                _ => return Err(StoreError::UnknownUndoTarget(target)),
            }
            if self.undone.contains(&target) {
                return Err(StoreError::InvalidEvent(format!("event {target} is already undone")));
            }
        }
        Ok(())
    }

    fn write(&mut self, record: LogRecord) -> Result<(), StoreError> {
        if let (Some(writer), Some(path)) = (self.writer.as_mut(), self.path.as_ref()) {
            let mut line = serde_json::to_string(&LogLine { v: SCHEMA_VERSION, record: record.clone() })
                .expect("log records always serialize");
            line.push('\n');
            let io_err = |source| StoreError::Io { path: path.clone(), source };
            writer.0.write_all(line.as_bytes()).map_err(io_err)?;
            writer.0.flush().map_err(io_err)?;
        }
        self.apply(record);
        Ok(())
    }

    fn apply(&mut self, record: LogRecord) {
        let idx = self.records.len();
        match &record {
            LogRecord::Doc { doc_id, .. } => {
                self.latest_doc.insert(doc_id.clone(), idx);
            }
            LogRecord::Event(e) => {
                self.last_seq = e.seq;
                self.event_at.insert(e.seq, idx);
                if let Some(target) = e.undo_of {
                    self.undone.insert(target);
                }
            }
            LogRecord::Close { .. } => {}
        }
        self.records.push(Arc::new(record));
    }

    pub fn records(&self) -> &[Arc<LogRecord>] {
        &self.records
    }

    /// Shared handles to the first `len` records.
    pub fn snapshot(&self, len: usize) -> Vec<Arc<LogRecord>> {
        self.records[..len.min(self.records.len())].to_vec()
    }

    pub fn events(&self) -> impl Iterator<Item = &UsageEvent> {
        self.records.iter().filter_map(|r| match r.as_ref() {
            LogRecord::Event(e) => Some(e),
            _ => None,
        })
    }

    pub fn event(&self, seq: u64) -> Option<&UsageEvent> {
        self.event_at.get(&seq).and_then(|&i| match self.records[i].as_ref() {
            LogRecord::Event(e) => Some(e),
            _ => None,
        })
    }

    /// Record index of the event with `seq`.
    pub fn position_of(&self, seq: u64) -> Option<usize> {
        self.event_at.get(&seq).copied()
    }

    pub fn is_undone(&self, seq: u64) -> bool {
        self.undone.contains(&seq)
    }

    pub fn doc_text(&self, doc_id: &str) -> Option<&str> {
        self.latest_doc.get(doc_id).and_then(|&i| match self.records[i].as_ref() {
            LogRecord::Doc { text, .. } => Some(text.as_str()),
            _ => None,
        })
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Rebuilds a log from disk, checking every invariant. The result is read-only.
pub fn replay(path: impl AsRef<Path>) -> Result<EventLog, StoreError> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path).map_err(|source| StoreError::Io { path: path.to_owned(), source })?;
    let mut log = EventLog::default();
    for (i, line) in content.split_terminator('\n').enumerate() {
        let corrupt = |reason: String| StoreError::CorruptLine { path: path.to_owned(), line: i + 1, reason };
        let parsed: LogLine = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
        if parsed.v != SCHEMA_VERSION {
            return Err(corrupt(format!("unsupported schema version {}", parsed.v)));
        }
        if let LogRecord::Event(e) = &parsed.record {
            if e.seq != log.last_seq + 1 {
                return Err(corrupt(format!("expected seq {}, found {}", log.last_seq + 1, e.seq)));
            }
            log.validate(&e.body).map_err(|err| corrupt(err.to_string()))?;
        }
        log.apply(parsed.record);
    }
    Ok(log)
}
