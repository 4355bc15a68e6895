use serde::{Deserialize, Serialize};

use crate::text::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Highlight,
    Replace,
    Reject,
    Undo,
    AutoHighlightShown,
}

impl EventKind {
    /// Wire name, as serialized.
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Highlight => "HIGHLIGHT",
            EventKind::Replace => "REPLACE",
            EventKind::Reject => "REJECT",
            EventKind::Undo => "UNDO",
            EventKind::AutoHighlightShown => "AUTO_HIGHLIGHT_SHOWN",
        }
    }
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Version ids of the target and ranking models that produced a display.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelVersionPair {
    pub target: String,
    pub ranker: String,
}

/// An event as submitted, before the store assigns its sequence number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewEvent {
    pub timestamp_ms: u64,
    pub session_id: String,
    pub doc_id: String,
    pub kind: EventKind,
    pub span: Span,
    pub target_surface: String,
    #[serde(default)]
    pub displayed_candidates: Vec<String>,
    #[serde(default)]
    pub selected_candidate: Option<String>,
    /// Sequence number of the cancelled event; UNDO only.
    #[serde(default)]
    pub undo_of: Option<u64>,
    #[serde(default)]
    pub request_id: Option<String>,
    pub model_versions: ModelVersionPair,
}

/// One immutable record of user or simulator interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageEvent {
    pub seq: u64,
    #[serde(flatten)]
    pub body: NewEvent,
}

impl std::ops::Deref for UsageEvent {
    type Target = NewEvent;

    fn deref(&self) -> &NewEvent {
        &self.body
    }
}

impl NewEvent {
    /// Checks the invariants that do not depend on other events.
    pub fn check_shape(&self) -> Result<(), String> {
        if self.span.start >= self.span.end {
            return Err(format!("empty or inverted span {}", self.span));
        }
        if self.kind != EventKind::Undo && self.undo_of.is_some() {
            return Err("undo_of is only valid on UNDO".into());
        }
        match self.kind {
            EventKind::Replace => {
                let selected = self.selected_candidate.as_deref().ok_or("REPLACE requires selected_candidate")?;
                if !self.displayed_candidates.iter().any(|c| c == selected) {
                    return Err(format!("selected candidate {selected:?} was not displayed"));
                }
            }
            EventKind::Highlight => {
                if !self.displayed_candidates.is_empty() || self.selected_candidate.is_some() {
                    return Err("HIGHLIGHT carries no candidates".into());
                }
            }
            EventKind::Reject | EventKind::AutoHighlightShown => {
                if self.displayed_candidates.is_empty() {
                    return Err(format!("{} requires the displayed candidates", self.kind));
                }
                if self.selected_candidate.is_some() {
                    return Err(format!("{} has no selection", self.kind));
                }
            }
            EventKind::Undo => {
                if self.undo_of.is_none() {
                    return Err("UNDO requires undo_of".into());
                }
                if self.selected_candidate.is_some() {
                    return Err("UNDO has no selection".into());
                }
            }
        }
        Ok(())
    }
}
