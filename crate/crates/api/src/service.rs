use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::http::StatusCode;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use adapara_core::adapt::{AdaptLoop, Iteration, ModelVersion, TrainingOutcome};
use adapara_core::engine::Resources;
use adapara_core::store::{EventKind, EventLog, ModelDir, ModelVersionPair, NewEvent};
use adapara_core::target_id::{target_for_span, Provenance, TargetUnit};
use adapara_core::text::Span;

use crate::config::Config;
use crate::error::ApiError;

pub const API_VERSION: u32 = 1;
/// Served requests remembered for feedback lookups.
const REQUEST_MEMORY: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    AutoHighlight,
    CandidatesForSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParaphraseRequest {
    pub v: u32,
    pub doc_id: String,
    pub text: String,
    pub session_id: String,
    pub mode: Mode,
    #[serde(default)]
    pub span: Option<Span>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub text: String,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServedTarget {
    pub span: Span,
    pub target_surface: String,
    pub provenance: Provenance,
    pub candidates: Vec<RankedItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaphraseResponse {
    pub v: u32,
    pub request_id: String,
    pub doc_id: String,
    pub targets: Vec<ServedTarget>,
    pub model_versions: ModelVersionPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackRequest {
    pub v: u32,
    pub session_id: String,
    pub doc_id: String,
    pub kind: EventKind,
    #[serde(default)]
    pub span: Option<Span>,
    #[serde(default)]
    pub target_surface: Option<String>,
    #[serde(default)]
    pub displayed_candidates: Option<Vec<String>>,
    #[serde(default)]
    pub selected_candidate: Option<String>,
    #[serde(default)]
    pub undo_of: Option<u64>,
    #[serde(default)]
    pub request_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackResponse {
    pub v: u32,
    pub seq: u64,
    pub iteration: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivePair {
    pub target: ModelVersion,
    pub ranker: ModelVersion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusResponse {
    pub v: u32,
    pub batch_size: u64,
    pub last_seq: u64,
    pub iterations: Vec<Iteration>,
    pub active: ActivePair,
    pub versions: Vec<ModelVersion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrainResponse {
    pub v: u32,
    pub iteration: u32,
    pub training: TrainingOutcome,
    pub active: ActivePair,
}

/// What one paraphrase request displayed, kept so feedback can refer to it.
#[derive(Debug, Clone)]
struct ServedRequest {
    doc_id: String,
    model_versions: ModelVersionPair,
    targets: Vec<(Span, String, Vec<String>)>,
}

#[derive(Default)]
struct RequestMemory {
    by_id: HashMap<String, ServedRequest>,
    order: VecDeque<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error(transparent)]
    Resources(#[from] adapara_core::engine::LoadError),
    #[error(transparent)]
    Adapt(#[from] adapara_core::adapt::AdaptError),
}

/// Request handling independent of the HTTP layer.
pub struct Service {
    adapt: Arc<AdaptLoop>,
    requests: Mutex<RequestMemory>,
    next_request: AtomicU64,
    test_mode: bool,
    admin_token: String,
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let value: Value = serde_json::from_slice(body).map_err(|e| {
        ApiError::bad_request("INVALID_JSON", "request body is not valid JSON").with_detail(json!({ "error": e.to_string() }))
    })?;
    match value.get("v") {
        Some(v) if v.as_u64() == Some(API_VERSION as u64) => {}
        Some(_) => return Err(ApiError::bad_request("INVALID_REQUEST", "unsupported schema version")),
        None => return Err(ApiError::bad_request("INVALID_REQUEST", "missing schema version field `v`")),
    }
    serde_json::from_value(value).map_err(|e| {
        ApiError::bad_request("INVALID_REQUEST", "request body does not match the schema")
            .with_detail(json!({ "error": e.to_string() }))
    })
}

impl Service {
    pub fn new(adapt: Arc<AdaptLoop>, test_mode: bool, admin_token: impl Into<String>) -> Self {
        Service {
            adapt,
            requests: Mutex::new(RequestMemory::default()),
            next_request: AtomicU64::new(1),
            test_mode,
            admin_token: admin_token.into(),
        }
    }

    /// Loads resources and opens (replaying) the configured event log.
    pub fn from_config(config: &Config) -> Result<Self, StartupError> {
        let mut resources = Resources::load(&config.resource_paths())?;
        resources.display_cap = config.display_cap;
        resources.k_embed = config.k_embed;
        resources.segmenter = resources.segmenter.clone().with_max_chars(config.max_text_chars);
        let resources = Arc::new(resources);
        let adapt = match &config.log_path {
            Some(path) => AdaptLoop::open(resources, config.adapt_config(), path, config.model_dir.clone().map(ModelDir::new))?,
            None => {
                let l = AdaptLoop::from_log(
                    resources,
                    config.adapt_config(),
                    EventLog::in_memory(),
                    config.model_dir.clone().map(ModelDir::new),
                )?;
                l.train_pending()?;
                l
            }
        };
        Ok(Service::new(Arc::new(adapt), config.test_mode, config.admin_token.clone()))
    }

    pub fn adapt(&self) -> &Arc<AdaptLoop> {
        &self.adapt
    }

    fn now_ms(&self) -> u64 {
        if self.test_mode {
            return 0;
        }
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
    }

    fn new_request_id(&self) -> String {
        let n = self.next_request.fetch_add(1, Ordering::Relaxed);
        if self.test_mode {
            format!("req-{n:06}")
        } else {
            format!("req-{:x}-{n}", self.now_ms())
        }
    }

    pub fn paraphrase(&self, body: &[u8]) -> Result<ParaphraseResponse, ApiError> {
        let req: ParaphraseRequest = parse(body)?;
        let res = self.adapt.resources();
        let text = res.segmenter.segment(&req.text, &req.doc_id)?;
        let active = self.adapt.active_models();
        let versions = active.versions();

        let targets: Vec<TargetUnit> = match req.mode {
            Mode::AutoHighlight => active.targets(&text, res, self.adapt.config().target_threshold),
            Mode::CandidatesForSpan => {
                let span = req.span.ok_or_else(|| ApiError::bad_request("MISSING_SPAN", "CANDIDATES_FOR_SPAN requires a span"))?;
                vec![target_for_span(&text, span, Provenance::User)?]
            }
        };
        let request_id = self.new_request_id();
        let now = self.now_ms();
        let event = |kind, target: &TargetUnit, displayed: Vec<String>| NewEvent {
            timestamp_ms: now,
            session_id: req.session_id.clone(),
            doc_id: req.doc_id.clone(),
            kind,
            span: target.span,
            target_surface: target.surface.clone(),
            displayed_candidates: displayed,
            selected_candidate: None,
            undo_of: None,
            request_id: Some(request_id.clone()),
            model_versions: versions.clone(),
        };

        let mut events = Vec::new();
        if req.mode == Mode::CandidatesForSpan {
            events.push(event(EventKind::Highlight, &targets[0], Vec::new()));
        }
        let mut served = Vec::with_capacity(targets.len());
        for target in &targets {
            let ranked: Vec<String> = active.rank(target, &text, res).into_iter().map(|c| c.text).collect();
            if !ranked.is_empty() {
                events.push(event(EventKind::AutoHighlightShown, target, ranked.clone()));
            }
            served.push((target, ranked));
        }
        self.adapt.record(Some((&req.doc_id, &req.text)), events)?;

        self.remember(
            &request_id,
            ServedRequest {
                doc_id: req.doc_id.clone(),
                model_versions: versions.clone(),
                targets: served.iter().map(|(t, r)| (t.span, t.surface.clone(), r.clone())).collect(),
            },
        );
        Ok(ParaphraseResponse {
            v: API_VERSION,
            request_id,
            doc_id: req.doc_id,
            targets: served
                .into_iter()
                .map(|(t, ranked)| ServedTarget {
                    span: t.span,
                    target_surface: t.surface.clone(),
                    provenance: t.provenance,
                    candidates: ranked.into_iter().enumerate().map(|(i, text)| RankedItem { text, rank: i + 1 }).collect(),
                })
                .collect(),
            model_versions: versions,
        })
    }

    fn remember(&self, id: &str, served: ServedRequest) {
        let mut mem = self.requests.lock().expect("request memory poisoned");
        mem.by_id.insert(id.to_owned(), served);
        mem.order.push_back(id.to_owned());
        while mem.order.len() > REQUEST_MEMORY {
            let old = mem.order.pop_front().expect("non-empty");
            mem.by_id.remove(&old);
        }
    }

    pub fn feedback(&self, body: &[u8]) -> Result<FeedbackResponse, ApiError> {
        let req: FeedbackRequest = parse(body)?;
        let event = self.complete_feedback(req)?;
        let (e, iteration) = self.adapt.record_event(event)?;
        Ok(FeedbackResponse { v: API_VERSION, seq: e.seq, iteration })
    }

    /// Fills the fields the server owns and checks the event against what was displayed.
    fn complete_feedback(&self, req: FeedbackRequest) -> Result<NewEvent, ApiError> {
        let require_span = || req.span.ok_or_else(|| ApiError::bad_request("MISSING_SPAN", format!("{} requires a span", req.kind)));
        let mut event = NewEvent {
            timestamp_ms: self.now_ms(),
            session_id: req.session_id.clone(),
            doc_id: req.doc_id.clone(),
            kind: req.kind,
            span: Span { start: 0, end: 0 },
            target_surface: String::new(),
            displayed_candidates: Vec::new(),
            selected_candidate: req.selected_candidate.clone(),
            undo_of: req.undo_of,
            request_id: req.request_id.clone(),
            model_versions: self.adapt.active_models().versions(),
        };
        match req.kind {
            EventKind::AutoHighlightShown => {
                return Err(ApiError::invalid_event("AUTO_HIGHLIGHT_SHOWN is recorded by the server"));
            }
            EventKind::Replace | EventKind::Reject => {
                let span = require_span()?;
                let id = req.request_id.as_deref().ok_or_else(|| ApiError::invalid_event(format!("{} requires request_id", req.kind)))?;
                let served = {
                    let mem = self.requests.lock().expect("request memory poisoned");
                    mem.by_id.get(id).cloned()
                };
                let served = served.ok_or_else(|| {
                    ApiError::new(StatusCode::CONFLICT, "UNKNOWN_REQUEST_ID", format!("no displayed list for request {id}"))
                })?;
                if served.doc_id != req.doc_id {
                    return Err(ApiError::invalid_event(format!("request {id} was for another document")));
                }
                let (_, surface, displayed) = served
                    .targets
                    .iter()
                    .find(|(s, _, _)| *s == span)
                    .ok_or_else(|| ApiError::invalid_event(format!("span {span} was not displayed by request {id}")))?;
                if let Some(given) = &req.displayed_candidates {
                    if given != displayed {
                        return Err(ApiError::invalid_event("displayed_candidates differ from what was displayed")
                            .with_detail(json!({ "displayed": displayed })));
                    }
                }
                event.span = span;
                event.target_surface = surface.clone();
                event.displayed_candidates = displayed.clone();
                event.model_versions = served.model_versions;
            }
            EventKind::Highlight => {
                let span = require_span()?;
                let doc = self.adapt.with_log(|log, _| log.doc_text(&req.doc_id).map(str::to_owned));
                let doc = doc.ok_or_else(|| {
                    ApiError::bad_request("UNKNOWN_DOC", format!("no text has been submitted for document {}", req.doc_id))
                })?;
                let text = self.adapt.resources().segmenter.segment(&doc, &req.doc_id)?;
                let target = target_for_span(&text, span, Provenance::User)?;
                event.span = span;
                event.target_surface = target.surface;
            }
            EventKind::Undo => {
                let seq = req.undo_of.ok_or_else(|| ApiError::invalid_event("UNDO requires undo_of"))?;
                let undone = self.adapt.with_log(|log, _| log.event(seq).map(|e| (e.span, e.target_surface.clone())));
                let (span, surface) = undone.ok_or_else(|| {
                    ApiError::bad_request("UNKNOWN_UNDO_TARGET", format!("event {seq} is not an undoable event"))
                        .with_detail(json!({ "undo_of": seq }))
                })?;
                event.span = span;
                event.target_surface = surface;
            }
        }
        Ok(event)
    }

    pub fn status(&self) -> StatusResponse {
        let s = self.adapt.status();
        StatusResponse {
            v: API_VERSION,
            batch_size: s.table.batch_size,
            last_seq: s.last_seq,
            iterations: s.table.iterations,
            active: ActivePair { target: s.active.0, ranker: s.active.1 },
            versions: s.versions,
        }
    }

    pub fn check_admin(&self, token: Option<&str>) -> Result<(), ApiError> {
        match token {
            Some(t) if !self.admin_token.is_empty() && t == self.admin_token => Ok(()),
            _ => Err(ApiError::new(StatusCode::UNAUTHORIZED, "UNAUTHORIZED", "missing or wrong admin token")),
        }
    }

    /// Closes the open iteration and trains synchronously.
    pub fn retrain(&self, token: Option<&str>) -> Result<RetrainResponse, ApiError> {
        self.check_admin(token)?;
        let index = self.adapt.force_close()?;
        self.adapt.train_pending()?;
        let s = self.adapt.status();
        let training = s.table.get(index).and_then(|it| it.training.clone()).unwrap_or_default();
        Ok(RetrainResponse { v: API_VERSION, iteration: index, training, active: ActivePair { target: s.active.0, ranker: s.active.1 } })
    }
}
