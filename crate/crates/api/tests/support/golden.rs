//! Scripted HTTP exchanges against an in-process router in test mode.
//!
//! Each exchange is stored as `tests/golden/<name>.txt`: the request line and
//! body, a blank line, then the status code and the raw response body.

#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use adapara_api::{router, Service, ADMIN_TOKEN_HEADER};
use adapara_core::adapt::{AdaptConfig, AdaptLoop};
use adapara_core::engine::{ResourcePaths, Resources};
use adapara_core::store::EventLog;
use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;

pub const ADMIN: &str = "golden-admin";
pub const MAX_CHARS: usize = 400;
const DOC: &str = "Approximately, he comprehend a adversary. The team endeavor to ascertain the cause.";

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../api/tests/golden")
}

pub fn resources() -> Resources {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures");
    let mut res = Resources::load(&ResourcePaths::fixture_dir(dir)).expect("fixture resources load");
    res.segmenter = res.segmenter.clone().with_max_chars(MAX_CHARS);
    res
}

fn config() -> AdaptConfig {
    AdaptConfig { batch_size: 1_000_000, ..AdaptConfig::default() }
}

pub fn app(log: EventLog) -> Router {
    let adapt = AdaptLoop::from_log(Arc::new(resources()), config(), log, None).expect("empty log");
    router(Arc::new(Service::new(Arc::new(adapt), true, ADMIN)), true)
}

struct Step {
    name: &'static str,
    method: &'static str,
    path: &'static str,
    admin: Option<&'static str>,
    body: String,
}

fn post(name: &'static str, path: &'static str, body: serde_json::Value) -> Step {
    Step { name, method: "POST", path, admin: None, body: body.to_string() }
}

fn raw(name: &'static str, path: &'static str, body: &str) -> Step {
    Step { name, method: "POST", path, admin: None, body: body.to_owned() }
}

fn get(name: &'static str, path: &'static str) -> Step {
    Step { name, method: "GET", path, admin: None, body: String::new() }
}

fn retrain(name: &'static str, token: Option<&'static str>) -> Step {
    Step { name, method: "POST", path: "/admin/retrain", admin: token, body: String::new() }
}

fn paraphrase(mode: &str, span: Option<(usize, usize)>) -> serde_json::Value {
    let mut body = serde_json::json!({ "v": 1, "doc_id": "doc-1", "text": DOC, "session_id": "sess-1", "mode": mode });
    if let Some((start, end)) = span {
        body["span"] = serde_json::json!({ "start": start, "end": end });
    }
    body
}

fn feedback(kind: &str, extra: serde_json::Value) -> serde_json::Value {
    let mut body = serde_json::json!({ "v": 1, "session_id": "sess-1", "doc_id": "doc-1", "kind": kind });
    for (k, v) in extra.as_object().unwrap() {
        body[k] = v.clone();
    }
    body
}

fn script() -> Vec<Step> {
    use serde_json::json;
    vec![
        get("01-status-initial", "/model/status"),
        post("02-paraphrase-auto", "/paraphrase", paraphrase("AUTO_HIGHLIGHT", None)),
        post("03-paraphrase-span", "/paraphrase", paraphrase("CANDIDATES_FOR_SPAN", Some((18, 28)))),
        post("04-feedback-replace", "/feedback", feedback("REPLACE", json!({ "span": { "start": 31, "end": 40 }, "request_id": "req-000001", "selected_candidate": "enemy" }))),
        post("05-feedback-reject", "/feedback", feedback("REJECT", json!({ "span": { "start": 0, "end": 13 }, "request_id": "req-000001" }))),
        post("06-feedback-highlight", "/feedback", feedback("HIGHLIGHT", json!({ "span": { "start": 51, "end": 59 } }))),
        post("07-feedback-undo", "/feedback", feedback("UNDO", json!({ "undo_of": 6 }))),
        post("08-feedback-replace-span", "/feedback", feedback("REPLACE", json!({ "span": { "start": 18, "end": 28 }, "request_id": "req-000002", "selected_candidate": "understand" }))),
        retrain("09-retrain", Some(ADMIN)),
        retrain("10-nothing-to-train", Some(ADMIN)),
        get("11-status-after-retrain", "/model/status"),
        post("12-paraphrase-after-retrain", "/paraphrase", paraphrase("AUTO_HIGHLIGHT", None)),
        raw("20-invalid-json", "/paraphrase", "{\"v\": 1,"),
        post("21-invalid-request-version", "/paraphrase", json!({ "v": 2, "doc_id": "d", "text": "x", "session_id": "s", "mode": "AUTO_HIGHLIGHT" })),
        post("22-invalid-request-schema", "/paraphrase", json!({ "v": 1, "doc_id": "d", "session_id": "s", "mode": "AUTO_HIGHLIGHT" })),
        post("23-empty-text", "/paraphrase", json!({ "v": 1, "doc_id": "d", "text": "  \n", "session_id": "s", "mode": "AUTO_HIGHLIGHT" })),
        post("24-text-too-large", "/paraphrase", json!({ "v": 1, "doc_id": "d", "text": "word ".repeat(81), "session_id": "s", "mode": "AUTO_HIGHLIGHT" })),
        post("25-span-out-of-range", "/paraphrase", paraphrase("CANDIDATES_FOR_SPAN", Some((80, 95)))),
        post("26-span-misaligned", "/paraphrase", paraphrase("CANDIDATES_FOR_SPAN", Some((19, 28)))),
        post("27-missing-span", "/paraphrase", paraphrase("CANDIDATES_FOR_SPAN", None)),
        post("28-invalid-event", "/feedback", feedback("AUTO_HIGHLIGHT_SHOWN", json!({ "span": { "start": 0, "end": 13 } }))),
        post("29-invalid-event-not-displayed", "/feedback", feedback("REPLACE", json!({ "span": { "start": 31, "end": 40 }, "request_id": "req-000001", "selected_candidate": "zebra" }))),
        post("30-unknown-undo-target", "/feedback", feedback("UNDO", json!({ "undo_of": 999 }))),
        post("31-unknown-request-id", "/feedback", feedback("REPLACE", json!({ "span": { "start": 31, "end": 40 }, "request_id": "req-999999", "selected_candidate": "enemy" }))),
        post("32-unknown-doc", "/feedback", json!({ "v": 1, "session_id": "s", "doc_id": "never-seen", "kind": "HIGHLIGHT", "span": { "start": 0, "end": 3 } })),
        post("33-missing-span-feedback", "/feedback", feedback("HIGHLIGHT", json!({}))),
        post("36-invalid-event-no-request-id", "/feedback", feedback("REJECT", json!({ "span": { "start": 0, "end": 13 } }))),
        retrain("34-unauthorized-missing", None),
        retrain("35-unauthorized-wrong", Some("not-the-token")),
        get("37-not-found", "/no/such/route"),
    ]
}

async fn send(app: &Router, step: &Step) -> String {
    let mut req = Request::builder().method(step.method).uri(step.path);
    if !step.body.is_empty() {
        req = req.header("content-type", "application/json");
    }
    if let Some(token) = step.admin {
        req = req.header(ADMIN_TOKEN_HEADER, token);
    }
    let resp = app.clone().oneshot(req.body(Body::from(step.body.clone())).unwrap()).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let mut out = format!("{} {}\n", step.method, step.path);
    if !step.body.is_empty() {
        out.push_str(&step.body);
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&format!("{status}\n{}\n", String::from_utf8_lossy(&bytes)));
    out
}

/// A writer that always fails, standing in for a broken disk.
struct BrokenDisk;

impl Write for BrokenDisk {
    fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
        Err(std::io::Error::other("disk unavailable"))
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Err(std::io::Error::other("disk unavailable"))
    }
}

/// Runs every scripted exchange and returns `(name, transcript)` in order.
pub fn run_script() -> Vec<(String, String)> {
    let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
    rt.block_on(async {
        let main = app(EventLog::in_memory());
        let mut out = Vec::new();
        for step in script() {
            out.push((step.name.to_owned(), send(&main, &step).await));
        }
        let broken = app(EventLog::with_writer("broken.ndjson", BrokenDisk));
        let step = post("40-store-unavailable", "/paraphrase", paraphrase("AUTO_HIGHLIGHT", None));
        out.push((step.name.to_owned(), send(&broken, &step).await));
        out
    })
}

/// Names whose transcript differs from (or lacks) a golden file. With `update`, rewrites the goldens instead.
pub fn check_goldens(update: bool) -> Vec<String> {
    let dir = golden_dir();
    let mut mismatched = Vec::new();
    for (name, transcript) in run_script() {
        let path = dir.join(format!("{name}.txt"));
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &transcript).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(transcript.as_str()) {
            mismatched.push(name);
        }
    }
    mismatched
}
