//! Rebuilds a finished run from its event log and compares it with the recorded manifest.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use adapara_core::adapt::{AdaptLoop, HygieneViolation};
use adapara_core::engine::{ResourcePaths, Resources};
use adapara_core::store::{replay, ModelDir};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::simulate::{Manifest, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub events: u64,
    pub iterations: usize,
    pub table_matches: bool,
    pub versions_match: bool,
    /// Version ids whose saved artifact is missing or has a different checksum.
    pub bad_artifacts: Vec<String>,
    pub hygiene_violations: Vec<HygieneViolation>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.table_matches && self.versions_match && self.bad_artifacts.is_empty() && self.hygiene_violations.is_empty()
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io { path: path.to_owned(), source }
}

/// Replays `run_dir/events.ndjson` from empty state, retrains, and checks the result against `run_dir/manifest.json`.
pub fn replay_check(run_dir: &Path, resources_dir: Option<&Path>) -> Result<ReplayReport, SimError> {
    let manifest_path = run_dir.join("manifest.json");
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path).map_err(io(&manifest_path))?)
        .map_err(|e| SimError::Config(format!("{}: {e}", manifest_path.display())))?;
    let dir: PathBuf = resources_dir.map(Path::to_owned).unwrap_or_else(|| manifest.config.resources_dir.clone());
    let res = Arc::new(Resources::load(&ResourcePaths::fixture_dir(dir))?);

    let log = replay(run_dir.join("events.ndjson")).map_err(adapara_core::adapt::AdaptError::from)?;
    let mut config = manifest.config.adapt.clone();
    config.batch_size = manifest.config.batch_size;
    let adapt = AdaptLoop::from_log(res, config, log, None)?;
    adapt.train_pending()?;
    let status = adapt.status();

    let models = ModelDir::new(run_dir.join("models"));
    let bad_artifacts = status
        .versions
        .iter()
        .filter(|v| match models.read(v.kind.dir_name(), &v.id) {
            Ok(json) => hex::encode(Sha256::digest(json.as_bytes())) != v.checksum,
            Err(_) => true,
        })
        .map(|v| v.id.clone())
        .collect();

    Ok(ReplayReport {
        events: status.last_seq,
        iterations: status.table.iterations.len(),
        // compared in serialized form; the table's log positions are not part of the manifest
        table_matches: serde_json::to_value(&status.table).ok() == serde_json::to_value(&manifest.table).ok(),
        versions_match: status.versions == manifest.versions,
        bad_artifacts,
        hygiene_violations: adapt.hygiene_violations(),
    })
}
