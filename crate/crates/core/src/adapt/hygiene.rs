use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{IterationTable, ModelVersion, BASELINE_RANKER_ID, SEED_TARGET_ID};
use crate::store::UsageEvent;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HygieneViolation {
    pub seq: u64,
    pub iteration: Option<u32>,
    pub version: String,
    pub reason: String,
}

/// Checks that every event was served by models trained strictly before its iteration.
pub fn check_serving_hygiene<'a>(
    events: impl Iterator<Item = &'a UsageEvent>,
    table: &IterationTable,
    versions: &[ModelVersion],
) -> Vec<HygieneViolation> {
    let trained_after: HashMap<&str, u32> = versions
        .iter()
        .map(|v| (v.id.as_str(), v.trained_after_iteration))
        .chain([(SEED_TARGET_ID, 0), (BASELINE_RANKER_ID, 0)])
        .collect();
    let mut out = Vec::new();
    for e in events {
        let iteration = table.iteration_of(e.seq);
        for id in [&e.model_versions.target, &e.model_versions.ranker] {
            let violation = |reason: String| HygieneViolation { seq: e.seq, iteration, version: id.clone(), reason };
            match (trained_after.get(id.as_str()), iteration) {
                (None, _) => out.push(violation("unknown model version".into())),
                (_, None) => out.push(violation("event is in no iteration".into())),
                (Some(&after), Some(it)) if after >= it => {
                    out.push(violation(format!("model trained after iteration {after} served iteration {it}")))
                }
                _ => {}
            }
        }
    }
    out
}
