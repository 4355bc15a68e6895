use std::path::Path;

use super::{min_max_normalize, normalize_phrase, read_file, LoadStats, LoadedRules, Origin, ParaphraseRule, ResourceError};

/// Loads distributional-thesaurus triples `word<TAB>neighbor<TAB>score`.
pub fn load_dt(path: impl AsRef<Path>) -> Result<LoadedRules, ResourceError> {
    let path = path.as_ref();
    let content = read_file(path)?;
    let mut stats = LoadStats::default();
    let mut raw: Vec<(String, String, f64)> = Vec::new();
    for line in content.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')) {
        stats.lines += 1;
        let fields: Vec<&str> = line.split('\t').collect();
        let parsed = match fields.as_slice() {
            [w, n, s] => s.trim().parse::<f64>().ok().filter(|s| s.is_finite()).map(|s| (normalize_phrase(w), normalize_phrase(n), s)),
            _ => None,
        };
        match parsed {
            Some((w, n, _)) if w.is_empty() || n.is_empty() => stats.skipped += 1,
            Some((w, n, _)) if w == n => stats.dropped_self += 1,
            Some(triple) => raw.push(triple),
            None => stats.skipped += 1,
        }
    }
    if raw.is_empty() {
        return Err(ResourceError::NoValidRules(path.to_owned()));
    }
    let scores = min_max_normalize(&raw.iter().map(|r| r.2).collect::<Vec<_>>());
    let rules: Vec<ParaphraseRule> = raw
        .into_iter()
        .zip(scores)
        .map(|((source, target, _), score)| ParaphraseRule {
            source,
            target,
            score,
            origin: Origin::Dt,
            pos: None,
            label: None,
            entailment: None,
        })
        .collect();
    stats.rules = rules.len();
    Ok(LoadedRules { rules, stats })
}
