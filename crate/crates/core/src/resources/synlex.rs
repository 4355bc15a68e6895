use std::path::Path;

use crate::text::Pos;

use super::{normalize_phrase, read_file, LoadStats, LoadedRules, Origin, ParaphraseRule, ResourceError};

/// Loads `lemma<TAB>pos<TAB>syn1,syn2,...` synonym lines, one rule per pair.
///
/// Every rule scores 1.0. No symmetric closure is added.
pub fn load_synlex(path: impl AsRef<Path>) -> Result<LoadedRules, ResourceError> {
    let path = path.as_ref();
    let content = read_file(path)?;
    let mut stats = LoadStats::default();
    let mut rules = Vec::new();
    for line in content.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')) {
        stats.lines += 1;
        let fields: Vec<&str> = line.split('\t').collect();
        let parsed = (fields.len() == 3)
            .then(|| fields[1].parse::<Pos>().ok())
            .flatten()
            .filter(|_| !normalize_phrase(fields[0]).is_empty());
        let Some(pos) = parsed else {
            stats.skipped += 1;
            continue;
        };
        let source = normalize_phrase(fields[0]);
        for syn in fields[2].split(',').map(normalize_phrase).filter(|s| !s.is_empty()) {
            if syn == source {
                stats.dropped_self += 1;
                continue;
            }
            rules.push(ParaphraseRule {
                source: source.clone(),
                target: syn,
                score: 1.0,
                origin: Origin::Synlex,
                pos: Some(pos),
                label: None,
                entailment: None,
            });
        }
    }
    if rules.is_empty() {
        return Err(ResourceError::NoValidRules(path.to_owned()));
    }
    stats.rules = rules.len();
    Ok(LoadedRules { rules, stats })
}
