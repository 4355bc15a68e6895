use std::path::Path;

use super::{min_max_normalize, normalize_phrase, read_file, LoadStats, LoadedRules, Origin, ParaphraseRule, ResourceError};

const SCORE_KEY: &str = "PPDB2.0Score";

struct RawRule {
    label: String,
    source: String,
    target: String,
    score: f64,
    entailment: Option<String>,
}

fn parse_line(line: &str) -> Option<RawRule> {
    let fields: Vec<&str> = line.split("|||").map(str::trim).collect();
    if fields.len() < 4 {
        return None;
    }
    let score = fields[3].split_whitespace().find_map(|kv| {
        let (k, v) = kv.split_once('=')?;
        (k == SCORE_KEY).then(|| v.parse::<f64>().ok()).flatten()
    })?;
    let (source, target) = (normalize_phrase(fields[1]), normalize_phrase(fields[2]));
    if !score.is_finite() || source.is_empty() || target.is_empty() {
        return None;
    }
    Some(RawRule {
        label: fields[0].to_owned(),
        source,
        target,
        score,
        entailment: fields.get(5).filter(|e| !e.is_empty()).map(|e| e.to_string()),
    })
}

/// Loads PPDB-style `LHS ||| phrase ||| paraphrase ||| features ||| ...` rules.
///
/// The `PPDB2.0Score` feature is min-max normalized over the file.
pub fn load_ppdb(path: impl AsRef<Path>) -> Result<LoadedRules, ResourceError> {
    let path = path.as_ref();
    let content = read_file(path)?;
    let mut stats = LoadStats::default();
    let mut raw = Vec::new();
    for line in content.lines().filter(|l| !l.trim().is_empty()) {
        stats.lines += 1;
        match parse_line(line) {
            None => stats.skipped += 1,
            Some(r) if r.source == r.target => stats.dropped_self += 1,
            Some(r) => raw.push(r),
        }
    }
    if raw.is_empty() {
        return Err(ResourceError::NoValidRules(path.to_owned()));
    }
    let scores = min_max_normalize(&raw.iter().map(|r| r.score).collect::<Vec<_>>());
    let rules: Vec<ParaphraseRule> = raw
        .into_iter()
        .zip(scores)
        .map(|(r, score)| ParaphraseRule {
            source: r.source,
            target: r.target,
            score,
            origin: Origin::Ppdb,
            pos: None,
            label: Some(r.label),
            entailment: r.entailment,
        })
        .collect();
    stats.rules = rules.len();
    Ok(LoadedRules { rules, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ppdb.txt");
        std::fs::write(&path, content).unwrap();
        (dir, path)
    }

    #[test]
    fn single_well_formed_line() {
        let (_d, p) = write("[RB] ||| possibly ||| perhaps ||| PPDB2.0Score=4.81 PPDB1.0Score=2.1 ||| 0-0 ||| Equivalence\n");
        let loaded = load_ppdb(&p).unwrap();
        assert_eq!(loaded.rules.len(), 1);
        let r = &loaded.rules[0];
        assert_eq!((r.source.as_str(), r.target.as_str(), r.origin), ("possibly", "perhaps", Origin::Ppdb));
        assert_eq!(r.label.as_deref(), Some("[RB]"));
        assert_eq!(r.entailment.as_deref(), Some("Equivalence"));
        assert_eq!(r.score, 1.0);
    }

    #[test]
    fn scores_min_max_normalized_over_file() {
        // raw {2.0, 3.0, 4.0}: min 2, range 2 -> {0, 0.5, 1}
        let (_d, p) = write(
            "[JJ] ||| big ||| large ||| PPDB2.0Score=2.0\n\
             [JJ] ||| big ||| huge ||| PPDB2.0Score=4.0\n\
             [JJ] ||| small ||| little ||| PPDB2.0Score=3.0\n",
        );
        let scores: Vec<f64> = load_ppdb(&p).unwrap().rules.iter().map(|r| r.score).collect();
        assert_eq!(scores, vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn malformed_and_self_rules_are_counted() {
        let (_d, p) = write(
            "garbage line\n\
             [JJ] ||| big ||| large ||| Other=1\n\
             [JJ] ||| Rapid ||| rapid ||| PPDB2.0Score=3\n\
             [JJ] ||| big ||| large ||| PPDB2.0Score=3\n",
        );
        let loaded = load_ppdb(&p).unwrap();
        assert_eq!(loaded.stats, LoadStats { lines: 4, rules: 1, skipped: 2, dropped_self: 1 });
    }

    #[test]
    fn empty_or_missing_file() {
        let (_d, p) = write("");
        assert!(matches!(load_ppdb(&p), Err(ResourceError::NoValidRules(_))));
        assert!(matches!(load_ppdb("/nonexistent/ppdb.txt"), Err(ResourceError::FileNotFound(_))));
    }
}
