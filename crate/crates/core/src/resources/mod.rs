//! Paraphrase resources and background statistics.
//!
//! Four rule providers (PPDB-style rules, a synonym lexicon, a
//! distributional thesaurus and embedding neighbours) sit behind
//! [`Providers`]; [`candidates_for`] merges them into a [`CandidateSet`].

mod candidates;
mod dt;
mod embed;
mod freq;
mod lm;
mod ppdb;
mod synlex;

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::text::Pos;

pub use candidates::{candidates_for, Candidate, CandidateSet};
pub use dt::load_dt;
pub use embed::{embed_neighbors, load_embeddings, EmbeddingTable};
pub use freq::{FrequencyList, WordList};
pub use lm::{build_lm, lm_logprob, NgramLanguageModel, BOS, EOS};
pub use ppdb::load_ppdb;
pub use synlex::load_synlex;

/// Which resource a rule or candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Origin {
    Ppdb,
    Synlex,
    Dt,
    Embed,
}

impl Origin {
    pub const ALL: [Origin; 4] = [Origin::Ppdb, Origin::Synlex, Origin::Dt, Origin::Embed];

    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Ppdb => "PPDB",
            Origin::Synlex => "SYNLEX",
            Origin::Dt => "DT",
            Origin::Embed => "EMBED",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaphraseRule {
    pub source: String,
    pub target: String,
    /// Normalized to `[0, 1]`.
    pub score: f64,
    pub origin: Origin,
    /// Only synonym-lexicon rules carry a POS.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Pos>,
    /// PPDB left-hand-side label; parsed, unused by ranking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// PPDB entailment relation; parsed, unused by ranking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entailment: Option<String>,
}

/// Per-file load counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub lines: usize,
    pub rules: usize,
    /// Lines that failed to parse.
    pub skipped: usize,
    /// Parseable lines whose source equals the target.
    pub dropped_self: usize,
}

#[derive(Debug, Clone)]
pub struct LoadedRules {
    pub rules: Vec<ParaphraseRule>,
    pub stats: LoadStats,
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: no valid rules")]
    NoValidRules(PathBuf),
    #[error("{path}:{line}: expected {expected} components, found {found}")]
    DimensionMismatch { path: PathBuf, line: usize, expected: usize, found: usize },
    #[error("{path}:{line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("{0}: corpus has no tokens")]
    EmptyCorpus(PathBuf),
    #[error("no paraphrase provider loaded")]
    NoProviders,
}

pub(crate) fn read_file(path: &Path) -> Result<String, ResourceError> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            ResourceError::FileNotFound(path.to_owned())
        } else {
            ResourceError::Io { path: path.to_owned(), source }
        }
    })
}

/// Lowercases, maps `_` to a space and collapses internal whitespace.
pub fn normalize_phrase(s: &str) -> String {
    s.to_lowercase().replace('_', " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Key used by embedding tables and word lists for multiword units.
pub fn underscore_key(s: &str) -> String {
    normalize_phrase(s).replace(' ', "_")
}

/// Per-file min-max scaling into `[0, 1]`; a constant column maps to 1.0.
pub(crate) fn min_max_normalize(raw: &[f64]) -> Vec<f64> {
    let (lo, hi) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if raw.is_empty() || lo == hi {
        return vec![1.0; raw.len()];
    }
    raw.iter().map(|&x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)).collect()
}

/// Rules of one origin indexed by normalized source phrase.
#[derive(Debug, Clone, Default)]
pub struct RuleIndex {
    by_source: HashMap<String, Vec<ParaphraseRule>>,
    len: usize,
}

impl RuleIndex {
    pub fn new(rules: Vec<ParaphraseRule>) -> Self {
        let len = rules.len();
        let mut by_source: HashMap<String, Vec<ParaphraseRule>> = HashMap::new();
        for rule in rules {
            by_source.entry(normalize_phrase(&rule.source)).or_default().push(rule);
        }
        RuleIndex { by_source, len }
    }

    pub fn lookup(&self, source: &str) -> &[ParaphraseRule] {
        self.by_source.get(&normalize_phrase(source)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Summary line for the `resources stats` command.
#[derive(Debug, Clone, Serialize)]
pub struct ProviderStats {
    pub origin: Origin,
    pub path: PathBuf,
    pub entries: usize,
    #[serde(flatten)]
    pub load: LoadStats,
}

/// The set of loaded paraphrase providers.
#[derive(Debug, Clone, Default)]
pub struct Providers {
    pub ppdb: Option<RuleIndex>,
    pub synlex: Option<RuleIndex>,
    pub dt: Option<RuleIndex>,
    pub embeddings: Option<EmbeddingTable<f64>>,
    pub stats: Vec<ProviderStats>,
}

impl Providers {
    pub fn is_empty(&self) -> bool {
        self.ppdb.is_none() && self.synlex.is_none() && self.dt.is_none() && self.embeddings.is_none()
    }

    pub fn with_ppdb(mut self, path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let loaded = load_ppdb(path.as_ref())?;
        self.push_stats(Origin::Ppdb, path.as_ref(), loaded.rules.len(), loaded.stats);
        self.ppdb = Some(RuleIndex::new(loaded.rules));
        Ok(self)
    }

    pub fn with_synlex(mut self, path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let loaded = load_synlex(path.as_ref())?;
        self.push_stats(Origin::Synlex, path.as_ref(), loaded.rules.len(), loaded.stats);
        self.synlex = Some(RuleIndex::new(loaded.rules));
        Ok(self)
    }

    pub fn with_dt(mut self, path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let loaded = load_dt(path.as_ref())?;
        self.push_stats(Origin::Dt, path.as_ref(), loaded.rules.len(), loaded.stats);
        self.dt = Some(RuleIndex::new(loaded.rules));
        Ok(self)
    }

    pub fn with_embeddings(mut self, path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let (table, stats) = load_embeddings::<f64>(path.as_ref())?;
        self.push_stats(Origin::Embed, path.as_ref(), table.len(), stats);
        self.embeddings = Some(table);
        Ok(self)
    }

    fn push_stats(&mut self, origin: Origin, path: &Path, entries: usize, load: LoadStats) {
        self.stats.retain(|s| s.origin != origin);
        self.stats.push(ProviderStats { origin, path: path.to_owned(), entries, load });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_max_degenerate_and_regular() {
        assert_eq!(min_max_normalize(&[2.0, 3.0, 4.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(min_max_normalize(&[7.0]), vec![1.0]);
        assert_eq!(min_max_normalize(&[3.0, 3.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn phrase_normalization() {
        assert_eq!(normalize_phrase("  New_York  City "), "new york city");
        assert_eq!(underscore_key("New York"), "new_york");
    }
}
