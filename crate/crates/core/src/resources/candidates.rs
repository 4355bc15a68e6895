use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::text::Pos;

use super::{embed_neighbors, normalize_phrase, underscore_key, Origin, ParaphraseRule, Providers, ResourceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    pub best_score: f64,
    pub origins: BTreeSet<Origin>,
}

/// Deduplicated candidates for one target lemma, ordered by score then text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub target_lemma: String,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn empty(target_lemma: &str) -> Self {
        CandidateSet { target_lemma: normalize_phrase(target_lemma), candidates: Vec::new() }
    }

    /// Builds a set from raw `(text, score, origin)` hits.
    pub fn from_hits(target_lemma: &str, hits: impl IntoIterator<Item = (String, f64, Origin)>) -> Self {
        let target = normalize_phrase(target_lemma);
        let mut merged: BTreeMap<String, (f64, BTreeSet<Origin>)> = BTreeMap::new();
        for (text, score, origin) in hits {
            let text = normalize_phrase(&text);
            if text.is_empty() || text == target {
                continue;
            }
            let entry = merged.entry(text).or_insert((f64::NEG_INFINITY, BTreeSet::new()));
            entry.0 = entry.0.max(score);
            entry.1.insert(origin);
        }
        let candidates = merged
            .into_iter()
            .map(|(text, (best_score, origins))| Candidate { text, best_score, origins })
            .collect();
        let mut set = CandidateSet { target_lemma: target, candidates };
        set.sort();
        set
    }

    /// Union of two sets for the same target: max score, union of origins.
    pub fn merge(&self, other: &CandidateSet) -> CandidateSet {
        debug_assert_eq!(self.target_lemma, other.target_lemma);
        let hits = self.candidates.iter().chain(&other.candidates).flat_map(|c| {
            c.origins.iter().map(move |&o| (c.text.clone(), c.best_score, o))
        });
        CandidateSet::from_hits(&self.target_lemma, hits)
    }

    fn sort(&mut self) {
        self.candidates.sort_by(|a, b| {
            b.best_score.partial_cmp(&a.best_score).expect("scores are finite").then_with(|| a.text.cmp(&b.text))
        });
    }

    pub fn get(&self, text: &str) -> Option<(usize, &Candidate)> {
        let key = normalize_phrase(text);
        self.candidates.iter().enumerate().find(|(_, c)| c.text == key)
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.text.as_str())
    }
}

fn rule_hits(rules: &[ParaphraseRule]) -> impl Iterator<Item = (String, f64, Origin)> + '_ {
    rules.iter().map(|r| (r.target.clone(), r.score, r.origin))
}

/// Per-provider candidate sets for `target_lemma`, in provider order.
pub fn provider_sets(target_lemma: &str, pos: Pos, providers: &Providers, k_embed: usize) -> Vec<CandidateSet> {
    let mut sets = Vec::new();
    if let Some(ppdb) = &providers.ppdb {
        sets.push(CandidateSet::from_hits(target_lemma, rule_hits(ppdb.lookup(target_lemma))));
    }
    if let Some(synlex) = &providers.synlex {
        // An untagged target (OTHER) is not filtered.
        let rules = synlex.lookup(target_lemma).iter().filter(|r| pos == Pos::Other || r.pos == Some(pos));
        sets.push(CandidateSet::from_hits(target_lemma, rules.map(|r| (r.target.clone(), r.score, r.origin))));
    }
    if let Some(dt) = &providers.dt {
        sets.push(CandidateSet::from_hits(target_lemma, rule_hits(dt.lookup(target_lemma))));
    }
    if let Some(table) = &providers.embeddings {
        let neighbors = embed_neighbors(table, &underscore_key(target_lemma), k_embed);
        let hits = neighbors.into_iter().map(|(key, cos)| (key, (cos + 1.0) / 2.0, Origin::Embed));
        sets.push(CandidateSet::from_hits(target_lemma, hits));
    }
    sets
}

/// Merged candidates from every loaded provider.
pub fn candidates_for(target_lemma: &str, pos: Pos, providers: &Providers, k_embed: usize) -> Result<CandidateSet, ResourceError> {
    if providers.is_empty() {
        return Err(ResourceError::NoProviders);
    }
    Ok(provider_sets(target_lemma, pos, providers, k_embed)
        .iter()
        .fold(CandidateSet::empty(target_lemma), |acc, s| acc.merge(s)))
}
