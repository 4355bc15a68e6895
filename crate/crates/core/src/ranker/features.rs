use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::Resources;
use crate::resources::{CandidateSet, Origin};
use crate::scalar::Scalar;
use crate::target_id::TargetUnit;
use crate::text::AnnotatedText;

pub const RANK_DIM: usize = 9;
pub const RANK_FEATURE_NAMES: [&str; RANK_DIM] = [
    "resource_score",
    "in_context_lm_delta",
    "cand_corpus_log_freq",
    "len_ratio",
    "origin_ppdb",
    "origin_synlex",
    "origin_dt",
    "origin_embed",
    "prior_rank_recip",
];

/// Hex sha256 of the newline-joined feature names; stored with every model.
pub fn feature_order_hash() -> String {
    hex::encode(Sha256::digest(RANK_FEATURE_NAMES.join("\n").as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RankFeatures {
    pub resource_score: f64,
    pub in_context_lm_delta: f64,
    pub cand_corpus_log_freq: f64,
    pub len_ratio: f64,
    pub origin_ppdb: f64,
    pub origin_synlex: f64,
    pub origin_dt: f64,
    pub origin_embed: f64,
    pub prior_rank_recip: f64,
}

impl RankFeatures {
    pub fn to_array(&self) -> [f64; RANK_DIM] {
        [
            self.resource_score,
            self.in_context_lm_delta,
            self.cand_corpus_log_freq,
            self.len_ratio,
            self.origin_ppdb,
            self.origin_synlex,
            self.origin_dt,
            self.origin_embed,
            self.prior_rank_recip,
        ]
    }

    pub fn to_vec<T: Scalar>(&self) -> Vec<T> {
        self.to_array().iter().map(|&v| T::of(v)).collect()
    }
}

/// Lowercased words of the target's sentence, before and after substituting `replacement`.
pub fn substituted_sentence(target: &TargetUnit, text: &AnnotatedText, replacement: &str) -> (Vec<String>, Vec<String>) {
    let range = text.tokens_for_span(target.span).expect("target spans are aligned");
    let sentence = text.sentence_tokens(text.sentence_of(range.start));
    let words = |r: std::ops::Range<usize>| -> Vec<String> {
        text.tokens[r].iter().map(|t| t.surface.to_lowercase()).collect()
    };
    let original = words(sentence.clone());
    let mut substituted = words(sentence.start..range.start);
    substituted.extend(replacement.split_whitespace().map(str::to_lowercase));
    substituted.extend(words(range.end..sentence.end));
    (original, substituted)
}

/// Log10 probability change of the target's sentence when the candidate replaces it.
pub fn lm_delta(target: &TargetUnit, text: &AnnotatedText, candidate: &str, res: &Resources) -> f64 {
    let (original, substituted) = substituted_sentence(target, text, candidate);
    res.lm.logprob(&substituted) - res.lm.logprob(&original)
}

/// Features of the candidate at `index` in `cands`.
pub fn extract_rank_features(
    target: &TargetUnit,
    cands: &CandidateSet,
    index: usize,
    text: &AnnotatedText,
    res: &Resources,
) -> RankFeatures {
    let c = &cands.candidates[index];
    let flag = |o: Origin| if c.origins.contains(&o) { 1.0 } else { 0.0 };
    let target_len = target.surface.chars().count().max(1);
    RankFeatures {
        resource_score: c.best_score,
        in_context_lm_delta: lm_delta(target, text, &c.text, res),
        cand_corpus_log_freq: res.freq.log_freq(&c.text),
        len_ratio: c.text.chars().count() as f64 / target_len as f64,
        origin_ppdb: flag(Origin::Ppdb),
        origin_synlex: flag(Origin::Synlex),
        origin_dt: flag(Origin::Dt),
        origin_embed: flag(Origin::Embed),
        prior_rank_recip: 1.0 / (1.0 + index as f64),
    }
}
