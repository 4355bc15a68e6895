//! Candidate ranking: language-model baseline, linear pairwise model and NDCG.

mod features;
mod model;
mod ndcg;
mod train;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::Resources;
use crate::resources::CandidateSet;
use crate::scalar::Scalar;
use crate::store::EventKind;
use crate::target_id::{target_for_span, EventContext, Provenance, TargetUnit};
use crate::text::AnnotatedText;

pub use features::{
    extract_rank_features, feature_order_hash, lm_delta, substituted_sentence, RankFeatures, RANK_DIM,
    RANK_FEATURE_NAMES,
};
pub use model::{ModelLoadError, RankingModel, RANKING_MODEL_FORMAT};
pub use ndcg::{dcg_at_k, ndcg_at_k, ndcg_from_grades, Ndcg, DEFAULT_K};
pub use train::{pairwise_accuracy, pairwise_loss, train_pairwise, PreferencePair, TrainError, TrainParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub text: String,
    pub score: f64,
    pub features: RankFeatures,
}

/// Features for every candidate in `cands`, in candidate-set order.
pub fn featurize(target: &TargetUnit, cands: &CandidateSet, text: &AnnotatedText, res: &Resources) -> Vec<RankedCandidate> {
    (0..cands.len())
        .map(|i| RankedCandidate {
            text: cands.candidates[i].text.clone(),
            score: 0.0,
            features: extract_rank_features(target, cands, i, text, res),
        })
        .collect()
}

/// Score desc, then resource score desc, then text; truncated to `cap`.
fn order(mut list: Vec<RankedCandidate>, cap: usize) -> Vec<RankedCandidate> {
    list.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.features.resource_score.partial_cmp(&a.features.resource_score).unwrap_or(Ordering::Equal))
            .then_with(|| a.text.cmp(&b.text))
    });
    list.truncate(cap);
    list
}

/// Orders by the in-context language-model score of the substituted sentence.
pub fn baseline_rank(target: &TargetUnit, cands: &CandidateSet, text: &AnnotatedText, res: &Resources) -> Vec<RankedCandidate> {
    let list = featurize(target, cands, text, res)
        .into_iter()
        .map(|c| RankedCandidate { score: c.features.in_context_lm_delta, ..c })
        .collect();
    order(list, res.display_cap)
}

/// Orders by `θ · features`.
pub fn rank<T: Scalar>(
    target: &TargetUnit,
    cands: &CandidateSet,
    model: &RankingModel<T>,
    text: &AnnotatedText,
    res: &Resources,
) -> Vec<RankedCandidate> {
    let list = featurize(target, cands, text, res)
        .into_iter()
        .map(|c| RankedCandidate { score: model.score(&c.features.to_vec::<T>()).to_f64_lossy(), ..c })
        .collect();
    order(list, res.display_cap)
}

/// Preference pairs implied by REPLACE events: the selection beats every other displayed candidate.
///
/// UNDO withdraws an event's pairs; identical pairs are merged by summing
/// weights and pairs with identical features are dropped.
pub fn pairs_from_events(events: &[EventContext<'_>], res: &Resources) -> Vec<PreferencePair<f64>> {
    let mut per_event: BTreeMap<u64, Vec<(RankFeatures, RankFeatures)>> = BTreeMap::new();
    for ctx in events {
        let e = ctx.event;
        match e.kind {
            EventKind::Replace => {
                let Some(text) = ctx.text else { continue };
                let Ok(target) = target_for_span(text, e.span, Provenance::User) else { continue };
                let cands = res.candidates(&target.lemma, target.pos);
                let feats = |s: &str| cands.get(s).map(|(i, _)| extract_rank_features(&target, &cands, i, text, res));
                let selected = e.selected_candidate.as_deref().expect("REPLACE carries a selection");
                let Some(winner) = feats(selected) else { continue };
                let pairs = e
                    .displayed_candidates
                    .iter()
                    .filter(|d| d.as_str() != selected)
                    .filter_map(|d| feats(d))
                    .map(|loser| (winner, loser))
                    .collect();
                per_event.insert(e.seq, pairs);
            }
            EventKind::Undo => {
                if let Some(seq) = e.undo_of {
                    per_event.remove(&seq);
                }
            }
            _ => {}
        }
    }

    let key = |f: &RankFeatures| f.to_array().map(f64::to_bits);
    let mut merged: BTreeMap<([u64; RANK_DIM], [u64; RANK_DIM]), PreferencePair<f64>> = BTreeMap::new();
    for (w, l) in per_event.into_values().flatten() {
        if key(&w) == key(&l) {
            continue;
        }
        merged
            .entry((key(&w), key(&l)))
            .or_insert_with(|| PreferencePair { winner: w.to_vec(), loser: l.to_vec(), weight: 0.0 })
            .weight += 1.0;
    }
    merged.into_values().collect()
}
