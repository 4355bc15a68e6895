use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{candidate_spans, extract_features, TargetFeatures};
use crate::engine::Resources;
use crate::store::{EventKind, UsageEvent};
use crate::text::{AnnotatedText, Span};

/// Negatives sampled per positive within a sentence.
pub const NEGATIVE_RATIO: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExampleSource {
    Seed,
    UserHighlight,
    UserReplace,
    NegativeSampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: TargetFeatures,
    pub label: i8,
    pub source: ExampleSource,
    pub text_id: usize,
    pub span: Span,
    pub surface: String,
}

/// An event together with the document text it refers to.
///
/// `text_id` identifies a document snapshot; events on the same snapshot share it.
#[derive(Debug, Clone, Copy)]
pub struct EventContext<'a> {
    pub event: &'a UsageEvent,
    pub text_id: usize,
    pub text: Option<&'a AnnotatedText>,
}

struct Positive<'a> {
    text: &'a AnnotatedText,
    contributors: BTreeMap<u64, EventKind>,
}

/// Labeled examples from HIGHLIGHT and REPLACE events plus seeded negative samples.
///
/// Positives are keyed by (snapshot, span); UNDO withdraws the cancelled event's
/// contribution. Negatives come from the remaining candidate spans of every
/// sentence holding a positive, `NEGATIVE_RATIO` per positive.
pub fn assemble_training_set(events: &[EventContext<'_>], res: &Resources, seed: u64) -> Vec<LabeledExample> {
    let mut positives: BTreeMap<(usize, Span), Positive<'_>> = BTreeMap::new();
    let mut by_seq: BTreeMap<u64, (usize, Span)> = BTreeMap::new();
    let mut touched: BTreeSet<(usize, Span)> = BTreeSet::new();

    for ctx in events {
        let e = ctx.event;
        match e.kind {
            EventKind::Highlight | EventKind::Replace => {
                let Some(text) = ctx.text else { continue };
                if text.tokens_for_span(e.span).is_err() {
                    continue;
                }
                let key = (ctx.text_id, e.span);
                touched.insert(key);
                by_seq.insert(e.seq, key);
                positives.entry(key).or_insert_with(|| Positive { text, contributors: BTreeMap::new() })
                    .contributors
                    .insert(e.seq, e.kind);
            }
            EventKind::Undo => {
                let Some(key) = e.undo_of.and_then(|s| by_seq.remove(&s)) else { continue };
                if let Some(p) = positives.get_mut(&key) {
                    p.contributors.remove(&e.undo_of.unwrap());
                    if p.contributors.is_empty() {
                        positives.remove(&key);
                    }
                }
            }
            EventKind::Reject | EventKind::AutoHighlightShown => {}
        }
    }

    let mut out = Vec::new();
    // (text_id, sentence) -> positives in it
    let mut sentences: BTreeMap<(usize, usize), (usize, &AnnotatedText)> = BTreeMap::new();
    for (&(text_id, span), p) in &positives {
        let Ok(features) = extract_features(p.text, span, res) else { continue };
        let source = if p.contributors.values().any(|&k| k == EventKind::Replace) {
            ExampleSource::UserReplace
        } else {
            ExampleSource::UserHighlight
        };
        out.push(LabeledExample { features, label: 1, source, text_id, span, surface: p.text.slice(span).to_owned() });
        let first = p.text.tokens_for_span(span).expect("checked on insert").start;
        sentences.entry((text_id, p.text.sentence_of(first))).or_insert((0, p.text)).0 += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spans_by_text: BTreeMap<usize, Vec<Span>> = BTreeMap::new();
    for (&(text_id, s), &(count, text)) in &sentences {
        let all = spans_by_text.entry(text_id).or_insert_with(|| candidate_spans(text, res));
        let sent = text.sentences[s];
        let pool: Vec<Span> = all
            .iter()
            .copied()
            .filter(|sp| sent.contains(sp))
            .filter(|sp| !touched.iter().any(|&(t, u)| t == text_id && u.overlaps(sp)))
            .collect();
        let take = (count * NEGATIVE_RATIO).min(pool.len());
        let mut picked = rand::seq::index::sample(&mut rng, pool.len(), take).into_vec();
        picked.sort_unstable();
        for i in picked {
            let span = pool[i];
            let features = extract_features(text, span, res).expect("candidate spans are aligned");
            out.push(LabeledExample {
                features,
                label: -1,
                source: ExampleSource::NegativeSampled,
                text_id,
                span,
                surface: text.slice(span).to_owned(),
            });
        }
    }
    out
}
