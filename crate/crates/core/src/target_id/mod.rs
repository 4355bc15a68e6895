//! Target unit identification: candidate spans, features and the boosted classifier.

mod adaboost;
mod training;

use serde::{Deserialize, Serialize};

use crate::engine::Resources;
use crate::resources::normalize_phrase;
use crate::scalar::Scalar;
use crate::text::{AnnotatedText, Pos, Span, TextError};

pub use adaboost::{train_adaboost, AdaBoostError, RoundTrace, Stump, StumpEnsemble, TrainedEnsemble};
pub use training::{assemble_training_set, EventContext, ExampleSource, LabeledExample, NEGATIVE_RATIO};

pub const FEATURE_VERSION: &str = "target-features/v1";
pub const FEATURE_NAMES: [&str; 7] = [
    "length_chars",
    "length_syllables",
    "corpus_log_freq",
    "in_mwe_lexicon",
    "pos_is_content",
    "sentence_position",
    "candidate_availability",
];
pub const DEFAULT_ROUNDS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Model,
    Seed,
    User,
}

/// A span of text worth offering paraphrases for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetUnit {
    pub span: Span,
    pub surface: String,
    /// Lookup key for the resources: the token lemma, or the lowercased phrase.
    pub lemma: String,
    pub pos: Pos,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TargetFeatures {
    pub length_chars: f64,
    pub length_syllables: f64,
    pub corpus_log_freq: f64,
    pub in_mwe_lexicon: f64,
    pub pos_is_content: f64,
    pub sentence_position: f64,
    pub candidate_availability: f64,
}

impl TargetFeatures {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.length_chars,
            self.length_syllables,
            self.corpus_log_freq,
            self.in_mwe_lexicon,
            self.pos_is_content,
            self.sentence_position,
            self.candidate_availability,
        ]
    }

    pub fn to_vec<T: Scalar>(&self) -> Vec<T> {
        self.to_array().iter().map(|&v| T::of(v)).collect()
    }
}

/// Number of maximal runs of vowels (`y` included).
pub fn syllables(word: &str) -> usize {
    let mut count = 0;
    let mut in_group = false;
    for c in word.chars().flat_map(char::to_lowercase) {
        let vowel = matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
        if vowel && !in_group {
            count += 1;
        }
        in_group = vowel;
    }
    count
}

/// Resource lookup key and part of speech for the tokens `range`.
fn lemma_and_pos(text: &AnnotatedText, range: std::ops::Range<usize>) -> (String, Pos) {
    let toks = &text.tokens[range];
    if toks.len() == 1 {
        (toks[0].lemma.clone(), toks[0].pos)
    } else {
        let joined: Vec<&str> = toks.iter().map(|t| t.surface.as_str()).collect();
        (normalize_phrase(&joined.join(" ")), Pos::Other)
    }
}

/// A target unit for an arbitrary token-aligned span.
pub fn target_for_span(text: &AnnotatedText, span: Span, provenance: Provenance) -> Result<TargetUnit, TextError> {
    let range = text.tokens_for_span(span)?;
    let (lemma, pos) = lemma_and_pos(text, range);
    Ok(TargetUnit { span, surface: text.slice(span).to_owned(), lemma, pos, provenance })
}

fn mwe_key(text: &AnnotatedText, range: std::ops::Range<usize>, lemmas: bool) -> String {
    let words: Vec<&str> = text.tokens[range]
        .iter()
        .map(|t| if lemmas { t.lemma.as_str() } else { t.surface.as_str() })
        .collect();
    words.join("_")
}

/// Spans the classifier considers: longest multiword-lexicon matches, then every other alphabetic token.
pub fn candidate_spans(text: &AnnotatedText, res: &Resources) -> Vec<Span> {
    let mut spans = Vec::new();
    for s in 0..text.sentences.len() {
        let range = text.sentence_tokens(s);
        let mut i = range.start;
        while i < range.end {
            let longest = res.mwe.max_words().min(range.end - i);
            let matched = (2..=longest).rev().find(|&len| {
                let r = i..i + len;
                text.tokens[r.clone()].iter().all(|t| t.is_alpha)
                    && (res.mwe.contains(&mwe_key(text, r.clone(), false)) || res.mwe.contains(&mwe_key(text, r, true)))
            });
            match matched {
                Some(len) => {
                    spans.push(Span::new(text.tokens[i].span.start, text.tokens[i + len - 1].span.end));
                    i += len;
                }
                None => {
                    if text.tokens[i].is_alpha {
                        spans.push(text.tokens[i].span);
                    }
                    i += 1;
                }
            }
        }
    }
    spans
}

pub fn extract_features(text: &AnnotatedText, span: Span, res: &Resources) -> Result<TargetFeatures, TextError> {
    let range = text.tokens_for_span(span)?;
    let surface = text.slice(span);
    let (lemma, pos) = lemma_and_pos(text, range.clone());
    let toks = &text.tokens[range.clone()];

    let mut freq = res.freq.log_freq(surface);
    if freq == 0.0 {
        freq = res.freq.log_freq(&lemma);
    }
    let in_mwe = res.mwe.contains(surface) || res.mwe.contains(&lemma) || res.mwe.contains(&mwe_key(text, range.clone(), true));
    let sentence = text.sentence_tokens(text.sentence_of(range.start));
    let n = sentence.len();
    let position = if n > 1 { (range.start - sentence.start) as f64 / (n - 1) as f64 } else { 0.0 };
    let cands = res.candidates(&lemma, pos).len();

    Ok(TargetFeatures {
        length_chars: surface.chars().count() as f64,
        length_syllables: syllables(surface) as f64,
        corpus_log_freq: freq,
        in_mwe_lexicon: if in_mwe { 1.0 } else { 0.0 },
        pos_is_content: if toks.iter().any(|t| t.pos.is_content()) { 1.0 } else { 0.0 },
        sentence_position: position,
        candidate_availability: (1.0 + cands as f64).log10(),
    })
}

/// Every candidate span whose ensemble margin exceeds `threshold`, in text order.
pub fn predict_targets<T: Scalar>(
    text: &AnnotatedText,
    model: &StumpEnsemble<T>,
    res: &Resources,
    threshold: T,
) -> Vec<TargetUnit> {
    candidate_spans(text, res)
        .into_iter()
        .filter(|&span| {
            let f = extract_features(text, span, res).expect("candidate spans are aligned");
            model.margin(&f.to_vec::<T>()) > threshold
        })
        .map(|span| target_for_span(text, span, Provenance::Model).expect("candidate spans are aligned"))
        .collect()
}

/// Cold-start targets: candidate spans whose lemma is in the seed lexicon.
pub fn seed_targets(text: &AnnotatedText, res: &Resources) -> Vec<TargetUnit> {
    candidate_spans(text, res)
        .into_iter()
        .map(|span| target_for_span(text, span, Provenance::Seed).expect("candidate spans are aligned"))
        .filter(|t| res.seed_targets.contains(&t.lemma) || res.seed_targets.contains(&t.surface))
        .collect()
}
