use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::text::Segmenter;

use super::{read_file, ResourceError};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Add-one smoothed n-gram model over lowercased tokens.
///
/// `P(w | h) = (c(h, w) + 1) / (c(h) + V)` where `h` is the previous
/// `order - 1` tokens, padded with `<s>`, and `V` counts `<s>` and `</s>`.
#[derive(Debug, Clone)]
pub struct NgramLanguageModel {
    order: usize,
    counts: HashMap<String, u64>,
    history_counts: HashMap<String, u64>,
    vocab_size: usize,
    total_unigrams: u64,
}

fn key(tokens: &[&str]) -> String {
    tokens.join(" ")
}

impl NgramLanguageModel {
    /// Counts n-grams over pre-tokenized sentences.
    pub fn from_sentences<S: AsRef<str>>(sentences: impl IntoIterator<Item = Vec<S>>, order: usize) -> Self {
        assert!(order >= 1, "order must be at least 1");
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut history_counts: HashMap<String, u64> = HashMap::new();
        let mut vocab: HashSet<String> = [BOS, EOS].into_iter().map(String::from).collect();
        let mut total_unigrams = 0;
        for sentence in sentences {
            let words: Vec<String> = sentence.iter().map(|w| w.as_ref().to_lowercase()).collect();
            if words.is_empty() {
                continue;
            }
            let mut padded: Vec<&str> = vec![BOS; order - 1];
            padded.extend(words.iter().map(String::as_str));
            padded.push(EOS);
            vocab.extend(words.iter().cloned());
            for i in (order - 1)..padded.len() {
                total_unigrams += 1;
                for n in 1..=order {
                    let gram = &padded[i + 1 - n..=i];
                    *counts.entry(key(gram)).or_insert(0) += 1;
                    *history_counts.entry(key(&gram[..n - 1])).or_insert(0) += 1;
                }
            }
        }
        NgramLanguageModel { order, counts, history_counts, vocab_size: vocab.len(), total_unigrams }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn total_unigrams(&self) -> u64 {
        self.total_unigrams
    }

    pub fn count(&self, gram: &[&str]) -> u64 {
        self.counts.get(&key(gram)).copied().unwrap_or(0)
    }

    /// Count of `history` as a conditioning context.
    pub fn history_count(&self, history: &[&str]) -> u64 {
        self.history_counts.get(&key(history)).copied().unwrap_or(0)
    }

    /// `log10 P(word | history)`; `history` must hold `order - 1` tokens.
    pub fn cond_logprob(&self, history: &[&str], word: &str) -> f64 {
        debug_assert_eq!(history.len(), self.order - 1);
        let mut gram: Vec<&str> = history.to_vec();
        gram.push(word);
        let num = self.count(&gram) as f64 + 1.0;
        let den = self.history_count(history) as f64 + self.vocab_size as f64;
        (num / den).log10()
    }

    /// Sum of per-token log10 probabilities, with `<s>` padding and no `</s>` term.
    pub fn logprob<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let lowered: Vec<String> = tokens.iter().map(|t| t.as_ref().to_lowercase()).collect();
        let mut padded: Vec<&str> = vec![BOS; self.order - 1];
        padded.extend(lowered.iter().map(String::as_str));
        (self.order - 1..padded.len())
            .map(|i| self.cond_logprob(&padded[i + 1 - self.order..i], padded[i]))
            .sum()
    }
}

/// Builds a model from a one-sentence-per-line plain text corpus.
pub fn build_lm(corpus_path: impl AsRef<Path>, order: usize) -> Result<NgramLanguageModel, ResourceError> {
    let path = corpus_path.as_ref();
    let content = read_file(path)?;
    let sentences: Vec<Vec<String>> = content.lines().map(Segmenter::words).filter(|w| !w.is_empty()).collect();
    if sentences.is_empty() {
        return Err(ResourceError::EmptyCorpus(path.to_owned()));
    }
    Ok(NgramLanguageModel::from_sentences(sentences, order))
}

pub fn lm_logprob<S: AsRef<str>>(lm: &NgramLanguageModel, tokens: &[S]) -> f64 {
    lm.logprob(tokens)
}
