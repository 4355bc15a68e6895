use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::{read_file, underscore_key, ResourceError};

/// Corpus counts from a `token<TAB>count` file. Multiword keys use `_`.
#[derive(Debug, Clone, Default)]
pub struct FrequencyList {
    counts: HashMap<String, u64>,
}

impl FrequencyList {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let content = read_file(path)?;
        let mut list = FrequencyList::default();
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| ResourceError::Malformed { path: path.to_owned(), line: i + 1, reason: reason.into() };
            let (token, count) = line.split_once('\t').ok_or_else(|| malformed("expected token<TAB>count"))?;
            let count: u64 = count.trim().parse().map_err(|_| malformed("count is not a non-negative integer"))?;
            list.insert(token, count);
        }
        Ok(list)
    }

    pub fn insert(&mut self, token: &str, count: u64) {
        *self.counts.entry(underscore_key(token)).or_insert(0) += count;
    }

    pub fn count(&self, phrase: &str) -> u64 {
        self.counts.get(&underscore_key(phrase)).copied().unwrap_or(0)
    }

    /// `log10(count)`, or 0 when the phrase is absent.
    pub fn log_freq(&self, phrase: &str) -> f64 {
        match self.count(phrase) {
            0 => 0.0,
            c => (c as f64).log10(),
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// A set of lemmas or underscore-joined multiword units, one per line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordList {
    entries: BTreeSet<String>,
    max_words: usize,
}

impl WordList {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let content = read_file(path.as_ref())?;
        Ok(content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect())
    }

    pub fn insert(&mut self, entry: &str) {
        let key = underscore_key(entry);
        if key.is_empty() {
            return;
        }
        self.max_words = self.max_words.max(key.split('_').count());
        self.entries.insert(key);
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.contains(&underscore_key(phrase))
    }

    /// Word count of the longest entry.
    pub fn max_words(&self) -> usize {
        self.max_words
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

impl<'a> FromIterator<&'a str> for WordList {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut list = WordList::default();
        for e in iter {
            list.insert(e);
        }
        list
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absent_token_has_zero_log_freq() {
        let mut f = FrequencyList::default();
        f.insert("cat", 1000);
        assert_eq!(f.log_freq("Cat"), 3.0);
        assert_eq!(f.log_freq("dog"), 0.0);
    }

    #[test]
    fn multiword_keys_share_spelling() {
        let mut f = FrequencyList::default();
        f.insert("new_york", 100);
        assert_eq!(f.count("New York"), 100);
        let w: WordList = ["in_order_to", "big"].into_iter().collect();
        assert!(w.contains("in order to"));
        assert_eq!(w.max_words(), 3);
    }
}
