//! Deterministic text segmentation and span bookkeeping.
//!
//! Every reference to text elsewhere in the crate is a [`Span`] of Unicode
//! scalar value offsets into an [`AnnotatedText`].

mod lexicon;
mod segment;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use lexicon::{LemmaLexicon, LexiconError, PosLexicon};
pub use segment::{Segmenter, ABBREVIATIONS, DEFAULT_MAX_CHARS};

/// Half-open `[start, end)` range of character offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start < end, "empty or inverted span [{start}, {end})");
        Span { start, end }
    }

    pub fn try_new(start: usize, end: usize) -> Option<Self> {
        (start < end).then_some(Span { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Other,
}

impl Pos {
    pub fn is_content(self) -> bool {
        !matches!(self, Pos::Other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Other => "OTHER",
        }
    }
}

impl std::str::FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NOUN" => Ok(Pos::Noun),
            "VERB" => Ok(Pos::Verb),
            "ADJ" => Ok(Pos::Adj),
            "ADV" => Ok(Pos::Adv),
            "OTHER" => Ok(Pos::Other),
            other => Err(format!("unknown POS tag {other:?}")),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub span: Span,
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    pub is_alpha: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("text is empty")]
    EmptyText,
    #[error("text has {len} characters, limit is {max}")]
    TextTooLarge { len: usize, max: usize },
    #[error("span {span} exceeds text length {len}")]
    SpanOutOfRange { span: Span, len: usize },
    #[error("span {0} does not align to token boundaries")]
    SpanMisaligned(Span),
}

/// A document with sentence and token segmentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedText {
    pub doc_id: String,
    pub text: String,
    pub sentences: Vec<Span>,
    pub tokens: Vec<Token>,
    /// Byte offset of every char boundary, plus the final length.
    byte_offsets: Vec<usize>,
}

impl AnnotatedText {
    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.byte_offsets.len() - 1
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[self.byte_offsets[span.start]..self.byte_offsets[span.end]]
    }

    pub fn check_span(&self, span: Span) -> Result<(), TextError> {
        if span.is_empty() || span.end > self.char_len() {
            return Err(TextError::SpanOutOfRange { span, len: self.char_len() });
        }
        Ok(())
    }

    /// Index of the sentence containing token `idx`.
    pub fn sentence_of(&self, idx: usize) -> usize {
        let start = self.tokens[idx].span.start;
        self.sentences
            .partition_point(|s| s.end <= start)
            .min(self.sentences.len() - 1)
    }

    /// Token index range `[first, last]` inside sentence `s`.
    pub fn sentence_tokens(&self, s: usize) -> std::ops::Range<usize> {
        let sent = self.sentences[s];
        let lo = self.tokens.partition_point(|t| t.span.start < sent.start);
        let hi = self.tokens.partition_point(|t| t.span.start < sent.end);
        lo..hi
    }

    /// Maps a span onto the tokens it covers exactly.
    pub fn tokens_for_span(&self, span: Span) -> Result<std::ops::Range<usize>, TextError> {
        self.check_span(span)?;
        let lo = self.tokens.partition_point(|t| t.span.start < span.start);
        let hi = self.tokens.partition_point(|t| t.span.end <= span.end);
        let aligned = lo < hi
            && self.tokens[lo].span.start == span.start
            && self.tokens[hi - 1].span.end == span.end
            && self.sentence_of(lo) == self.sentence_of(hi - 1);
        if aligned {
            Ok(lo..hi)
        } else {
            Err(TextError::SpanMisaligned(span))
        }
    }
}
