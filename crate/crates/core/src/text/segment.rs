use super::{AnnotatedText, LemmaLexicon, PosLexicon, Span, TextError, Token};

pub const DEFAULT_MAX_CHARS: usize = 100_000;

/// Lowercased words that do not end a sentence when followed by `.`.
pub const ABBREVIATIONS: &[&str] = &[
    "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "inc", "ltd",
    "co", "corp", "no", "fig", "mt", "gen", "col", "lt", "sgt", "rev", "approx", "dept",
];

/// Rule-based sentence splitter, tokenizer and lexicon tagger.
#[derive(Debug, Clone)]
pub struct Segmenter {
    lemmas: LemmaLexicon,
    tags: PosLexicon,
    max_chars: usize,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::new(LemmaLexicon::default(), PosLexicon::default())
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

impl Segmenter {
    pub fn new(lemmas: LemmaLexicon, tags: PosLexicon) -> Self {
        Segmenter { lemmas, tags, max_chars: DEFAULT_MAX_CHARS }
    }

    pub fn with_max_chars(mut self, max_chars: usize) -> Self {
        self.max_chars = max_chars;
        self
    }

    pub fn max_chars(&self) -> usize {
        self.max_chars
    }

    pub fn lemmas(&self) -> &LemmaLexicon {
        &self.lemmas
    }

    pub fn tags(&self) -> &PosLexicon {
        &self.tags
    }

    /// Splits `text` into sentences and tokens, tagging each token.
    pub fn segment(&self, text: &str, doc_id: &str) -> Result<AnnotatedText, TextError> {
        if text.trim().is_empty() {
            return Err(TextError::EmptyText);
        }
        let chars: Vec<char> = text.chars().collect();
        if chars.len() > self.max_chars {
            return Err(TextError::TextTooLarge { len: chars.len(), max: self.max_chars });
        }
        let mut byte_offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        byte_offsets.push(text.len());

        let spans = token_spans(&chars);
        let tokens: Vec<Token> = spans
            .iter()
            .map(|&span| {
                let surface = &text[byte_offsets[span.start]..byte_offsets[span.end]];
                let pos = self.tags.tag(surface);
                Token {
                    span,
                    surface: surface.to_owned(),
                    lemma: self.lemmas.lemma_of(surface, pos),
                    pos,
                    is_alpha: surface.chars().any(char::is_alphabetic)
                        && surface.chars().all(|c| c.is_alphabetic() || is_joiner(c)),
                }
            })
            .collect();
        let sentences = sentence_spans(&chars, &tokens);
        Ok(AnnotatedText { doc_id: doc_id.to_owned(), text: text.to_owned(), sentences, tokens, byte_offsets })
    }

    /// Lowercased word tokens of a plain string, no tagging.
    pub fn words(text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        token_spans(&chars)
            .into_iter()
            .map(|s| chars[s.start..s.end].iter().collect::<String>().to_lowercase())
            .collect()
    }
}

fn token_spans(chars: &[char]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_word_char(c) {
            let start = i;
            i += 1;
            while i < chars.len() {
                if is_word_char(chars[i]) {
                    i += 1;
                } else if is_joiner(chars[i]) && i + 1 < chars.len() && is_word_char(chars[i + 1]) {
                    i += 2;
                } else {
                    break;
                }
            }
            spans.push(Span::new(start, i));
        } else {
            spans.push(Span::new(i, i + 1));
            i += 1;
        }
    }
    spans
}

fn ends_sentence(chars: &[char], tokens: &[Token], idx: usize) -> bool {
    let tok = &tokens[idx];
    let mark = match tok.surface.as_str() {
        "." | "!" | "?" => tok.surface.as_str(),
        _ => return false,
    };
    let after = tok.span.end;
    if after >= chars.len() || !chars[after].is_whitespace() {
        return false;
    }
    let next = chars[after..].iter().find(|c| !c.is_whitespace());
    if !next.is_some_and(|c| c.is_uppercase()) {
        return false;
    }
    if mark == "." && idx > 0 {
        let prev = &tokens[idx - 1];
        if prev.span.end == tok.span.start && ABBREVIATIONS.contains(&prev.surface.to_lowercase().as_str()) {
            return false;
        }
    }
    true
}

fn sentence_spans(chars: &[char], tokens: &[Token]) -> Vec<Span> {
    let mut sentences = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, tok) in tokens.iter().enumerate() {
        let s = *start.get_or_insert(tok.span.start);
        if ends_sentence(chars, tokens, idx) {
            sentences.push(Span::new(s, tok.span.end));
            start = None;
        }
    }
    if let (Some(s), Some(last)) = (start, tokens.last()) {
        sentences.push(Span::new(s, last.span.end));
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Pos;

    fn seg(text: &str) -> AnnotatedText {
        Segmenter::default().segment(text, "d").unwrap()
    }

    fn surfaces(t: &AnnotatedText) -> Vec<&str> {
        t.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn three_word_sentence() {
        let t = seg("The cat sat.");
        assert_eq!(t.sentences, vec![Span::new(0, 12)]);
        assert_eq!(surfaces(&t), ["The", "cat", "sat", "."]);
        assert_eq!(t.tokens[1].span, Span::new(4, 7));
    }

    #[test]
    fn empty_and_blank_text_rejected() {
        assert_eq!(Segmenter::default().segment("", "d"), Err(TextError::EmptyText));
        assert_eq!(Segmenter::default().segment(" \n\t", "d"), Err(TextError::EmptyText));
    }

    #[test]
    fn over_limit_rejected() {
        let s = Segmenter::default().with_max_chars(5);
        assert_eq!(s.segment("abcdef", "d"), Err(TextError::TextTooLarge { len: 6, max: 5 }));
    }

    #[test]
    fn abbreviation_does_not_split() {
        // "Dr" is on the stop-list; "left" is not, and "He" is capitalized.
        let t = seg("Dr. Smith left. He ran.");
        assert_eq!(t.sentences.len(), 2);
        assert_eq!(t.slice(t.sentences[0]), "Dr. Smith left.");
        assert_eq!(t.slice(t.sentences[1]), "He ran.");
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(seg("It is 3 p.m. now. ok then").sentences.len(), 1);
        assert_eq!(seg("Wait! What? Yes.").sentences.len(), 3);
    }

    #[test]
    fn hyphens_and_apostrophes_stay_inside_words() {
        let t = seg("A well-known fact isn't new -- right?");
        assert_eq!(surfaces(&t), ["A", "well-known", "fact", "isn't", "new", "-", "-", "right", "?"]);
        assert!(t.tokens[1].is_alpha);
        assert!(!t.tokens[5].is_alpha);
    }

    #[test]
    fn offsets_count_chars_not_bytes() {
        let t = seg("Über café naïve.");
        assert_eq!(surfaces(&t), ["Über", "café", "naïve", "."]);
        assert_eq!(t.tokens[1].span, Span::new(5, 9));
        assert_eq!(t.slice(t.tokens[2].span), "naïve");
    }

    #[test]
    fn tagging_and_lemmas_come_from_lexicons() {
        let mut lemmas = LemmaLexicon::default();
        lemmas.insert("ran", Pos::Verb, "run");
        let mut tags = PosLexicon::default();
        tags.insert("ran", Pos::Verb);
        let t = Segmenter::new(lemmas, tags).segment("He Ran home.", "d").unwrap();
        assert_eq!(t.tokens[1].pos, Pos::Verb);
        assert_eq!(t.tokens[1].lemma, "run");
        assert_eq!(t.tokens[2].lemma, "home");
        assert_eq!(t.tokens[2].pos, Pos::Other);
    }

    #[test]
    fn span_alignment() {
        let t = seg("The big cat sat. It slept.");
        assert_eq!(t.tokens_for_span(Span::new(4, 11)).unwrap(), 1..3);
        assert!(matches!(t.tokens_for_span(Span::new(5, 11)), Err(TextError::SpanMisaligned(_))));
        assert!(matches!(t.tokens_for_span(Span::new(12, 19)), Err(TextError::SpanMisaligned(_))));
        assert!(matches!(t.tokens_for_span(Span::new(20, 99)), Err(TextError::SpanOutOfRange { .. })));
        assert_eq!(t.sentence_of(5), 1);
        assert_eq!(t.sentence_tokens(1), 5..8);
    }
}
