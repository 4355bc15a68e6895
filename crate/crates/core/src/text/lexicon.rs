use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::Pos;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
}

fn read(path: &Path) -> Result<String, LexiconError> {
    std::fs::read_to_string(path).map_err(|source| LexiconError::Io { path: path.to_owned(), source })
}

fn data_lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// `(lowercased surface, pos) -> lemma` table.
#[derive(Debug, Clone, Default)]
pub struct LemmaLexicon {
    entries: HashMap<(String, Pos), String>,
}

impl LemmaLexicon {
    /// Reads `surface<TAB>pos<TAB>lemma` lines.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let content = read(path)?;
        let mut lex = LemmaLexicon::default();
        for (line, l) in data_lines(&content) {
            let fields: Vec<&str> = l.split('\t').collect();
            let parse_err = |reason: String| LexiconError::Parse { path: path.to_owned(), line, reason };
            if fields.len() != 3 {
                return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
            }
            let pos = fields[1].parse::<Pos>().map_err(parse_err)?;
            lex.insert(fields[0], pos, fields[2]);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, surface: &str, pos: Pos, lemma: &str) {
        self.entries
            .entry((surface.trim().to_lowercase(), pos))
            .or_insert_with(|| lemma.trim().to_lowercase());
    }

    /// Lexicon lemma for `(lowercase(surface), pos)`, else the lowercased surface.
    pub fn lemma_of(&self, surface: &str, pos: Pos) -> String {
        let key = (surface.to_lowercase(), pos);
        match self.entries.get(&key) {
            Some(lemma) => lemma.clone(),
            None => key.0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Most-frequent-tag lookup; unknown words are [`Pos::Other`].
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    entries: HashMap<String, Pos>,
}

impl PosLexicon {
    /// Reads `surface<TAB>pos` lines. The first entry for a surface wins.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let content = read(path)?;
        let mut lex = PosLexicon::default();
        for (line, l) in data_lines(&content) {
            let fields: Vec<&str> = l.split('\t').collect();
            let parse_err = |reason: String| LexiconError::Parse { path: path.to_owned(), line, reason };
            if fields.len() != 2 {
                return Err(parse_err(format!("expected 2 fields, found {}", fields.len())));
            }
            let pos = fields[1].parse::<Pos>().map_err(parse_err)?;
            lex.insert(fields[0], pos);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, surface: &str, pos: Pos) {
        self.entries.entry(surface.trim().to_lowercase()).or_insert(pos);
    }

    pub fn tag(&self, surface: &str) -> Pos {
        self.entries.get(&surface.to_lowercase()).copied().unwrap_or(Pos::Other)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
