//! The bundle of loaded resources every serving and training path reads.

use std::path::PathBuf;

use crate::resources::{
    build_lm, candidates_for, CandidateSet, FrequencyList, NgramLanguageModel, Providers, ResourceError, WordList,
};
use crate::text::{LemmaLexicon, LexiconError, Pos, PosLexicon, Segmenter};

pub const DEFAULT_K_EMBED: usize = 10;
pub const DEFAULT_DISPLAY_CAP: usize = 10;
pub const DEFAULT_LM_ORDER: usize = 2;

/// File locations for [`Resources::load`]. Absent providers are skipped.
#[derive(Debug, Clone, Default)]
pub struct ResourcePaths {
    pub ppdb: Option<PathBuf>,
    pub synlex: Option<PathBuf>,
    pub dt: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub freq: PathBuf,
    pub mwe_lexicon: PathBuf,
    pub seed_targets: PathBuf,
    pub lm_corpus: PathBuf,
    pub lemma_lexicon: Option<PathBuf>,
    pub pos_lexicon: Option<PathBuf>,
}

impl ResourcePaths {
    /// The layout of the fixture directory shipped with the repository.
    pub fn fixture_dir(dir: impl Into<PathBuf>) -> Self {
        let dir = dir.into();
        ResourcePaths {
            ppdb: Some(dir.join("ppdb.txt")),
            synlex: Some(dir.join("synlex.tsv")),
            dt: Some(dir.join("dt.tsv")),
            embeddings: Some(dir.join("embeddings.txt")),
            freq: dir.join("freq.tsv"),
            mwe_lexicon: dir.join("mwe_lexicon.txt"),
            seed_targets: dir.join("seed_targets.txt"),
            lm_corpus: dir.join("lm_corpus.txt"),
            lemma_lexicon: Some(dir.join("lemma_lexicon.tsv")),
            pos_lexicon: Some(dir.join("pos_lexicon.tsv")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

#[derive(Debug, Clone)]
pub struct Resources {
    pub segmenter: Segmenter,
    pub providers: Providers,
    pub freq: FrequencyList,
    pub mwe: WordList,
    pub seed_targets: WordList,
    pub lm: NgramLanguageModel,
    pub k_embed: usize,
    pub display_cap: usize,
}

impl Resources {
    pub fn load(paths: &ResourcePaths) -> Result<Self, LoadError> {
        let mut providers = Providers::default();
        if let Some(p) = &paths.ppdb {
            providers = providers.with_ppdb(p)?;
        }
        if let Some(p) = &paths.synlex {
            providers = providers.with_synlex(p)?;
        }
        if let Some(p) = &paths.dt {
            providers = providers.with_dt(p)?;
        }
        if let Some(p) = &paths.embeddings {
            providers = providers.with_embeddings(p)?;
        }
        if providers.is_empty() {
            return Err(ResourceError::NoProviders.into());
        }
        let lemmas = match &paths.lemma_lexicon {
            Some(p) => LemmaLexicon::load(p)?,
            None => LemmaLexicon::default(),
        };
        let tags = match &paths.pos_lexicon {
            Some(p) => PosLexicon::load(p)?,
            None => PosLexicon::default(),
        };
        Ok(Resources {
            segmenter: Segmenter::new(lemmas, tags),
            providers,
            freq: FrequencyList::load(&paths.freq)?,
            mwe: WordList::load(&paths.mwe_lexicon)?,
            seed_targets: WordList::load(&paths.seed_targets)?,
            lm: build_lm(&paths.lm_corpus, DEFAULT_LM_ORDER)?,
            k_embed: DEFAULT_K_EMBED,
            display_cap: DEFAULT_DISPLAY_CAP,
        })
    }

    pub fn candidates(&self, lemma: &str, pos: Pos) -> CandidateSet {
        candidates_for(lemma, pos, &self.providers, self.k_embed).unwrap_or_else(|_| CandidateSet::empty(lemma))
    }
}
