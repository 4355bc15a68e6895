use std::path::{Path, PathBuf};

use adapara_core::adapt::AdaptConfig;
use adapara_core::engine::{ResourcePaths, DEFAULT_DISPLAY_CAP, DEFAULT_K_EMBED};
use adapara_core::ranker::TrainParams;
use adapara_core::text::DEFAULT_MAX_CHARS;
use serde::{Deserialize, Serialize};

/// Service settings from a flat `key = value` TOML file.
///
/// Every key can be overridden by an environment variable with the same name
/// in upper case (`batch_size` → `BATCH_SIZE`). Relative paths are resolved
/// against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    /// Directory laid out like `data/fixtures`; individual paths below take precedence.
    pub resources_dir: PathBuf,
    pub ppdb_path: Option<PathBuf>,
    pub synlex_path: Option<PathBuf>,
    pub dt_path: Option<PathBuf>,
    pub embeddings_path: Option<PathBuf>,
    pub freq_path: Option<PathBuf>,
    pub mwe_lexicon_path: Option<PathBuf>,
    pub seed_targets_path: Option<PathBuf>,
    pub lm_corpus_path: Option<PathBuf>,
    pub lemma_lexicon_path: Option<PathBuf>,
    pub pos_lexicon_path: Option<PathBuf>,
    /// Event log; `None` keeps events in memory only.
    pub log_path: Option<PathBuf>,
    pub model_dir: Option<PathBuf>,
    pub batch_size: u64,
    pub display_cap: usize,
    pub k_embed: usize,
    pub max_text_chars: usize,
    pub rounds: usize,
    pub target_threshold: f64,
    pub seed: u64,
    pub epochs: usize,
    pub lr: f64,
    pub l2: f64,
    pub admin_token: String,
    pub test_mode: bool,
    /// Defaults to `test_mode`.
    pub cors_allow_all: Option<bool>,
}

pub const CONFIG_KEYS: &[&str] = &[
    "bind",
    "resources_dir",
    "ppdb_path",
    "synlex_path",
    "dt_path",
    "embeddings_path",
    "freq_path",
    "mwe_lexicon_path",
    "seed_targets_path",
    "lm_corpus_path",
    "lemma_lexicon_path",
    "pos_lexicon_path",
    "log_path",
    "model_dir",
    "batch_size",
    "display_cap",
    "k_embed",
    "max_text_chars",
    "rounds",
    "target_threshold",
    "seed",
    "epochs",
    "lr",
    "l2",
    "admin_token",
    "test_mode",
    "cors_allow_all",
];

impl Default for Config {
    fn default() -> Self {
        let adapt = AdaptConfig::default();
        Config {
            bind: "127.0.0.1:8080".into(),
            resources_dir: PathBuf::from("data/fixtures"),
            ppdb_path: None,
            synlex_path: None,
            dt_path: None,
            embeddings_path: None,
            freq_path: None,
            mwe_lexicon_path: None,
            seed_targets_path: None,
            lm_corpus_path: None,
            lemma_lexicon_path: None,
            pos_lexicon_path: None,
            log_path: Some(PathBuf::from("var/events.ndjson")),
            model_dir: Some(PathBuf::from("var/models")),
            batch_size: adapt.batch_size,
            display_cap: DEFAULT_DISPLAY_CAP,
            k_embed: DEFAULT_K_EMBED,
            max_text_chars: DEFAULT_MAX_CHARS,
            rounds: adapt.rounds,
            target_threshold: adapt.target_threshold,
            seed: adapt.seed,
            epochs: adapt.ranker.epochs,
            lr: adapt.ranker.lr,
            l2: adapt.ranker.l2,
            admin_token: String::new(),
            test_mode: false,
            cors_allow_all: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl Config {
    /// Reads `path` (if any) and applies overrides from `env`.
    pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let (text, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.to_owned(), source })?;
                (text, p.parent().map(Path::to_owned).unwrap_or_default())
            }
            None => (String::new(), PathBuf::new()),
        };
        Self::parse(&text, &base, env)
    }

    pub fn parse(text: &str, base: &Path, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for key in CONFIG_KEYS {
            if let Some(raw) = env(&key.to_uppercase()) {
                table.insert((*key).to_owned(), env_value(&raw));
            }
        }
        let mut config: Config =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::Invalid(e.to_string()))?;
        config.resolve(base);
        config.check()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.resources_dir);
        for p in [
            &mut self.ppdb_path,
            &mut self.synlex_path,
            &mut self.dt_path,
            &mut self.embeddings_path,
            &mut self.freq_path,
            &mut self.mwe_lexicon_path,
            &mut self.seed_targets_path,
            &mut self.lm_corpus_path,
            &mut self.lemma_lexicon_path,
            &mut self.pos_lexicon_path,
            &mut self.log_path,
            &mut self.model_dir,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    fn check(&self) -> Result<(), ConfigError> {
        let positive = [
            ("batch_size", self.batch_size as usize),
            ("display_cap", self.display_cap),
            ("rounds", self.rounds),
            ("max_text_chars", self.max_text_chars),
        ];
        if let Some((key, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::Invalid(format!("{key} must be at least 1")));
        }
        if !(self.lr > 0.0 && self.l2 >= 0.0 && self.target_threshold.is_finite()) {
            return Err(ConfigError::Invalid("lr must be positive, l2 non-negative".into()));
        }
        Ok(())
    }

    pub fn resource_paths(&self) -> ResourcePaths {
        let d = ResourcePaths::fixture_dir(&self.resources_dir);
        let pick = |own: &Option<PathBuf>, default: Option<PathBuf>| own.clone().or(default);
        ResourcePaths {
            ppdb: pick(&self.ppdb_path, d.ppdb),
            synlex: pick(&self.synlex_path, d.synlex),
            dt: pick(&self.dt_path, d.dt),
            embeddings: pick(&self.embeddings_path, d.embeddings),
            freq: self.freq_path.clone().unwrap_or(d.freq),
            mwe_lexicon: self.mwe_lexicon_path.clone().unwrap_or(d.mwe_lexicon),
            seed_targets: self.seed_targets_path.clone().unwrap_or(d.seed_targets),
            lm_corpus: self.lm_corpus_path.clone().unwrap_or(d.lm_corpus),
            lemma_lexicon: pick(&self.lemma_lexicon_path, d.lemma_lexicon),
            pos_lexicon: pick(&self.pos_lexicon_path, d.pos_lexicon),
        }
    }

    pub fn adapt_config(&self) -> AdaptConfig {
        AdaptConfig {
            batch_size: self.batch_size,
            rounds: self.rounds,
            target_threshold: self.target_threshold,
            seed: self.seed,
            ranker: TrainParams { epochs: self.epochs, lr: self.lr, l2: self.l2, seed: self.seed },
        }
    }

    pub fn cors_allow_all(&self) -> bool {
        self.cors_allow_all.unwrap_or(self.test_mode)
    }
}

/// Environment values are TOML literals when they parse as one, strings otherwise.
fn env_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    #[test]
    fn defaults_from_empty_file() {
        let c = Config::parse("", Path::new(""), no_env).unwrap();
        assert_eq!(c.batch_size, 100);
        assert_eq!(c.display_cap, 10);
        assert!(!c.cors_allow_all());
    }

    #[test]
    fn file_values_and_env_overrides() {
        let text = "batch_size = 5\nadmin_token = \"secret\"\nlog_path = \"ev.ndjson\"\n";
        let env = |k: &str| match k {
            "BATCH_SIZE" => Some("7".to_string()),
            "ADMIN_TOKEN" => Some("from env".to_string()),
            _ => None,
        };
        let c = Config::parse(text, Path::new("/srv/conf"), env).unwrap();
        assert_eq!(c.batch_size, 7);
        assert_eq!(c.admin_token, "from env");
        assert_eq!(c.log_path, Some(PathBuf::from("/srv/conf/ev.ndjson")));
        assert_eq!(c.resource_paths().freq, PathBuf::from("/srv/conf/data/fixtures/freq.tsv"));
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(Config::parse("batchsize = 3", Path::new(""), no_env).is_err());
        assert!(Config::parse("batch_size = 0", Path::new(""), no_env).is_err());
        assert!(Config::parse("batch_size = \"many\"", Path::new(""), no_env).is_err());
    }
}
