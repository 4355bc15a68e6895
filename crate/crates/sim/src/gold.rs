//! Gold relevance files, ranking dumps, and NDCG over them.
//!
//! Gold: `sentence<TAB>start<TAB>end<TAB>cand=grade|cand=grade|...`
//! Dump: `sentence<TAB>start<TAB>end<TAB>cand|cand|...` (best first)

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use adapara_core::ranker::{ndcg_at_k, Ndcg};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TargetKey {
    pub sentence: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GoldFile {
    pub entries: BTreeMap<TargetKey, BTreeMap<String, u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RankingDump {
    pub entries: Vec<(TargetKey, Vec<String>)>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error("EMPTY_DUMP: the ranking dump has no entries")]
    EmptyDump,
}

fn read(path: &Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|source| EvalError::Io { path: path.to_owned(), source })
}

/// Splits a line into its key and the `|`-separated list field.
fn split_line(line: &str) -> Result<(TargetKey, &str), String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 tab-separated fields, found {}", fields.len()));
    }
    let start: usize = fields[1].parse().map_err(|_| format!("bad start offset {:?}", fields[1]))?;
    let end: usize = fields[2].parse().map_err(|_| format!("bad end offset {:?}", fields[2]))?;
    if start >= end {
        return Err(format!("empty span [{start}, {end})"));
    }
    Ok((TargetKey { sentence: fields[0].to_owned(), start, end }, fields[3]))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

impl GoldFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, EvalError> {
        let mut gold = GoldFile::default();
        for (line, content) in content_lines(text) {
            let err = |reason: String| EvalError::Parse { path: path.to_owned(), line, reason };
            let (key, list) = split_line(content).map_err(err)?;
            let mut grades = BTreeMap::new();
            for item in list.split('|') {
                let (cand, grade) = item.rsplit_once('=').ok_or_else(|| err(format!("expected cand=grade, found {item:?}")))?;
                let grade: u32 = grade.parse().ok().filter(|g| *g <= 3).ok_or_else(|| err(format!("grade must be 0..=3, found {grade:?}")))?;
                grades.insert(cand.to_owned(), grade);
            }
            if grades.values().all(|&g| g == 0) {
                return Err(err("entry has no candidate with a positive grade".into()));
            }
            gold.entries.insert(key, grades);
        }
        Ok(gold)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&read(path)?, path)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (key, grades) in &self.entries {
            // highest grade first, then alphabetical
            let mut items: Vec<(&String, &u32)> = grades.iter().collect();
            items.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
            let list: Vec<String> = items.iter().map(|(c, g)| format!("{c}={g}")).collect();
            writeln!(out, "{}\t{}\t{}\t{}", key.sentence, key.start, key.end, list.join("|")).unwrap();
        }
        out
    }
}

impl RankingDump {
    pub fn parse(text: &str, path: &Path) -> Result<Self, EvalError> {
        let mut dump = RankingDump::default();
        for (line, content) in content_lines(text) {
            let (key, list) = split_line(content).map_err(|reason| EvalError::Parse { path: path.to_owned(), line, reason })?;
            dump.entries.push((key, list.split('|').filter(|c| !c.is_empty()).map(str::to_owned).collect()));
        }
        Ok(dump)
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&read(path)?, path)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (key, ranking) in &self.entries {
            writeln!(out, "{}\t{}\t{}\t{}", key.sentence, key.start, key.end, ranking.join("|")).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetScore {
    pub key: TargetKey,
    pub ndcg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdcgReport {
    pub k: usize,
    pub per_target: Vec<TargetScore>,
    /// Mean over `per_target`; 0 when nothing was scored.
    pub mean: f64,
    /// Dump entries with no gold entry.
    pub excluded: Vec<TargetKey>,
}

/// Scores every dump entry that has gold grades.
pub fn evaluate(dump: &RankingDump, gold: &GoldFile, k: usize) -> Result<NdcgReport, EvalError> {
    if dump.entries.is_empty() {
        return Err(EvalError::EmptyDump);
    }
    let mut per_target = Vec::new();
    let mut excluded = Vec::new();
    for (key, ranking) in &dump.entries {
        match gold.entries.get(key) {
            Some(grades) => {
                let grades: HashMap<String, u32> = grades.iter().map(|(c, g)| (c.clone(), *g)).collect();
                let n: Ndcg<f64> = ndcg_at_k(ranking, &grades, k);
                per_target.push(TargetScore { key: key.clone(), ndcg: n.value });
            }
            None => excluded.push(key.clone()),
        }
    }
    let mean = if per_target.is_empty() {
        0.0
    } else {
        per_target.iter().map(|t| t.ndcg).sum::<f64>() / per_target.len() as f64
    };
    Ok(NdcgReport { k, per_target, mean, excluded })
}

pub fn eval_ndcg_file(dump: &Path, gold: &Path, k: usize) -> Result<NdcgReport, EvalError> {
    evaluate(&RankingDump::load(dump)?, &GoldFile::load(gold)?, k)
}
