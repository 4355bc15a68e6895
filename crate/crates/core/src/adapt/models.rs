use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::Resources;
use crate::ranker::{baseline_rank, rank, RankedCandidate, RankingModel};
use crate::store::ModelVersionPair;
use crate::target_id::{predict_targets, seed_targets, StumpEnsemble, TargetUnit};
use crate::text::AnnotatedText;

pub const SEED_TARGET_ID: &str = "seed-lexicon";
pub const BASELINE_RANKER_ID: &str = "baseline-lm";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Target,
    Ranker,
}

impl ModelKind {
    pub fn dir_name(self) -> &'static str {
        match self {
            ModelKind::Target => "target",
            ModelKind::Ranker => "ranker",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelVersion {
    pub id: String,
    pub kind: ModelKind,
    /// 0 for the cold-start markers.
    pub trained_after_iteration: u32,
    pub checksum: String,
}

impl ModelVersion {
    pub fn baseline(kind: ModelKind) -> Self {
        let id = match kind {
            ModelKind::Target => SEED_TARGET_ID,
            ModelKind::Ranker => BASELINE_RANKER_ID,
        };
        ModelVersion { id: id.to_owned(), kind, trained_after_iteration: 0, checksum: String::new() }
    }

    /// Version of a trained model serialized as `json`.
    pub fn trained(kind: ModelKind, iteration: u32, json: &str) -> Self {
        let checksum = hex::encode(Sha256::digest(json.as_bytes()));
        let id = format!("{}-it{iteration}-{}", kind.dir_name(), &checksum[..12]);
        ModelVersion { id, kind, trained_after_iteration: iteration, checksum }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetModel {
    SeedLexicon,
    Ensemble(StumpEnsemble<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RankerModel {
    Baseline,
    Linear(RankingModel<f64>),
}

/// The published model pair. Readers hold an `Arc` to one of these for a whole request.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveModels {
    pub target_version: ModelVersion,
    pub target: TargetModel,
    pub ranker_version: ModelVersion,
    pub ranker: RankerModel,
}

impl Default for ActiveModels {
    fn default() -> Self {
        ActiveModels {
            target_version: ModelVersion::baseline(ModelKind::Target),
            target: TargetModel::SeedLexicon,
            ranker_version: ModelVersion::baseline(ModelKind::Ranker),
            ranker: RankerModel::Baseline,
        }
    }
}

impl ActiveModels {
    pub fn versions(&self) -> ModelVersionPair {
        ModelVersionPair { target: self.target_version.id.clone(), ranker: self.ranker_version.id.clone() }
    }

    pub fn targets(&self, text: &AnnotatedText, res: &Resources, threshold: f64) -> Vec<TargetUnit> {
        match &self.target {
            TargetModel::SeedLexicon => seed_targets(text, res),
            TargetModel::Ensemble(m) => predict_targets(text, m, res, threshold),
        }
    }

    pub fn rank(&self, target: &TargetUnit, text: &AnnotatedText, res: &Resources) -> Vec<RankedCandidate> {
        let cands = res.candidates(&target.lemma, target.pos);
        match &self.ranker {
            RankerModel::Baseline => baseline_rank(target, &cands, text, res),
            RankerModel::Linear(m) => rank(target, &cands, m, text, res),
        }
    }
}
