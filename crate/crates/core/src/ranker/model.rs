use serde::{Deserialize, Serialize};

use super::features::{feature_order_hash, RANK_DIM};
use crate::scalar::{dot, Scalar};

pub const RANKING_MODEL_FORMAT: &str = "ranking-model/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RankingModel<T> {
    pub format: String,
    pub feature_hash: String,
    pub weights: Vec<T>,
    pub trained_on_iterations: Vec<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelLoadError {
    #[error("malformed model: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model format {0:?}")]
    Format(String),
    #[error("model was trained with a different feature order (hash {found}, expected {expected})")]
    FeatureHashMismatch { found: String, expected: String },
    #[error("model has {0} weights, expected {RANK_DIM}")]
    Dimension(usize),
}

impl<T: Scalar> RankingModel<T> {
    pub fn new(weights: Vec<T>, trained_on_iterations: Vec<u32>) -> Self {
        assert_eq!(weights.len(), RANK_DIM);
        RankingModel {
            format: RANKING_MODEL_FORMAT.to_owned(),
            feature_hash: feature_order_hash(),
            weights,
            trained_on_iterations,
        }
    }

    pub fn score(&self, features: &[T]) -> T {
        dot(&self.weights, features)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("models always serialize")
    }

    /// Parses a saved model, refusing one whose feature order differs from this build.
    pub fn from_json(json: &str) -> Result<Self, ModelLoadError> {
        let model: RankingModel<T> = serde_json::from_str(json)?;
        if model.format != RANKING_MODEL_FORMAT {
            return Err(ModelLoadError::Format(model.format));
        }
        let expected = feature_order_hash();
        if model.feature_hash != expected {
            return Err(ModelLoadError::FeatureHashMismatch { found: model.feature_hash, expected });
        }
        if model.weights.len() != RANK_DIM {
            return Err(ModelLoadError::Dimension(model.weights.len()));
        }
        Ok(model)
    }
}
