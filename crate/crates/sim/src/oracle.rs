//! Synthetic users with a private linear preference over ranking features.

use std::collections::BTreeSet;

use adapara_core::engine::Resources;
use adapara_core::ranker::{extract_rank_features, RANK_DIM};
use adapara_core::target_id::TargetUnit;
use adapara_core::text::AnnotatedText;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Hidden preference shared by the default oracle population, in ranking-feature order.
pub const DEFAULT_TRUE_WEIGHTS: [f64; RANK_DIM] = [1.0, 0.3, 0.6, -0.8, 0.4, 0.6, 0.0, -0.6, 0.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleUser {
    pub name: String,
    pub true_weights: [f64; RANK_DIM],
    /// 0 selects the utility maximum; larger values sample from a softmax.
    pub noise_temp: f64,
    /// Lemmas this user always wants paraphrased.
    pub highlight_policy: BTreeSet<String>,
    pub seed: u64,
}

impl OracleUser {
    /// Utility of replacing `target` with `candidate` in context; `None` if it is not a known candidate.
    pub fn utility(&self, target: &TargetUnit, candidate: &str, text: &AnnotatedText, res: &Resources) -> Option<f64> {
        let cands = res.candidates(&target.lemma, target.pos);
        let (i, _) = cands.get(candidate)?;
        let f = extract_rank_features(target, &cands, i, text, res).to_array();
        Some(f.iter().zip(&self.true_weights).map(|(a, b)| a * b).sum())
    }

    pub fn wants(&self, target: &TargetUnit) -> bool {
        self.highlight_policy.contains(&target.lemma)
    }

    /// Index of the chosen entry of `displayed`.
    pub fn choose(
        &self,
        target: &TargetUnit,
        displayed: &[String],
        text: &AnnotatedText,
        res: &Resources,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let utils: Vec<f64> =
            displayed.iter().map(|c| self.utility(target, c, text, res).unwrap_or(f64::NEG_INFINITY)).collect();
        if self.noise_temp <= 0.0 {
            // first maximum
            return utils.iter().enumerate().fold(0, |best, (i, &u)| if u > utils[best] { i } else { best });
        }
        let top = utils.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = utils.iter().map(|&u| ((u - top) / self.noise_temp).exp()).collect();
        let mut r = rng.gen::<f64>() * weights.iter().sum::<f64>();
        for (i, w) in weights.iter().enumerate() {
            if r < *w {
                return i;
            }
            r -= w;
        }
        weights.len() - 1
    }
}

/// Gold grades from the utility order: best 3, next two 2, next three 1, rest 0.
pub fn grade_for_rank(rank: usize) -> u32 {
    match rank {
        0 => 3,
        1..=2 => 2,
        3..=5 => 1,
        _ => 0,
    }
}
