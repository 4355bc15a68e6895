use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{dot, Scalar};

/// `winner` should score above `loser`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PreferencePair<T> {
    pub winner: Vec<T>,
    pub loser: Vec<T>,
    pub weight: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub epochs: usize,
    pub lr: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams { epochs: 100, lr: 0.1, l2: 0.001, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TrainError {
    #[error("no preference pairs to train on")]
    NoPairs,
    #[error("pair {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
}

/// `1 / (1 + exp(z))` without overflow.
fn sigmoid_neg<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        let e = (-z).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + z.exp())
    }
}

/// `Σ w·log(1 + exp(−θ·(winner − loser))) + l2/2 ‖θ‖²`.
pub fn pairwise_loss<T: Scalar>(theta: &[T], pairs: &[PreferencePair<T>], l2: f64) -> T {
    let data = pairs.iter().fold(T::zero(), |acc, p| {
        let d: Vec<T> = p.winner.iter().zip(&p.loser).map(|(&a, &b)| a - b).collect();
        let z = dot(theta, &d);
        // log(1 + exp(-z)), stable for both signs
        let l = if z >= T::zero() { (-z).exp().ln_1p() } else { -z + z.exp().ln_1p() };
        acc + p.weight * l
    });
    let reg = theta.iter().fold(T::zero(), |acc, &t| acc + t * t) * T::of(l2 / 2.0);
    data + reg
}

/// Full-batch gradient descent from θ = 0 on [`pairwise_loss`].
pub fn train_pairwise<T: Scalar>(pairs: &[PreferencePair<T>], params: &TrainParams) -> Result<Vec<T>, TrainError> {
    if pairs.is_empty() {
        return Err(TrainError::NoPairs);
    }
    let dim = pairs[0].winner.len();
    for (index, p) in pairs.iter().enumerate() {
        for found in [p.winner.len(), p.loser.len()] {
            if found != dim {
                return Err(TrainError::DimensionMismatch { index, expected: dim, found });
            }
        }
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(params.seed));
    let diffs: Vec<(Vec<T>, T)> = order
        .iter()
        .map(|&i| {
            let p = &pairs[i];
            (p.winner.iter().zip(&p.loser).map(|(&a, &b)| a - b).collect(), p.weight)
        })
        .collect();
    let total = diffs.iter().fold(T::zero(), |acc, d| acc + d.1);
    if total <= T::zero() {
        return Err(TrainError::NoPairs);
    }

    let (lr, l2) = (T::of(params.lr), T::of(params.l2));
    let mut theta = vec![T::zero(); dim];
    let mut grad = vec![T::zero(); dim];
    for _ in 0..params.epochs {
        grad.iter_mut().for_each(|g| *g = T::zero());
        for (d, w) in &diffs {
            let coef = *w * sigmoid_neg(dot(&theta, d));
            for (g, &x) in grad.iter_mut().zip(d) {
                *g -= coef * x;
            }
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= lr * (*g + l2 * *t);
        }
    }
    Ok(theta)
}

/// Fraction of pairs whose winner scores strictly higher under `theta`.
pub fn pairwise_accuracy<T: Scalar>(theta: &[T], pairs: &[PreferencePair<T>]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let right = pairs.iter().filter(|p| dot(theta, &p.winner) > dot(theta, &p.loser)).count();
    right as f64 / pairs.len() as f64
}
