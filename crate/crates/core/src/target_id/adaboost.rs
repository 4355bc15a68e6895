use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Axis-aligned decision stump: `polarity` when `x[feature] > threshold`, else `-polarity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Stump<T> {
    pub feature: usize,
    pub threshold: T,
    pub polarity: i8,
    pub alpha: T,
}

impl<T: Scalar> Stump<T> {
    #[inline]
    pub fn predict(&self, x: &[T]) -> i8 {
        if x[self.feature] > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct StumpEnsemble<T> {
    pub feature_version: String,
    pub dim: usize,
    pub stumps: Vec<Stump<T>>,
}

impl<T: Scalar> StumpEnsemble<T> {
    /// `Σ αᵢ hᵢ(x)`.
    pub fn margin(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        self.stumps.iter().fold(T::zero(), |acc, s| acc + s.alpha * T::of(s.predict(x) as f64))
    }

    pub fn classify(&self, x: &[T]) -> i8 {
        if self.margin(x) > T::zero() {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RoundTrace<T> {
    pub epsilon: T,
    pub alpha: T,
    /// Fraction of training examples the ensemble misclassifies after this round.
    pub training_error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedEnsemble<T> {
    pub ensemble: StumpEnsemble<T>,
    pub trace: Vec<RoundTrace<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdaBoostError {
    #[error("no training examples")]
    NoExamples,
    #[error("training examples all carry the same label")]
    SingleClassData,
    #[error("no stump does better than chance")]
    NoWeakLearner,
    #[error("example {index} has {found} features, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
}

const EPS_MIN: f64 = 1e-10;

/// AdaBoost.M1 over decision stumps with thresholds at midpoints of distinct feature values.
///
/// Stops early when the best stump has weighted error ≥ 0.5, or after a stump
/// that classifies every example correctly.
pub fn train_adaboost<T: Scalar>(
    xs: &[Vec<T>],
    ys: &[i8],
    rounds: usize,
    feature_version: &str,
) -> Result<TrainedEnsemble<T>, AdaBoostError> {
    assert_eq!(xs.len(), ys.len());
    assert!(rounds >= 1);
    let n = xs.len();
    if n == 0 {
        return Err(AdaBoostError::NoExamples);
    }
    let dim = xs[0].len();
    if let Some((index, x)) = xs.iter().enumerate().find(|(_, x)| x.len() != dim) {
        return Err(AdaBoostError::DimensionMismatch { index, expected: dim, found: x.len() });
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(AdaBoostError::SingleClassData);
    }

    let order: Vec<Vec<usize>> = (0..dim)
        .map(|f| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| xs[a][f].partial_cmp(&xs[b][f]).expect("features are finite"));
            idx
        })
        .collect();

    let mut w = vec![T::one() / T::of(n as f64); n];
    let mut margins = vec![T::zero(); n];
    let mut ensemble = StumpEnsemble { feature_version: feature_version.to_owned(), dim, stumps: Vec::new() };
    let mut trace = Vec::new();
    let half = T::of(0.5);

    for round in 0..rounds {
        let Some((feature, threshold, polarity, eps)) = best_stump(xs, ys, &w, &order) else {
            return Err(AdaBoostError::NoWeakLearner);
        };
        if eps >= half {
            if round == 0 {
                return Err(AdaBoostError::NoWeakLearner);
            }
            break;
        }
        let clamped = eps.max(T::of(EPS_MIN)).min(T::one() - T::of(EPS_MIN));
        let alpha = half * ((T::one() - clamped) / clamped).ln();
        let stump = Stump { feature, threshold, polarity, alpha };

        let mut total = T::zero();
        for i in 0..n {
            let yh = T::of((ys[i] * stump.predict(&xs[i])) as f64);
            margins[i] += alpha * T::of(stump.predict(&xs[i]) as f64);
            w[i] *= (-alpha * yh).exp();
            total += w[i];
        }
        for wi in &mut w {
            *wi /= total;
        }
        ensemble.stumps.push(stump);

        let wrong = (0..n).filter(|&i| (margins[i] > T::zero()) != (ys[i] > 0)).count();
        trace.push(RoundTrace { epsilon: eps, alpha, training_error: T::of(wrong as f64 / n as f64) });
        if eps <= T::of(EPS_MIN) {
            break;
        }
    }
    Ok(TrainedEnsemble { ensemble, trace })
}

/// Lowest weighted-error stump; ties keep the first in (feature, threshold, +/−) order.
fn best_stump<T: Scalar>(xs: &[Vec<T>], ys: &[i8], w: &[T], order: &[Vec<usize>]) -> Option<(usize, T, i8, T)> {
    // Error of polarity +1 with every example predicted +1.
    let neg_mass = ys.iter().zip(w).filter(|(&y, _)| y < 0).fold(T::zero(), |acc, (_, &wi)| acc + wi);
    let total = w.iter().fold(T::zero(), |acc, &wi| acc + wi);
    let mut best: Option<(usize, T, i8, T)> = None;
    for (f, idx) in order.iter().enumerate() {
        let mut err_plus = neg_mass;
        let mut j = 0;
        while j < idx.len() {
            let v = xs[idx[j]][f];
            // Move every example with value v to the `-polarity` side.
            while j < idx.len() && xs[idx[j]][f] == v {
                let i = idx[j];
                err_plus += if ys[i] > 0 { w[i] } else { -w[i] };
                j += 1;
            }
            if j == idx.len() {
                break;
            }
            let threshold = (v + xs[idx[j]][f]) * T::of(0.5);
            for (polarity, err) in [(1i8, err_plus), (-1i8, total - err_plus)] {
                // running sums can dip just below zero
                let err = err.max(T::zero());
                if best.as_ref().is_none_or(|b| err < b.3) {
                    best = Some((f, threshold, polarity, err));
                }
            }
        }
    }
    best
}
