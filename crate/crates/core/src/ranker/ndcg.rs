use std::collections::HashMap;

use crate::scalar::Scalar;

pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ndcg<T> {
    pub value: T,
    /// No gold grade was positive; `value` is 0 by convention.
    pub all_zero_gold: bool,
}

/// `Σ_{i=1..k} (2^gᵢ − 1) / log2(i + 1)`.
pub fn dcg_at_k<T: Scalar>(grades: &[u32], k: usize) -> T {
    grades.iter().take(k).enumerate().fold(T::zero(), |acc, (i, &g)| {
        let gain = T::of(2f64.powi(g as i32) - 1.0);
        acc + gain / T::of((i + 2) as f64).log2()
    })
}

/// NDCG@k of `predicted` grades against the best ordering of `gold` grades.
pub fn ndcg_from_grades<T: Scalar>(predicted: &[u32], gold: &[u32], k: usize) -> Ndcg<T> {
    let mut ideal = gold.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: T = dcg_at_k(&ideal, k);
    if idcg <= T::zero() {
        return Ndcg { value: T::zero(), all_zero_gold: true };
    }
    let value = (dcg_at_k::<T>(predicted, k) / idcg).min(T::one());
    Ndcg { value, all_zero_gold: false }
}

/// NDCG@k of a ranked list against graded gold relevance; ungraded items count as 0.
pub fn ndcg_at_k<T: Scalar, S: AsRef<str>>(predicted: &[S], gold: &HashMap<String, u32>, k: usize) -> Ndcg<T> {
    let grades: Vec<u32> = predicted.iter().map(|c| gold.get(c.as_ref()).copied().unwrap_or(0)).collect();
    let gold_grades: Vec<u32> = gold.values().copied().collect();
    ndcg_from_grades(&grades, &gold_grades, k)
}
