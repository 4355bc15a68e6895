mod common;

use std::sync::OnceLock;

use adapara_core::engine::Resources;
use adapara_core::ranker::{ndcg_at_k, rank, Ndcg, RankingModel, RANK_DIM};
use adapara_core::target_id::{
    candidate_spans, predict_targets, target_for_span, train_adaboost, Provenance, Stump, StumpEnsemble, FEATURE_VERSION,
};
use proptest::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

fn fixture() -> &'static Arc<Resources> {
    static RES: OnceLock<Arc<Resources>> = OnceLock::new();
    RES.get_or_init(common::fixture_resources)
}

fn sentences() -> Vec<String> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures/sentences.txt");
    std::fs::read_to_string(path).unwrap().lines().take(40).map(String::from).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ndcg_is_a_fraction(grades in prop::collection::vec(0u32..=3, 1..12), perm_seed in any::<u64>(), k in 1usize..12) {
        let gold: HashMap<String, u32> = grades.iter().enumerate().map(|(i, &g)| (format!("c{i}"), g)).collect();
        let mut list: Vec<String> = gold.keys().cloned().collect();
        list.sort();
        let n = list.len();
        list.rotate_left((perm_seed % n as u64) as usize);
        let r: Ndcg<f64> = ndcg_at_k(&list, &gold, k);
        prop_assert!((0.0..=1.0).contains(&r.value));
        prop_assert_eq!(r.all_zero_gold, grades.iter().all(|&g| g == 0));
    }

    #[test]
    fn positive_scaling_keeps_the_ranking(
        weights in prop::collection::vec(-2.0f64..2.0, RANK_DIM),
        exp in -6i32..7,
        pick in 0usize..40,
    ) {
        let res = fixture();
        let all = sentences();
        let text = res.segmenter.segment(&all[pick % all.len()], "d").unwrap();
        // powers of two scale every product exactly
        let scale = 2f64.powi(exp);
        let base = RankingModel::new(weights.clone(), vec![]);
        let scaled = RankingModel::new(weights.iter().map(|w| w * scale).collect(), vec![]);
        for span in candidate_spans(&text, res) {
            let target = target_for_span(&text, span, Provenance::User).unwrap();
            let cands = res.candidates(&target.lemma, target.pos);
            let a: Vec<String> = rank(&target, &cands, &base, &text, res).into_iter().map(|c| c.text).collect();
            let b: Vec<String> = rank(&target, &cands, &scaled, &text, res).into_iter().map(|c| c.text).collect();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn predicted_targets_never_overlap(
        stumps in prop::collection::vec((0usize..7, -1.0f64..10.0, prop::bool::ANY, 0.01f64..2.0), 1..6),
        threshold in -1.0f64..1.0,
        pick in 0usize..40,
    ) {
        let res = fixture();
        let all = sentences();
        let text = res.segmenter.segment(&all[pick % all.len()], "d").unwrap();
        let model = StumpEnsemble {
            feature_version: FEATURE_VERSION.into(),
            dim: 7,
            stumps: stumps
                .into_iter()
                .map(|(feature, threshold, pos, alpha)| Stump { feature, threshold, polarity: if pos { 1 } else { -1 }, alpha })
                .collect(),
        };
        let targets = predict_targets(&text, &model, res, threshold);
        for w in targets.windows(2) {
            prop_assert!(w[0].span.end <= w[1].span.start);
        }
        for t in &targets {
            prop_assert_eq!(text.slice(t.span), t.surface.as_str());
        }
    }

    /// Training error is bounded by the product of the per-round normalizers `2√(ε(1−ε))`.
    #[test]
    fn adaboost_error_within_exponential_bound(
        rows in prop::collection::vec((prop::collection::vec(0u8..6, 3), prop::bool::ANY), 4..30),
    ) {
        let xs: Vec<Vec<f64>> = rows.iter().map(|(x, _)| x.iter().map(|&v| v as f64).collect()).collect();
        let ys: Vec<i8> = rows.iter().map(|(_, y)| if *y { 1 } else { -1 }).collect();
        let Ok(fit) = train_adaboost(&xs, &ys, 20, "t") else { return Ok(()) };
        let mut bound = 1.0;
        for (t, round) in fit.trace.iter().enumerate() {
            bound *= 2.0 * (round.epsilon * (1.0 - round.epsilon)).sqrt();
            prop_assert!(round.training_error <= bound + 1e-9, "round {}: {} > {}", t + 1, round.training_error, bound);
            prop_assert!(round.epsilon < 0.5);
        }
        let errors = xs.iter().zip(&ys).filter(|(x, &y)| fit.ensemble.classify(x) != y).count();
        prop_assert!((errors as f64 / xs.len() as f64 - fit.trace.last().unwrap().training_error).abs() < 1e-12);
    }
}
