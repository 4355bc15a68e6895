mod common;

use std::collections::HashMap;

use adapara_core::ranker::{baseline_rank, pairs_from_events, rank, RankingModel, RANK_DIM};
use adapara_core::resources::{Origin, BOS, EOS};
use adapara_core::store::{EventKind, NewEvent, UsageEvent};
use adapara_core::target_id::{
    extract_features, predict_targets, target_for_span, EventContext, Provenance, Stump, StumpEnsemble, FEATURE_VERSION,
};
use adapara_core::text::{AnnotatedText, Span};
use common::*;

/// Add-one bigram log10 probability, counted directly from the corpus lines.
fn oracle_logprob(corpus: &str, sentence: &[&str]) -> f64 {
    let mut bigrams: HashMap<(String, String), f64> = HashMap::new();
    let mut histories: HashMap<String, f64> = HashMap::new();
    let mut vocab: Vec<String> = vec![BOS.into(), EOS.into()];
    for line in corpus.lines() {
        let mut words = vec![BOS.to_string()];
        words.extend(line.split_whitespace().map(str::to_lowercase));
        words.push(EOS.to_string());
        for w in &words {
            if !vocab.contains(w) {
                vocab.push(w.clone());
            }
        }
        for pair in words.windows(2) {
            *bigrams.entry((pair[0].clone(), pair[1].clone())).or_default() += 1.0;
            *histories.entry(pair[0].clone()).or_default() += 1.0;
        }
    }
    let v = vocab.len() as f64;
    let mut prev = BOS.to_string();
    let mut total = 0.0;
    for w in sentence {
        let c = bigrams.get(&(prev.clone(), w.to_string())).copied().unwrap_or(0.0);
        let h = histories.get(&prev).copied().unwrap_or(0.0);
        total += ((c + 1.0) / (h + v)).log10();
        prev = w.to_string();
    }
    total
}

fn segment(res: &adapara_core::engine::Resources, text: &str) -> AnnotatedText {
    res.segmenter.segment(text, "d1").unwrap()
}

#[test]
fn target_features_for_a_long_adverb() {
    let dir = tempfile::tempdir().unwrap();
    let res = toy_resources(dir.path());
    let text = segment(&res, "It was extraordinarily hot.");
    let f = extract_features(&text, Span::new(7, 22), &res).unwrap();
    assert_eq!(f.length_chars, 15.0);
    // vowel groups: e, ao, i, a, i, y
    assert_eq!(f.length_syllables, 6.0);
    assert_eq!(f.corpus_log_freq, 3.0);
    assert_eq!(f.in_mwe_lexicon, 0.0);
    assert_eq!(f.pos_is_content, 1.0);
    // third of five tokens
    assert_eq!(f.sentence_position, 0.5);
    // one candidate ("very")
    assert!((f.candidate_availability - 2f64.log10()).abs() < 1e-12);
}

#[test]
fn three_stump_fixture_model() {
    let dir = tempfile::tempdir().unwrap();
    let res = toy_resources(dir.path());
    let model = StumpEnsemble {
        feature_version: FEATURE_VERSION.into(),
        dim: 7,
        stumps: vec![
            Stump { feature: 0, threshold: 5.0, polarity: 1, alpha: 0.5 },
            Stump { feature: 2, threshold: 1.5, polarity: -1, alpha: 0.3 },
            Stump { feature: 6, threshold: 0.2, polarity: 1, alpha: 0.2 },
        ],
    };
    let text = segment(&res, "It was extraordinarily hot.");
    let f = extract_features(&text, Span::new(7, 22), &res).unwrap().to_array();
    // +0.5 (15 > 5), -0.3 (3 > 1.5, negative polarity), +0.2 (0.301 > 0.2)
    assert!((model.margin(&f) - 0.4).abs() < 1e-12);
    for span in [Span::new(0, 2), Span::new(3, 6), Span::new(23, 26)] {
        let f = extract_features(&text, span, &res).unwrap().to_array();
        // short, unknown to the frequency list, no candidates: -0.5 + 0.3 - 0.2
        assert!((model.margin(&f) + 0.4).abs() < 1e-12, "{span}");
    }
    let targets = predict_targets(&text, &model, &res, 0.0);
    assert_eq!(targets.len(), 1);
    assert_eq!(targets[0].surface, "extraordinarily");
    assert_eq!(targets[0].provenance, Provenance::Model);
}

#[test]
fn merged_candidates_and_rank_features() {
    let dir = tempfile::tempdir().unwrap();
    let res = toy_resources(dir.path());
    let text = segment(&res, "The big cat sat.");
    let target = target_for_span(&text, Span::new(4, 7), Provenance::User).unwrap();
    let cands = res.candidates(&target.lemma, target.pos);
    // PPDB scores over the file are 1,3,2,2: large 0.0, huge 1.0; the synonym lexicon scores 1.0
    let got: Vec<(&str, f64, Vec<Origin>)> = cands
        .candidates
        .iter()
        .map(|c| (c.text.as_str(), c.best_score, c.origins.iter().copied().collect()))
        .collect();
    assert_eq!(
        got,
        vec![
            ("great", 1.0, vec![Origin::Synlex]),
            ("huge", 1.0, vec![Origin::Ppdb]),
            ("large", 1.0, vec![Origin::Ppdb, Origin::Synlex]),
        ]
    );

    let ranked = baseline_rank(&target, &cands, &text, &res);
    let original = oracle_logprob(LM, &["the", "big", "cat", "sat", "."]);
    let mut expected: Vec<(String, f64)> = ["great", "huge", "large"]
        .iter()
        .map(|c| (c.to_string(), oracle_logprob(LM, &["the", c, "cat", "sat", "."]) - original))
        .collect();
    expected.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    assert_eq!(ranked.len(), 3);
    for (r, (text, delta)) in ranked.iter().zip(&expected) {
        assert_eq!(&r.text, text);
        assert!((r.score - delta).abs() < 1e-12);
        assert!((r.features.in_context_lm_delta - delta).abs() < 1e-12);
    }

    let huge = ranked.iter().find(|r| r.text == "huge").unwrap();
    let f = huge.features;
    assert_eq!(f.cand_corpus_log_freq, 1.0);
    assert_eq!(f.len_ratio, 4.0 / 3.0);
    assert_eq!((f.origin_ppdb, f.origin_synlex, f.origin_dt, f.origin_embed), (1.0, 0.0, 0.0, 0.0));
    // second in the candidate set
    assert_eq!(f.prior_rank_recip, 0.5);
}

#[test]
fn linear_rank_scores_are_dot_products() {
    let dir = tempfile::tempdir().unwrap();
    let res = toy_resources(dir.path());
    let text = segment(&res, "The big cat sat.");
    let target = target_for_span(&text, Span::new(4, 7), Provenance::User).unwrap();
    let cands = res.candidates(&target.lemma, target.pos);
    let weights = vec![0.5, 1.0, -2.0, 0.25, 0.0, 1.5, 0.0, 0.0, 3.0];
    let model = RankingModel::new(weights.clone(), vec![1]);
    let ranked = rank(&target, &cands, &model, &text, &res);
    assert_eq!(ranked.len(), 3);
    for r in &ranked {
        let f = r.features.to_array();
        let expected: f64 = (0..RANK_DIM).map(|i| weights[i] * f[i]).sum();
        assert!((r.score - expected).abs() < 1e-12);
    }
    assert!(ranked.windows(2).all(|w| w[0].score >= w[1].score));
}

#[test]
fn display_cap_truncates() {
    let dir = tempfile::tempdir().unwrap();
    let mut res = (*toy_resources(dir.path())).clone();
    res.display_cap = 2;
    let text = segment(&res, "The big cat sat.");
    let target = target_for_span(&text, Span::new(4, 7), Provenance::User).unwrap();
    let cands = res.candidates(&target.lemma, target.pos);
    assert_eq!(baseline_rank(&target, &cands, &text, &res).len(), 2);
}

fn usage(seq: u64, body: NewEvent) -> UsageEvent {
    UsageEvent { seq, body }
}

#[test]
fn preference_pairs_from_replace_and_undo() {
    let dir = tempfile::tempdir().unwrap();
    let res = toy_resources(dir.path());
    let text = segment(&res, "The big cat sat.");
    let shown = ["great", "huge", "large"];
    let events = vec![
        usage(1, replace("d1", (4, 7), "big", &shown, "huge")),
        usage(2, replace("d1", (4, 7), "big", &shown, "huge")),
        usage(3, replace("d1", (4, 7), "big", &["great", "large"], "large")),
        usage(4, undo("d1", 3, (4, 7), "big")),
        usage(5, event("d1", EventKind::Highlight, (8, 11), "cat")),
    ];
    let ctx: Vec<EventContext<'_>> = events.iter().map(|e| EventContext { event: e, text_id: 0, text: Some(&text) }).collect();
    let pairs = pairs_from_events(&ctx, &res);

    let target = target_for_span(&text, Span::new(4, 7), Provenance::User).unwrap();
    let cands = res.candidates(&target.lemma, target.pos);
    let feats: HashMap<String, Vec<f64>> = rank(&target, &cands, &RankingModel::new(vec![0.0; RANK_DIM], vec![]), &text, &res)
        .into_iter()
        .map(|r| (r.text, r.features.to_array().to_vec()))
        .collect();
    // huge beats great and large, twice; the undone event contributes nothing
    assert_eq!(pairs.len(), 2);
    for p in &pairs {
        assert_eq!(p.winner, feats["huge"]);
        assert!(p.loser == feats["great"] || p.loser == feats["large"]);
        assert_eq!(p.weight, 2.0);
    }
    assert_ne!(pairs[0].loser, pairs[1].loser);

    // without the UNDO the third event adds large > great
    let pairs = pairs_from_events(&ctx[..3], &res);
    assert_eq!(pairs.len(), 3);
    assert!(pairs.iter().any(|p| p.winner == feats["large"] && p.loser == feats["great"] && p.weight == 1.0));
}
