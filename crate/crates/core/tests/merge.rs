use std::collections::BTreeSet;
use std::path::PathBuf;

use adapara_core::resources::{candidates_for, embed_neighbors, Candidate, CandidateSet, Origin, Providers};
use adapara_core::text::Pos;

fn merge_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures/merge")
}

fn providers() -> Providers {
    let dir = merge_dir();
    Providers::default()
        .with_ppdb(dir.join("ppdb.txt"))
        .unwrap()
        .with_synlex(dir.join("synlex.tsv"))
        .unwrap()
        .with_dt(dir.join("dt.tsv"))
        .unwrap()
        .with_embeddings(dir.join("embeddings.txt"))
        .unwrap()
}

fn cand(text: &str, best_score: f64, origins: &[Origin]) -> Candidate {
    Candidate { text: text.into(), best_score, origins: origins.iter().copied().collect::<BTreeSet<_>>() }
}

#[test]
fn four_provider_fixture_merges_by_hand() {
    let got = candidates_for("big", Pos::Adj, &providers(), 3).unwrap();
    // PPDB 2,4 of 2..4 -> 0,1; DT 8,4 of 0..8 -> 1,0.5; cosines .8,.6,-.8 -> 0.9,0.8,0.1
    let expected = CandidateSet {
        target_lemma: "big".into(),
        candidates: vec![
            cand("great", 1.0, &[Origin::Synlex]),
            cand("huge", 1.0, &[Origin::Ppdb, Origin::Embed]),
            cand("large", 1.0, &[Origin::Ppdb, Origin::Synlex, Origin::Dt]),
            cand("enormous", 0.8, &[Origin::Embed]),
            cand("vast", 0.5, &[Origin::Dt]),
            cand("tiny", 0.1, &[Origin::Embed]),
        ],
    };
    assert_eq!(got.candidates.len(), expected.candidates.len());
    for (g, e) in got.candidates.iter().zip(&expected.candidates) {
        assert_eq!(g.text, e.text);
        assert_eq!(g.origins, e.origins);
        assert!((g.best_score - e.best_score).abs() < 1e-12, "{}: {}", g.text, g.best_score);
    }
}

#[test]
fn noun_reading_uses_the_noun_synonyms() {
    let got = candidates_for("big", Pos::Noun, &providers(), 3).unwrap();
    assert!(got.get("bigwig").is_some());
    assert!(got.get("great").is_none());
}

#[test]
fn neighbours_match_exhaustive_search() {
    let p = providers();
    let table = p.embeddings.as_ref().unwrap();
    let q = table.get("big").unwrap().to_vec();
    let cos = |v: &[f64]| {
        let dot: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
        let n = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
        dot / (n(&q) * n(v))
    };
    let mut all: Vec<(String, f64)> =
        table.keys().filter(|k| *k != "big").map(|k| (k.to_string(), cos(table.get(k).unwrap()))).collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    for k in 0..=5 {
        let got = embed_neighbors(table, "big", k);
        assert_eq!(got.len(), k.min(4));
        for ((gk, gv), (ek, ev)) in got.iter().zip(&all) {
            assert_eq!(gk, ek);
            assert!((gv - ev).abs() < 1e-12);
        }
    }
}
