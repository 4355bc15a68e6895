use std::collections::HashMap;
use std::path::PathBuf;

use adapara_core::engine::{ResourcePaths, Resources};
use adapara_core::ranker::baseline_rank;
use adapara_core::target_id::{target_for_span, Provenance};
use adapara_core::text::Span;
use adapara_sim::replay::replay_check;
use adapara_sim::{simulate, SimConfig};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

fn small(iterations: u32) -> SimConfig {
    SimConfig { iterations, sentences: 12, resources_dir: fixtures(), ..SimConfig::default() }
}

fn dcg(grades: &[u32], k: usize) -> f64 {
    grades.iter().take(k).enumerate().map(|(i, &g)| ((1u32 << g) - 1) as f64 / ((i + 2) as f64).log2()).sum()
}

#[test]
fn single_iteration_scores_the_baseline_ranking() {
    let config = small(1);
    let run = simulate(&config, None).unwrap();
    assert_eq!(run.curve.len(), 1);
    assert_eq!(run.manifest.iterations[0].model_versions.1, "baseline-lm");

    let res = Resources::load(&ResourcePaths::fixture_dir(fixtures())).unwrap();
    let mut scores = Vec::new();
    for (key, served) in &run.dumps[0].entries {
        let text = res.segmenter.segment(&key.sentence, "check").unwrap();
        let target = target_for_span(&text, Span::new(key.start, key.end), Provenance::Model).unwrap();
        let expected: Vec<String> =
            baseline_rank(&target, &res.candidates(&target.lemma, target.pos), &text, &res).into_iter().map(|c| c.text).collect();
        assert_eq!(served, &expected, "{key:?}");

        let gold: &HashMap<String, u32> = &run.gold.entries[key].iter().map(|(c, g)| (c.clone(), *g)).collect();
        let got: Vec<u32> = served.iter().map(|c| gold.get(c).copied().unwrap_or(0)).collect();
        let mut ideal: Vec<u32> = gold.values().copied().collect();
        ideal.sort_unstable_by(|a, b| b.cmp(a));
        scores.push(dcg(&got, config.k) / dcg(&ideal, config.k));
    }
    assert!(!scores.is_empty());
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    assert!((run.curve[0].1 - mean).abs() < 1e-9, "{} vs {mean}", run.curve[0].1);
}

#[test]
fn identical_configs_give_identical_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = small(3);
    let ra = simulate(&config, Some(a.path())).unwrap();
    let rb = simulate(&config, Some(b.path())).unwrap();
    assert_eq!(ra.curve_csv(), rb.curve_csv());
    assert_eq!(ra.manifest, rb.manifest);
    for name in ["curve.csv", "gold.tsv", "manifest.json", "events.ndjson", "rankings-it3.tsv"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let other = simulate(&SimConfig { seed: 8, ..config }, None).unwrap();
    assert_ne!(other.manifest.curve_sha256, ra.manifest.curve_sha256);
}

#[test]
fn replay_reproduces_size_triggered_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let config = SimConfig { batch_size: 97, ..small(2) };
    let run = simulate(&config, Some(dir.path())).unwrap();
    assert!(run.manifest.checks.passed());
    assert!(run.manifest.table.iterations.len() > 3);

    let report = replay_check(dir.path(), None).unwrap();
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.iterations, run.manifest.table.iterations.len());

    let models = dir.path().join("models");
    let artifact = walk(&models).into_iter().next().expect("a trained model was saved");
    std::fs::write(&artifact, "{}").unwrap();
    let report = replay_check(dir.path(), None).unwrap();
    assert!(!report.passed());
    assert_eq!(report.bad_artifacts.len(), 1);
}

fn walk(dir: &std::path::Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn bad_configs_are_rejected() {
    assert!(simulate(&SimConfig { iterations: 0, ..small(1) }, None).is_err());
    assert!(simulate(&SimConfig { resources_dir: PathBuf::from("/nonexistent"), ..small(1) }, None).is_err());
}
