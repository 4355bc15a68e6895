#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use adapara_core::engine::{ResourcePaths, Resources};
use adapara_core::store::{EventKind, ModelVersionPair, NewEvent};
use adapara_core::text::Span;

pub const PPDB: &str = "\
[JJ] ||| big ||| large ||| PPDB2.0Score=1.0
[JJ] ||| big ||| huge ||| PPDB2.0Score=3.0
[RB] ||| extraordinarily ||| very ||| PPDB2.0Score=2.0
[VB] ||| sat ||| rested ||| PPDB2.0Score=2.0
";
pub const SYNLEX: &str = "big\tADJ\tlarge,great\ncat\tNOUN\tfeline\n";
pub const FREQ: &str = "the\t10000\nbig\t1000\nlarge\t100\nhuge\t10\ngreat\t1000\ncat\t100\nextraordinarily\t1000\nvery\t10000\nin_order_to\t100\n";
pub const MWE: &str = "in_order_to\n";
pub const SEED: &str = "big\nextraordinarily\n";
pub const LM: &str = "the big cat sat .\nthe large cat sat .\na large dog ran .\nthe great dog sat .\n";
pub const POS: &str = "big\tADJ\nlarge\tADJ\ncat\tNOUN\nsat\tVERB\nextraordinarily\tADV\nhot\tADJ\n";
pub const LEMMAS: &str = "sat\tVERB\tsit\n";

/// Writes the toy resources into `dir` and loads them.
pub fn toy_resources(dir: &Path) -> Arc<Resources> {
    let files = [
        ("ppdb.txt", PPDB),
        ("synlex.tsv", SYNLEX),
        ("freq.tsv", FREQ),
        ("mwe.txt", MWE),
        ("seed.txt", SEED),
        ("lm.txt", LM),
        ("pos.tsv", POS),
        ("lemmas.tsv", LEMMAS),
    ];
    for (name, body) in files {
        std::fs::write(dir.join(name), body).unwrap();
    }
    let paths = ResourcePaths {
        ppdb: Some(dir.join("ppdb.txt")),
        synlex: Some(dir.join("synlex.tsv")),
        dt: None,
        embeddings: None,
        freq: dir.join("freq.tsv"),
        mwe_lexicon: dir.join("mwe.txt"),
        seed_targets: dir.join("seed.txt"),
        lm_corpus: dir.join("lm.txt"),
        lemma_lexicon: Some(dir.join("lemmas.tsv")),
        pos_lexicon: Some(dir.join("pos.tsv")),
    };
    Arc::new(Resources::load(&paths).unwrap())
}

pub fn fixture_resources() -> Arc<Resources> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures");
    Arc::new(Resources::load(&ResourcePaths::fixture_dir(dir)).unwrap())
}

pub fn baseline_versions() -> ModelVersionPair {
    ModelVersionPair { target: "seed-lexicon".into(), ranker: "baseline-lm".into() }
}

pub fn event(doc: &str, kind: EventKind, span: (usize, usize), surface: &str) -> NewEvent {
    NewEvent {
        timestamp_ms: 0,
        session_id: "s1".into(),
        doc_id: doc.into(),
        kind,
        span: Span::new(span.0, span.1),
        target_surface: surface.into(),
        displayed_candidates: vec![],
        selected_candidate: None,
        undo_of: None,
        request_id: None,
        model_versions: baseline_versions(),
    }
}

pub fn replace(doc: &str, span: (usize, usize), surface: &str, displayed: &[&str], selected: &str) -> NewEvent {
    NewEvent {
        displayed_candidates: displayed.iter().map(|s| s.to_string()).collect(),
        selected_candidate: Some(selected.into()),
        ..event(doc, EventKind::Replace, span, surface)
    }
}

pub fn undo(doc: &str, of: u64, span: (usize, usize), surface: &str) -> NewEvent {
    NewEvent { undo_of: Some(of), ..event(doc, EventKind::Undo, span, surface) }
}
