//! Drives the service with oracle users for a number of iterations and records the NDCG curve.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use adapara_api::service::{FeedbackRequest, Mode, ParaphraseRequest, ParaphraseResponse};
use adapara_api::{ApiError, Service};
use adapara_core::adapt::{AdaptConfig, AdaptLoop, HygieneViolation, IterationTable, ModelVersion, BASELINE_RANKER_ID};
use adapara_core::engine::{ResourcePaths, Resources};
use adapara_core::ranker::RANK_DIM;
use adapara_core::store::{EventKind, ModelDir};
use adapara_core::target_id::{candidate_spans, target_for_span, Provenance, TargetUnit};
use adapara_core::text::{AnnotatedText, Span};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gold::{evaluate, GoldFile, RankingDump, TargetKey};
use crate::oracle::{grade_for_rank, OracleUser, DEFAULT_TRUE_WEIGHTS};

pub const ADMIN_TOKEN: &str = "simulation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub iterations: u32,
    pub sentences: usize,
    pub oracles: usize,
    pub seed: u64,
    pub noise_temp: f64,
    /// Events per batch; the default is large enough that only the per-iteration forced close applies.
    pub batch_size: u64,
    /// Expected share of complex lemmas in each oracle's highlight policy.
    pub policy_fraction: f64,
    pub k: usize,
    pub true_weights: [f64; RANK_DIM],
    pub resources_dir: PathBuf,
    /// Defaults to `sentences.txt` in `resources_dir`.
    pub sentences_path: Option<PathBuf>,
    pub adapt: AdaptConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            iterations: 9,
            sentences: 50,
            oracles: 3,
            seed: 7,
            noise_temp: 0.0,
            batch_size: 1_000_000,
            policy_fraction: 0.7,
            k: 10,
            true_weights: DEFAULT_TRUE_WEIGHTS,
            resources_dir: PathBuf::from("data/fixtures"),
            sentences_path: None,
            adapt: AdaptConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Load(#[from] adapara_core::engine::LoadError),
    #[error(transparent)]
    Adapt(#[from] adapara_core::adapt::AdaptError),
    #[error("service rejected a simulated request: {0:?}")]
    Service(ApiError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid simulation config: {0}")]
    Config(String),
}

impl From<ApiError> for SimError {
    fn from(e: ApiError) -> Self {
        SimError::Service(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iteration: u32,
    pub ndcg: f64,
    pub targets_scored: usize,
    /// Served targets with no gold entry (GoldMissingTarget), excluded from the mean.
    pub gold_missing: Vec<TargetKey>,
    pub model_versions: (String, String),
    pub replacements: usize,
    pub rejections: usize,
    pub manual_highlights: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub hygiene_violations: Vec<HygieneViolation>,
    /// Events of iteration 1 that were served by a trained ranker.
    pub iteration_one_trained_ranker: Vec<u64>,
}

impl Checks {
    pub fn passed(&self) -> bool {
        self.hygiene_violations.is_empty() && self.iteration_one_trained_ranker.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SimConfig,
    pub oracles: Vec<OracleUser>,
    pub sentence_ids: Vec<String>,
    pub iterations: Vec<IterationReport>,
    pub table: IterationTable,
    pub versions: Vec<ModelVersion>,
    pub gold_sha256: String,
    pub curve_sha256: String,
    pub checks: Checks,
}

#[derive(Clone)]
pub struct SimRun {
    pub curve: Vec<(u32, f64)>,
    pub manifest: Manifest,
    pub gold: GoldFile,
    pub dumps: Vec<RankingDump>,
    pub adapt: Arc<AdaptLoop>,
}

impl SimRun {
    pub fn curve_csv(&self) -> String {
        curve_csv(&self.curve)
    }
}

pub fn curve_csv(curve: &[(u32, f64)]) -> String {
    let mut out = String::from("iteration,ndcg\n");
    for (i, v) in curve {
        out.push_str(&format!("{i},{v:.6}\n"));
    }
    out
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

struct Sentence {
    id: String,
    text: AnnotatedText,
    /// Candidate spans that have at least one paraphrase candidate.
    targets: Vec<TargetUnit>,
}

fn key(s: &Sentence, span: Span) -> TargetKey {
    TargetKey { sentence: s.text.text.clone(), start: span.start, end: span.end }
}

/// Picks the sentence set: the first `n` of a seeded shuffle of the pool.
fn pick_sentences(pool: &str, n: usize, seed: u64) -> Vec<String> {
    let mut lines: Vec<String> = pool.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect();
    lines.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    lines.truncate(n);
    lines
}

/// Gold grades for every target of every sentence, from the shared oracle utility.
fn build_gold(sentences: &[Sentence], oracle: &OracleUser, res: &Resources) -> GoldFile {
    let mut gold = GoldFile::default();
    for s in sentences {
        for t in &s.targets {
            let cands = res.candidates(&t.lemma, t.pos);
            let mut scored: Vec<(f64, &str)> = cands
                .texts()
                .map(|c| (oracle.utility(t, c, &s.text, res).expect("candidate from the set"), c))
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            let grades = scored.iter().enumerate().map(|(r, (_, c))| (c.to_string(), grade_for_rank(r))).collect();
            gold.entries.insert(key(s, t.span), grades);
        }
    }
    gold
}

/// Highlight policies: every complex lemma goes to one random oracle, then to each other with a fixed probability.
fn build_oracles(config: &SimConfig, lemmas: &BTreeSet<String>) -> Vec<OracleUser> {
    let n = config.oracles;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6f72_6163);
    let extra = if n > 1 { ((config.policy_fraction - 1.0 / n as f64) / (1.0 - 1.0 / n as f64)).clamp(0.0, 1.0) } else { 1.0 };
    let mut policies = vec![BTreeSet::new(); n];
    for lemma in lemmas {
        let owner = rng.gen_range(0..n);
        for (o, policy) in policies.iter_mut().enumerate() {
            if o == owner || rng.gen::<f64>() < extra {
                policy.insert(lemma.clone());
            }
        }
    }
    policies
        .into_iter()
        .enumerate()
        .map(|(o, highlight_policy)| OracleUser {
            name: format!("oracle-{o}"),
            true_weights: config.true_weights,
            noise_temp: config.noise_temp,
            highlight_policy,
            seed: config.seed.wrapping_add(o as u64 + 1),
        })
        .collect()
}

fn call_paraphrase(svc: &Service, req: &ParaphraseRequest) -> Result<ParaphraseResponse, SimError> {
    Ok(svc.paraphrase(&serde_json::to_vec(req).expect("requests serialize"))?)
}

fn call_feedback(svc: &Service, req: &FeedbackRequest) -> Result<(), SimError> {
    svc.feedback(&serde_json::to_vec(req).expect("requests serialize"))?;
    Ok(())
}

/// Runs the simulation. With `out_dir`, the event log, models, curve, gold, dumps and manifest are written there.
pub fn simulate(config: &SimConfig, out_dir: Option<&Path>) -> Result<SimRun, SimError> {
    if config.iterations == 0 || config.sentences == 0 || config.oracles == 0 {
        return Err(SimError::Config("iterations, sentences and oracles must be positive".into()));
    }
    let res = Arc::new(Resources::load(&ResourcePaths::fixture_dir(&config.resources_dir))?);
    let pool_path = config.sentences_path.clone().unwrap_or_else(|| config.resources_dir.join("sentences.txt"));
    let pool = std::fs::read_to_string(&pool_path).map_err(|source| SimError::Io { path: pool_path.clone(), source })?;

    let sentences: Vec<Sentence> = pick_sentences(&pool, config.sentences, config.seed)
        .into_iter()
        .enumerate()
        .map(|(i, line)| {
            let id = format!("sent-{i:03}");
            let text = res.segmenter.segment(&line, &id).map_err(|e| SimError::Config(format!("sentence {i}: {e}")))?;
            let targets = candidate_spans(&text, &res)
                .into_iter()
                .map(|span| target_for_span(&text, span, Provenance::User).expect("candidate spans are aligned"))
                .filter(|t| !res.candidates(&t.lemma, t.pos).is_empty())
                .collect();
            Ok(Sentence { id, text, targets })
        })
        .collect::<Result<_, SimError>>()?;
    let lemmas: BTreeSet<String> = sentences.iter().flat_map(|s| s.targets.iter().map(|t| t.lemma.clone())).collect();
    let oracles = build_oracles(config, &lemmas);
    let gold = build_gold(&sentences, &oracles[0], &res);

    let mut adapt_config = config.adapt.clone();
    adapt_config.batch_size = config.batch_size;
    let adapt = match out_dir {
        Some(dir) => {
            let io = |source| SimError::Io { path: dir.to_owned(), source };
            std::fs::create_dir_all(dir).map_err(io)?;
            for stale in ["events.ndjson", "models"] {
                let p = dir.join(stale);
                if p.is_dir() {
                    std::fs::remove_dir_all(&p).map_err(io)?;
                } else if p.exists() {
                    std::fs::remove_file(&p).map_err(io)?;
                }
            }
            AdaptLoop::open(res.clone(), adapt_config, dir.join("events.ndjson"), Some(ModelDir::new(dir.join("models"))))?
        }
        None => AdaptLoop::in_memory(res.clone(), adapt_config),
    };
    let adapt = Arc::new(adapt);
    let svc = Service::new(adapt.clone(), true, ADMIN_TOKEN);
    let mut rngs: Vec<ChaCha8Rng> = oracles.iter().map(|o| ChaCha8Rng::seed_from_u64(o.seed)).collect();

    let mut reports = Vec::new();
    let mut dumps = Vec::new();
    for iteration in 1..=config.iterations {
        let active = adapt.active_models().versions();
        let mut served: BTreeMap<TargetKey, Vec<String>> = BTreeMap::new();
        let (mut replacements, mut rejections, mut manual) = (0, 0, 0);
        for s in &sentences {
            for (oracle, rng) in oracles.iter().zip(rngs.iter_mut()) {
                let request = |mode, span| ParaphraseRequest {
                    v: 1,
                    doc_id: s.id.clone(),
                    text: s.text.text.clone(),
                    session_id: oracle.name.clone(),
                    mode,
                    span,
                };
                let feedback = |kind, span, request_id: &str, selected| FeedbackRequest {
                    v: 1,
                    session_id: oracle.name.clone(),
                    doc_id: s.id.clone(),
                    kind,
                    span: Some(span),
                    target_surface: None,
                    displayed_candidates: None,
                    selected_candidate: selected,
                    undo_of: None,
                    request_id: Some(request_id.to_owned()),
                };

                let resp = call_paraphrase(&svc, &request(Mode::AutoHighlight, None))?;
                let mut handled = BTreeSet::new();
                for t in &resp.targets {
                    handled.insert(t.span);
                    if t.candidates.is_empty() {
                        continue;
                    }
                    let displayed: Vec<String> = t.candidates.iter().map(|c| c.text.clone()).collect();
                    served.entry(key(s, t.span)).or_insert_with(|| displayed.clone());
                    let unit = target_for_span(&s.text, t.span, Provenance::Model).expect("served spans are aligned");
                    if oracle.wants(&unit) {
                        let pick = oracle.choose(&unit, &displayed, &s.text, &res, rng);
                        call_feedback(&svc, &feedback(EventKind::Replace, t.span, &resp.request_id, Some(displayed[pick].clone())))?;
                        replacements += 1;
                    } else {
                        call_feedback(&svc, &feedback(EventKind::Reject, t.span, &resp.request_id, None))?;
                        rejections += 1;
                    }
                }
                for unit in s.targets.iter().filter(|t| oracle.wants(t) && !handled.iter().any(|h| h.overlaps(&t.span))) {
                    let resp = call_paraphrase(&svc, &request(Mode::CandidatesForSpan, Some(unit.span)))?;
                    manual += 1;
                    let Some(t) = resp.targets.first().filter(|t| !t.candidates.is_empty()) else { continue };
                    let displayed: Vec<String> = t.candidates.iter().map(|c| c.text.clone()).collect();
                    served.entry(key(s, t.span)).or_insert_with(|| displayed.clone());
                    let pick = oracle.choose(unit, &displayed, &s.text, &res, rng);
                    call_feedback(&svc, &feedback(EventKind::Replace, t.span, &resp.request_id, Some(displayed[pick].clone())))?;
                    replacements += 1;
                }
            }
        }

        let dump = RankingDump { entries: served.into_iter().collect() };
        let report = evaluate(&dump, &gold, config.k).map_err(|e| SimError::Config(e.to_string()))?;
        reports.push(IterationReport {
            iteration,
            ndcg: report.mean,
            targets_scored: report.per_target.len(),
            gold_missing: report.excluded,
            model_versions: (active.target, active.ranker),
            replacements,
            rejections,
            manual_highlights: manual,
        });
        dumps.push(dump);
        svc.retrain(Some(ADMIN_TOKEN))?;
    }

    let checks = adapt.with_log(|log, table| {
        let iteration_one_trained_ranker = log
            .events()
            .filter(|e| table.iteration_of(e.seq) == Some(1) && e.model_versions.ranker != BASELINE_RANKER_ID)
            .map(|e| e.seq)
            .collect();
        (iteration_one_trained_ranker, ())
    });
    let checks = Checks { hygiene_violations: adapt.hygiene_violations(), iteration_one_trained_ranker: checks.0 };
    let status = adapt.status();
    let curve: Vec<(u32, f64)> = reports.iter().map(|r| (r.iteration, r.ndcg)).collect();
    let gold_tsv = gold.to_tsv();
    let manifest = Manifest {
        config: config.clone(),
        oracles,
        sentence_ids: sentences.iter().map(|s| s.id.clone()).collect(),
        iterations: reports,
        table: status.table,
        versions: status.versions,
        gold_sha256: sha256_hex(&gold_tsv),
        curve_sha256: sha256_hex(&curve_csv(&curve)),
        checks,
    };
    let run = SimRun { curve, manifest, gold, dumps, adapt };

    if let Some(dir) = out_dir {
        let write = |name: &str, content: &str| {
            let p = dir.join(name);
            std::fs::write(&p, content).map_err(|source| SimError::Io { path: p, source })
        };
        write("curve.csv", &run.curve_csv())?;
        write("gold.tsv", &gold_tsv)?;
        for (i, d) in run.dumps.iter().enumerate() {
            write(&format!("rankings-it{}.tsv", i + 1), &d.to_tsv())?;
        }
        write("manifest.json", &serde_json::to_string_pretty(&run.manifest).expect("manifest serializes"))?;
    }
    Ok(run)
}

/// Means of every window of three consecutive values.
pub fn moving_average(values: &[f64]) -> Vec<f64> {
    values.windows(3).map(|w| w.iter().sum::<f64>() / 3.0).collect()
}
