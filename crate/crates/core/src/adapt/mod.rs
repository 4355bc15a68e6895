//! The batch loop: assign events to iterations, retrain after each close, publish models.

mod hygiene;
mod iteration;
mod models;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Condvar, Mutex, RwLock};
use std::thread::JoinHandle;

use serde::{Deserialize, Serialize};

use crate::engine::Resources;
use crate::ranker::{pairs_from_events, train_pairwise, RankingModel, TrainParams};
use crate::store::{EventLog, LogRecord, ModelDir, NewEvent, StoreError, UsageEvent};
use crate::target_id::{assemble_training_set, train_adaboost, EventContext, DEFAULT_ROUNDS, FEATURE_VERSION};
use crate::text::AnnotatedText;

pub use hygiene::{check_serving_hygiene, HygieneViolation};
pub use iteration::{Iteration, IterationStatus, IterationTable, TrainingOutcome};
pub use models::{
    ActiveModels, ModelKind, ModelVersion, RankerModel, TargetModel, BASELINE_RANKER_ID, SEED_TARGET_ID,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub batch_size: u64,
    pub rounds: usize,
    pub target_threshold: f64,
    /// Seed for negative sampling.
    pub seed: u64,
    pub ranker: TrainParams,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            batch_size: 100,
            rounds: DEFAULT_ROUNDS,
            target_threshold: 0.0,
            seed: 42,
            ranker: TrainParams::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AdaptError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("the open iteration has no events")]
    NothingToTrain,
    #[error("iteration {index} cannot be trained before iteration {pending}")]
    OutOfOrderRetrain { index: u32, pending: u32 },
    #[error("iteration {0} is not closed")]
    NotClosed(u32),
    #[error("log does not match iteration state: {0}")]
    CorruptState(String),
}

/// Result of [`AdaptLoop::record`].
#[derive(Debug, Clone, PartialEq)]
pub struct Recorded {
    pub events: Vec<UsageEvent>,
    pub iteration: u32,
    /// Iterations closed by these appends.
    pub closed: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopStatus {
    pub table: IterationTable,
    pub active: (ModelVersion, ModelVersion),
    pub versions: Vec<ModelVersion>,
    pub last_seq: u64,
}

struct Sequencer {
    log: EventLog,
    table: IterationTable,
}

#[derive(Default)]
struct TrainerState {
    texts: HashMap<usize, Arc<AnnotatedText>>,
}

#[derive(Default)]
struct Wake {
    pending: bool,
    shutdown: bool,
}

pub struct AdaptLoop {
    resources: Arc<Resources>,
    config: AdaptConfig,
    sequencer: Mutex<Sequencer>,
    registry: RwLock<Arc<ActiveModels>>,
    versions: Mutex<Vec<ModelVersion>>,
    trainer: Mutex<TrainerState>,
    model_dir: Option<ModelDir>,
    wake: (Mutex<Wake>, Condvar),
}

impl AdaptLoop {
    /// A loop over an in-memory log, with no model files written.
    pub fn in_memory(resources: Arc<Resources>, config: AdaptConfig) -> Self {
        Self::from_log(resources, config, EventLog::in_memory(), None).expect("an empty log is consistent")
    }

    /// Opens (or creates) the log at `log_path`, rebuilds the iteration table and retrains every closed iteration.
    pub fn open(
        resources: Arc<Resources>,
        config: AdaptConfig,
        log_path: impl AsRef<Path>,
        model_dir: Option<ModelDir>,
    ) -> Result<Self, AdaptError> {
        let log = EventLog::open(log_path)?;
        let this = Self::from_log(resources, config, log, model_dir)?;
        this.train_pending()?;
        Ok(this)
    }

    /// Rebuilds state from an already replayed log. Models are not trained until [`Self::train_pending`].
    pub fn from_log(
        resources: Arc<Resources>,
        config: AdaptConfig,
        mut log: EventLog,
        model_dir: Option<ModelDir>,
    ) -> Result<Self, AdaptError> {
        let mut table = IterationTable::new(config.batch_size);
        for (pos, record) in log.records().iter().enumerate() {
            match record.as_ref() {
                LogRecord::Event(e) => {
                    table.push_event(e.seq);
                }
                LogRecord::Close { iteration, last_seq, forced } => {
                    let open = table.open();
                    if open.index != *iteration || open.last_seq != Some(*last_seq) {
                        return Err(AdaptError::CorruptState(format!(
                            "close of iteration {iteration} at seq {last_seq} does not match open iteration {} ending at {:?}",
                            open.index, open.last_seq
                        )));
                    }
                    table.close(*forced, pos + 1);
                }
                LogRecord::Doc { .. } => {}
            }
        }
        if table.is_full() {
            let open = table.open();
            let (index, last) = (open.index, open.last_seq.expect("full iteration has events"));
            log.append_close(index, last, false)?;
            table.close(false, log.len());
        }
        Ok(AdaptLoop {
            resources,
            config,
            sequencer: Mutex::new(Sequencer { log, table }),
            registry: RwLock::new(Arc::new(ActiveModels::default())),
            versions: Mutex::new(Vec::new()),
            trainer: Mutex::new(TrainerState::default()),
            model_dir,
            wake: (Mutex::new(Wake::default()), Condvar::new()),
        })
    }

    pub fn resources(&self) -> &Arc<Resources> {
        &self.resources
    }

    pub fn config(&self) -> &AdaptConfig {
        &self.config
    }

    pub fn active_models(&self) -> Arc<ActiveModels> {
        self.registry.read().expect("registry lock poisoned").clone()
    }

    /// Appends `events` in order, after recording `doc` = (doc_id, text) if it changed.
    ///
    /// Either every event is appended or the first invalid one is reported;
    /// earlier events of the same call stay recorded.
    pub fn record(&self, doc: Option<(&str, &str)>, events: Vec<NewEvent>) -> Result<Recorded, AdaptError> {
        let mut seq = self.sequencer.lock().expect("sequencer lock poisoned");
        let Sequencer { log, table } = &mut *seq;
        if let Some((doc_id, text)) = doc {
            log.append_doc(doc_id, text)?;
        }
        let mut out = Recorded { events: Vec::new(), iteration: table.open().index, closed: Vec::new() };
        for event in events {
            let e = log.append(event)?;
            out.iteration = table.push_event(e.seq);
            out.events.push(e);
            if table.is_full() {
                log.append_close(out.iteration, out.events.last().unwrap().seq, false)?;
                out.closed.push(table.close(false, log.len()));
            }
        }
        drop(seq);
        if !out.closed.is_empty() {
            self.notify_trainer();
        }
        Ok(out)
    }

    pub fn record_event(&self, event: NewEvent) -> Result<(UsageEvent, u32), AdaptError> {
        let mut r = self.record(None, vec![event])?;
        Ok((r.events.pop().expect("one event recorded"), r.iteration))
    }

    /// Closes the OPEN iteration regardless of its size.
    pub fn force_close(&self) -> Result<u32, AdaptError> {
        let mut seq = self.sequencer.lock().expect("sequencer lock poisoned");
        let Sequencer { log, table } = &mut *seq;
        let open = table.open();
        let Some(last) = open.last_seq else { return Err(AdaptError::NothingToTrain) };
        log.append_close(open.index, last, true)?;
        let index = table.close(true, log.len());
        drop(seq);
        self.notify_trainer();
        Ok(index)
    }

    /// Trains every closed iteration in order. Returns the iterations trained by this call.
    pub fn train_pending(&self) -> Result<Vec<(u32, TrainingOutcome)>, AdaptError> {
        let mut trainer = self.trainer.lock().expect("trainer lock poisoned");
        let mut done = Vec::new();
        loop {
            let next = {
                let seq = self.sequencer.lock().expect("sequencer lock poisoned");
                seq.table.next_untrained().map(|it| (it.index, seq.log.snapshot(it.log_end.expect("closed"))))
            };
            let Some((index, records)) = next else { break };
            let outcome = self.train_iteration(&mut trainer, index, &records)?;
            done.push((index, outcome));
        }
        Ok(done)
    }

    /// Trains iteration `index`, which must be the earliest untrained closed iteration.
    pub fn retrain(&self, index: u32) -> Result<TrainingOutcome, AdaptError> {
        let mut trainer = self.trainer.lock().expect("trainer lock poisoned");
        let records = {
            let seq = self.sequencer.lock().expect("sequencer lock poisoned");
            let it = seq.table.get(index).ok_or(AdaptError::NotClosed(index))?;
            match it.status {
                IterationStatus::Open => return Err(AdaptError::NotClosed(index)),
                IterationStatus::Trained => return Ok(it.training.clone().unwrap_or_default()),
                IterationStatus::Closed => {}
            }
            if let Some(pending) = seq.table.next_untrained().filter(|p| p.index < index) {
                return Err(AdaptError::OutOfOrderRetrain { index, pending: pending.index });
            }
            seq.log.snapshot(it.log_end.expect("closed"))
        };
        self.train_iteration(&mut trainer, index, &records)
    }

    /// Retrains on `records` (all iterations up to `index`) and publishes the result.
    fn train_iteration(
        &self,
        trainer: &mut TrainerState,
        index: u32,
        records: &[Arc<LogRecord>],
    ) -> Result<TrainingOutcome, AdaptError> {
        let res = &*self.resources;
        let mut latest: HashMap<&str, usize> = HashMap::new();
        let mut owned: Vec<(&UsageEvent, Option<(usize, Arc<AnnotatedText>)>)> = Vec::new();
        for (pos, record) in records.iter().enumerate() {
            match record.as_ref() {
                LogRecord::Doc { doc_id, text } => {
                    latest.insert(doc_id, pos);
                    if !trainer.texts.contains_key(&pos) {
                        if let Ok(t) = res.segmenter.segment(text, doc_id) {
                            trainer.texts.insert(pos, Arc::new(t));
                        }
                    }
                }
                LogRecord::Event(e) => {
                    let text = latest
                        .get(e.doc_id.as_str())
                        .and_then(|&pos| trainer.texts.get(&pos).map(|t| (pos, t.clone())));
                    owned.push((e, text));
                }
                LogRecord::Close { .. } => {}
            }
        }
        let contexts: Vec<EventContext<'_>> = owned
            .iter()
            .map(|(event, text)| EventContext {
                event,
                text_id: text.as_ref().map_or(usize::MAX, |t| t.0),
                text: text.as_ref().map(|t| t.1.as_ref()),
            })
            .collect();

        let mut outcome = TrainingOutcome::default();
        let current = self.active_models();
        let mut next = (*current).clone();

        let examples = assemble_training_set(&contexts, res, self.config.seed);
        outcome.target_examples = examples.len();
        let xs: Vec<Vec<f64>> = examples.iter().map(|e| e.features.to_vec()).collect();
        let ys: Vec<i8> = examples.iter().map(|e| e.label).collect();
        match train_adaboost(&xs, &ys, self.config.rounds, FEATURE_VERSION) {
            Ok(fit) => {
                let json = serde_json::to_string(&fit.ensemble).expect("ensembles serialize");
                let version = ModelVersion::trained(ModelKind::Target, index, &json);
                self.save(&version, &json)?;
                outcome.target_version = Some(version.id.clone());
                next.target_version = version;
                next.target = TargetModel::Ensemble(fit.ensemble);
            }
            Err(e) => {
                tracing::warn!(iteration = index, error = %e, "target model not retrained");
                outcome.target_error = Some(e.to_string());
            }
        }

        let pairs = pairs_from_events(&contexts, res);
        outcome.ranker_pairs = pairs.len();
        match train_pairwise(&pairs, &self.config.ranker) {
            Ok(weights) => {
                let model = RankingModel::new(weights, (1..=index).collect());
                let json = model.to_json();
                let version = ModelVersion::trained(ModelKind::Ranker, index, &json);
                self.save(&version, &json)?;
                outcome.ranker_version = Some(version.id.clone());
                next.ranker_version = version;
                next.ranker = RankerModel::Linear(model);
            }
            Err(e) => {
                tracing::warn!(iteration = index, error = %e, "ranker not retrained");
                outcome.ranker_error = Some(e.to_string());
            }
        }

        {
            let mut versions = self.versions.lock().expect("versions lock poisoned");
            for v in [&next.target_version, &next.ranker_version] {
                if v.trained_after_iteration == index {
                    versions.push(v.clone());
                }
            }
        }
        *self.registry.write().expect("registry lock poisoned") = Arc::new(next);

        let mut seq = self.sequencer.lock().expect("sequencer lock poisoned");
        let it = seq.table.get_mut(index).expect("iteration exists");
        it.status = IterationStatus::Trained;
        it.training = Some(outcome.clone());
        tracing::info!(iteration = index, ?outcome, "published models");
        Ok(outcome)
    }

    fn save(&self, version: &ModelVersion, json: &str) -> Result<(), AdaptError> {
        if let Some(dir) = &self.model_dir {
            dir.write(version.kind.dir_name(), &version.id, json)?;
        }
        Ok(())
    }

    pub fn status(&self) -> LoopStatus {
        let (table, last_seq) = {
            let seq = self.sequencer.lock().expect("sequencer lock poisoned");
            (seq.table.clone(), seq.log.last_seq())
        };
        let active = self.active_models();
        LoopStatus {
            table,
            active: (active.target_version.clone(), active.ranker_version.clone()),
            versions: self.versions.lock().expect("versions lock poisoned").clone(),
            last_seq,
        }
    }

    /// Runs `f` with the log and iteration table held.
    pub fn with_log<R>(&self, f: impl FnOnce(&EventLog, &IterationTable) -> R) -> R {
        let seq = self.sequencer.lock().expect("sequencer lock poisoned");
        f(&seq.log, &seq.table)
    }

    /// Every violation of the rule that a display may only use models trained on earlier iterations.
    pub fn hygiene_violations(&self) -> Vec<HygieneViolation> {
        let versions = self.versions.lock().expect("versions lock poisoned").clone();
        self.with_log(|log, table| check_serving_hygiene(log.events(), table, &versions))
    }

    fn notify_trainer(&self) {
        let (lock, cv) = &self.wake;
        lock.lock().expect("wake lock poisoned").pending = true;
        cv.notify_all();
    }

    /// Starts a thread that trains closed iterations as they appear.
    pub fn spawn_trainer(self: &Arc<Self>) -> TrainerHandle {
        let this = Arc::clone(self);
        let handle = std::thread::spawn(move || loop {
            {
                let (lock, cv) = &this.wake;
                let mut wake = cv
                    .wait_while(lock.lock().expect("wake lock poisoned"), |w| !w.pending && !w.shutdown)
                    .expect("wake lock poisoned");
                if wake.shutdown {
                    return;
                }
                wake.pending = false;
            }
            if let Err(e) = this.train_pending() {
                tracing::error!(error = %e, "background training failed");
            }
        });
        TrainerHandle { owner: Arc::clone(self), thread: Some(handle) }
    }
}

/// Stops the background trainer when dropped.
pub struct TrainerHandle {
    owner: Arc<AdaptLoop>,
    thread: Option<JoinHandle<()>>,
}

impl Drop for TrainerHandle {
    fn drop(&mut self) {
        let (lock, cv) = &self.owner.wake;
        lock.lock().expect("wake lock poisoned").shutdown = true;
        cv.notify_all();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
