use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IterationStatus {
    Open,
    Closed,
    Trained,
}

/// What retraining produced after an iteration closed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrainingOutcome {
    pub target_version: Option<String>,
    pub target_error: Option<String>,
    pub target_examples: usize,
    pub ranker_version: Option<String>,
    pub ranker_error: Option<String>,
    pub ranker_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    pub index: u32,
    pub status: IterationStatus,
    pub first_seq: Option<u64>,
    pub last_seq: Option<u64>,
    pub events: u64,
    pub forced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingOutcome>,
    /// Log length right after this iteration's close record.
    #[serde(skip)]
    pub(crate) log_end: Option<usize>,
}

impl Iteration {
    fn open(index: u32) -> Self {
        Iteration {
            index,
            status: IterationStatus::Open,
            first_seq: None,
            last_seq: None,
            events: 0,
            forced: false,
            training: None,
            log_end: None,
        }
    }
}

/// Assignment of events to fixed-size batches. The last entry is always OPEN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationTable {
    pub batch_size: u64,
    pub iterations: Vec<Iteration>,
}

impl IterationTable {
    pub fn new(batch_size: u64) -> Self {
        assert!(batch_size >= 1);
        IterationTable { batch_size, iterations: vec![Iteration::open(1)] }
    }

    pub fn open(&self) -> &Iteration {
        self.iterations.last().expect("table is never empty")
    }

    pub fn get(&self, index: u32) -> Option<&Iteration> {
        self.iterations.get(index.checked_sub(1)? as usize)
    }

    pub(crate) fn get_mut(&mut self, index: u32) -> Option<&mut Iteration> {
        self.iterations.get_mut(index.checked_sub(1)? as usize)
    }

    /// Adds `seq` to the OPEN iteration and returns its index.
    pub fn push_event(&mut self, seq: u64) -> u32 {
        let it = self.iterations.last_mut().expect("table is never empty");
        it.first_seq.get_or_insert(seq);
        it.last_seq = Some(seq);
        it.events += 1;
        it.index
    }

    pub fn is_full(&self) -> bool {
        self.open().events >= self.batch_size
    }

    /// Closes the OPEN iteration and opens the next one. Returns the closed index.
    pub fn close(&mut self, forced: bool, log_end: usize) -> u32 {
        let it = self.iterations.last_mut().expect("table is never empty");
        it.status = IterationStatus::Closed;
        it.forced = forced;
        it.log_end = Some(log_end);
        let index = it.index;
        self.iterations.push(Iteration::open(index + 1));
        index
    }

    /// Iteration holding event `seq`.
    pub fn iteration_of(&self, seq: u64) -> Option<u32> {
        self.iterations
            .iter()
            .find(|it| matches!((it.first_seq, it.last_seq), (Some(a), Some(b)) if a <= seq && seq <= b))
            .map(|it| it.index)
    }

    /// First iteration that is CLOSED but not yet TRAINED.
    pub fn next_untrained(&self) -> Option<&Iteration> {
        self.iterations.iter().find(|it| it.status == IterationStatus::Closed)
    }
}
