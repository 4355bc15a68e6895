//! Simulated-user harness: oracle users, gold files, the learning-curve run and replay checks.

pub mod gold;
pub mod oracle;
pub mod replay;
pub mod simulate;

pub use gold::{eval_ndcg_file, EvalError, GoldFile, NdcgReport, RankingDump, TargetKey};
pub use oracle::OracleUser;
pub use simulate::{simulate, Manifest, SimConfig, SimError, SimRun};
