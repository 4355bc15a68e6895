//! Core of an adaptive paraphrasing writing aid.
//!
//! Text is segmented into sentences and tokens ([`text`]), paraphrase
//! candidates come from pluggable resources ([`resources`]), a boosted
//! classifier picks target units ([`target_id`]), a pairwise linear model
//! orders candidates ([`ranker`]), and [`adapt`] retrains both from the usage
//! events kept in [`store`].
//!
//! The learning and evaluation kernels are generic over [`Scalar`]; the
//! aliases below fix them to `f64`, which is what the service uses.

pub mod adapt;
pub mod engine;
pub mod ranker;
pub mod resources;
pub mod scalar;
pub mod store;
pub mod target_id;
pub mod text;

pub use scalar::Scalar;

pub type StumpEnsemble = target_id::StumpEnsemble<f64>;
pub type Stump = target_id::Stump<f64>;
pub type RankingModel = ranker::RankingModel<f64>;
pub type PreferencePair = ranker::PreferencePair<f64>;
pub type EmbeddingTable = resources::EmbeddingTable<f64>;
pub type Ndcg = ranker::Ndcg<f64>;
