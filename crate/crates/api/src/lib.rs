//! HTTP layer of the paraphrasing service.
//!
//! Routes: `POST /paraphrase`, `POST /feedback`, `GET /model/status` and
//! `POST /admin/retrain`. All bodies are JSON with a schema version `v: 1`;
//! errors are `{code, message, detail}`.

pub mod config;
pub mod error;
pub mod routes;
pub mod service;

pub use config::{Config, ConfigError};
pub use error::ApiError;
pub use routes::{router, ADMIN_TOKEN_HEADER};
pub use service::Service;
