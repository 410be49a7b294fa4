//! perfcast: predict application IPC from short-interval simulation
//! statistics.
//!
//! The pipeline: ingest gem5-style stats dumps (or generate synthetic data
//! from a closed-form oracle), assemble a nine-feature dataset, train a
//! regression model (linear, SVR, or random forest), then evaluate RMSE /
//! residuals and feature importance, and render deterministic report figures.
//!
//! The numeric core is generic over the scalar type (see [`scalar::Real`]);
//! the `*64` aliases below are the default lane used by the CLI and the
//! on-disk formats.

pub mod config;
pub mod dataset;
pub mod docio;
pub mod error;
pub mod eval;
pub mod figure;
pub mod importance;
pub mod ingest;
pub mod mapping;
pub mod models;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod textfmt;

pub use error::{Error, ErrorCategory, Result};
pub use scalar::Real;

pub type Dataset64 = dataset::Dataset<f64>;
pub type LabeledSample64 = dataset::LabeledSample<f64>;
pub type FeatureVector64 = dataset::FeatureVector<f64>;
pub type Scaler64 = dataset::Scaler<f64>;
pub type PredictorModel64 = models::PredictorModel<f64>;
pub type EvalReport64 = eval::EvalReport<f64>;
pub type ImportanceReport64 = importance::ImportanceReport<f64>;
pub type OracleParams64 = oracle::OracleParams<f64>;
pub type GeneratorConfig64 = oracle::GeneratorConfig<f64>;
