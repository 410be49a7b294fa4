//! Regression models behind one predictor contract.
//!
//! Three families are implemented: ordinary least squares (`linear`), linear
//! epsilon-insensitive SVR trained in the primal (`svr`), and a CART-based
//! random forest (`forest`). All training is deterministic given the dataset,
//! hyperparameters, and seed, regardless of worker-thread count.

pub(crate) mod forest;
pub(crate) mod linear;
pub(crate) mod svr;

pub use forest::{audit_forest, fit_forest, ForestParams, ForestPayload, Tree, TreeNode};
pub use linear::{fit_linear, raw_coefficients, LinearPayload};
pub use svr::{fit_svr, fit_svr_traced, SvrParams, SvrPayload};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Scaler};
use crate::dataset::scale::ScalerDoc;
use crate::docio;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MODEL_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Linear,
    Svr,
    Forest,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Svr => "svr",
            ModelKind::Forest => "forest",
        }
    }

    pub fn parse(text: &str) -> Result<ModelKind> {
        match text {
            "linear" => Ok(ModelKind::Linear),
            "svr" => Ok(ModelKind::Svr),
            "forest" => Ok(ModelKind::Forest),
            other => Err(Error::data(format!("unknown model kind '{other}'"))),
        }
    }
}

/// Provenance recorded at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub seed: u64,
    pub hyperparameters: serde_json::Value,
    pub dataset_fingerprint: String,
    /// Normalization regime of the training data; predictions check it.
    pub normalized: bool,
    /// True when OLS hit rank deficiency and refit with the ridge penalty.
    pub ridge_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload<F> {
    Linear(LinearPayload<F>),
    Svr(SvrPayload<F>),
    Forest(ForestPayload<F>),
}

impl<F> Payload<F> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Payload::Linear(_) => ModelKind::Linear,
            Payload::Svr(_) => ModelKind::Svr,
            Payload::Forest(_) => ModelKind::Forest,
        }
    }
}

/// A trained model: payload plus the preprocessing and provenance needed to
/// reproduce its predictions exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorModel<F> {
    pub feature_names: Vec<String>,
    /// Present for linear and SVR (they consume standardized features);
    /// forests consume raw features and carry no scaler.
    pub scaler: Option<Scaler<F>>,
    pub payload: Payload<F>,
    pub train_meta: TrainMeta,
}

impl<F: Real> PredictorModel<F> {
    pub fn new(
        feature_names: Vec<String>,
        scaler: Option<Scaler<F>>,
        payload: Payload<F>,
        train_meta: TrainMeta,
    ) -> Result<Self> {
        let width = feature_names.len();
        let payload_width = match &payload {
            Payload::Linear(p) => p.coefficients.len(),
            Payload::Svr(p) => p.weights.len(),
            Payload::Forest(p) => p.width().unwrap_or(width),
        };
        if payload_width != width {
            return Err(Error::WidthMismatch { expected: width, got: payload_width });
        }
        if let Some(s) = &scaler {
            if s.width() != width {
                return Err(Error::WidthMismatch { expected: width, got: s.width() });
            }
        }
        Ok(PredictorModel { feature_names, scaler, payload, train_meta })
    }

    pub fn kind(&self) -> ModelKind {
        self.payload.kind()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    /// Predict one feature row (raw, un-standardized values).
    pub fn predict_row(&self, row: &[F]) -> Result<F> {
        if row.len() != self.width() {
            return Err(Error::WidthMismatch { expected: self.width(), got: row.len() });
        }
        match &self.payload {
            Payload::Linear(p) => {
                let z = self.scaler.as_ref().expect("linear model has scaler").transform_row(row)?;
                Ok(p.intercept
                    + p.coefficients.iter().zip(&z).fold(F::zero(), |acc, (&c, &x)| acc + c * x))
            }
            Payload::Svr(p) => {
                let z = self.scaler.as_ref().expect("svr model has scaler").transform_row(row)?;
                Ok(p.bias + p.weights.iter().zip(&z).fold(F::zero(), |acc, (&w, &x)| acc + w * x))
            }
            Payload::Forest(p) => Ok(p.predict_row(row)),
        }
    }

    pub fn predict_matrix(&self, rows: &[Vec<F>]) -> Result<Vec<F>> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    /// Predict a dataset, checking the normalization regime first.
    pub fn predict_dataset(&self, dataset: &Dataset<F>) -> Result<Vec<F>> {
        if dataset.normalized() != self.train_meta.normalized {
            return Err(Error::RegimeMismatch {
                model_normalized: self.train_meta.normalized,
                data_normalized: dataset.normalized(),
            });
        }
        dataset.feature_matrix().iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_doc_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<PredictorModel<F>> {
        let doc: ModelDoc = docio::read_doc(path, MODEL_SCHEMA_VERSION)?;
        Self::from_doc(doc).map_err(|e| match e {
            Error::Doc { path: None, msg } => Error::Doc { path: Some(path.into()), msg },
            other => other,
        })
    }

    pub fn to_doc_bytes(&self) -> Result<Vec<u8>> {
        docio::to_doc_bytes(&self.to_doc())
    }

    /// SHA-256 of the serialized model document.
    pub fn fingerprint(&self) -> Result<String> {
        Ok(docio::fingerprint(&self.to_doc_bytes()?))
    }

    fn to_doc(&self) -> ModelDoc {
        ModelDoc {
            schema_version: MODEL_SCHEMA_VERSION,
            kind: self.kind().as_str().to_string(),
            feature_names: self.feature_names.clone(),
            scaler: self.scaler.as_ref().map(|s| s.to_doc()),
            train_meta: self.train_meta.clone(),
            payload: match &self.payload {
                Payload::Linear(p) => PayloadDoc::Linear {
                    intercept: p.intercept.as_f64(),
                    coefficients: p.coefficients.iter().map(|c| c.as_f64()).collect(),
                },
                Payload::Svr(p) => PayloadDoc::Svr {
                    weights: p.weights.iter().map(|w| w.as_f64()).collect(),
                    bias: p.bias.as_f64(),
                    epsilon: p.epsilon.as_f64(),
                    lambda: p.lambda.as_f64(),
                },
                Payload::Forest(p) => PayloadDoc::Forest { forest: p.to_doc() },
            },
        }
    }

    fn from_doc(doc: ModelDoc) -> Result<PredictorModel<F>> {
        let payload = match doc.payload {
            PayloadDoc::Linear { intercept, coefficients } => Payload::Linear(LinearPayload {
                intercept: F::from_f64(intercept),
                coefficients: coefficients.into_iter().map(F::from_f64).collect(),
            }),
            PayloadDoc::Svr { weights, bias, epsilon, lambda } => {
                if !(lambda > 0.0) || !(epsilon >= 0.0) {
                    return Err(Error::Doc {
                        path: None,
                        msg: "svr payload requires epsilon >= 0 and lambda > 0".into(),
                    });
                }
                Payload::Svr(SvrPayload {
                    weights: weights.into_iter().map(F::from_f64).collect(),
                    bias: F::from_f64(bias),
                    epsilon: F::from_f64(epsilon),
                    lambda: F::from_f64(lambda),
                })
            }
            PayloadDoc::Forest { forest } => Payload::Forest(ForestPayload::from_doc(forest)?),
        };
        if payload.kind().as_str() != doc.kind {
            return Err(Error::Doc {
                path: None,
                msg: format!(
                    "kind '{}' does not match payload type '{}'",
                    doc.kind,
                    payload.kind().as_str()
                ),
            });
        }
        let scaler = doc.scaler.as_ref().map(Scaler::from_doc).transpose()?;
        PredictorModel::new(doc.feature_names, scaler, payload, doc.train_meta)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    schema_version: u64,
    kind: String,
    feature_names: Vec<String>,
    scaler: Option<ScalerDoc>,
    train_meta: TrainMeta,
    payload: PayloadDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum PayloadDoc {
    Linear {
        intercept: f64,
        coefficients: Vec<f64>,
    },
    Svr {
        weights: Vec<f64>,
        bias: f64,
        epsilon: f64,
        lambda: f64,
    },
    Forest {
        forest: forest::ForestDoc,
    },
}
