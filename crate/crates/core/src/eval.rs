//! Evaluation metrics and the evaluation report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::docio;
use crate::error::{Error, Result};
use crate::models::PredictorModel;
use crate::scalar::Real;

pub const EVAL_SCHEMA_VERSION: u64 = 1;

fn check_lengths<F>(actual: &[F], predicted: &[F]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::data(format!(
            "length mismatch: {} actual vs {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::EmptyDataset { context: "metric over zero pairs".into() });
    }
    Ok(())
}

/// Root mean square error: sqrt((1/n) * sum (predicted - actual)^2).
pub fn rmse<F: Real>(actual: &[F], predicted: &[F]) -> Result<F> {
    check_lengths(actual, predicted)?;
    let n = F::from_usize(actual.len()).unwrap();
    let sse = actual
        .iter()
        .zip(predicted)
        .fold(F::zero(), |acc, (&a, &p)| acc + (p - a) * (p - a));
    Ok((sse / n).sqrt())
}

pub fn mae<F: Real>(actual: &[F], predicted: &[F]) -> Result<F> {
    check_lengths(actual, predicted)?;
    let n = F::from_usize(actual.len()).unwrap();
    let sum = actual
        .iter()
        .zip(predicted)
        .fold(F::zero(), |acc, (&a, &p)| acc + (p - a).abs());
    Ok(sum / n)
}

/// R² about the actual mean; `None` when the actuals are constant (SST = 0).
pub fn r_squared<F: Real>(actual: &[F], predicted: &[F]) -> Result<Option<F>> {
    check_lengths(actual, predicted)?;
    let n = F::from_usize(actual.len()).unwrap();
    let mean = actual.iter().fold(F::zero(), |a, &v| a + v) / n;
    let sst = actual.iter().fold(F::zero(), |a, &v| a + (v - mean) * (v - mean));
    if sst == F::zero() {
        return Ok(None);
    }
    let sse = actual
        .iter()
        .zip(predicted)
        .fold(F::zero(), |acc, (&a, &p)| acc + (p - a) * (p - a));
    Ok(Some(F::one() - sse / sst))
}

/// Everything the paper-style result figures need: headline metrics plus the
/// full predicted-vs-actual and residual series. Residuals follow the
/// `predicted - actual` sign convention.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<F> {
    pub rmse: F,
    pub mae: F,
    pub r2: Option<F>,
    pub n: usize,
    pub pairs: Vec<(F, F)>,
    pub residuals: Vec<F>,
    pub split_spec: String,
    pub model_fingerprint: String,
}

pub fn evaluate<F: Real>(
    model: &PredictorModel<F>,
    test: &Dataset<F>,
    split_spec: &str,
) -> Result<EvalReport<F>> {
    if test.is_empty() {
        return Err(Error::EmptyDataset { context: "evaluate".into() });
    }
    let actual = test.targets();
    let predicted = model.predict_dataset(test)?;
    let pairs: Vec<(F, F)> = actual.iter().copied().zip(predicted.iter().copied()).collect();
    let residuals: Vec<F> = pairs.iter().map(|&(a, p)| p - a).collect();
    Ok(EvalReport {
        rmse: rmse(&actual, &predicted)?,
        mae: mae(&actual, &predicted)?,
        r2: r_squared(&actual, &predicted)?,
        n: pairs.len(),
        pairs,
        residuals,
        split_spec: split_spec.to_string(),
        model_fingerprint: model.fingerprint()?,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct EvalDoc {
    schema_version: u64,
    rmse: f64,
    mae: f64,
    r2: Option<f64>,
    n: usize,
    pairs: Vec<[f64; 2]>,
    residuals: Vec<f64>,
    split_spec: String,
    model_fingerprint: String,
}

impl<F: Real> EvalReport<F> {
    pub fn save(&self, path: &Path) -> Result<()> {
        docio::write_doc(path, &self.to_doc())
    }

    pub fn load(path: &Path) -> Result<EvalReport<F>> {
        let doc: EvalDoc = docio::read_doc(path, EVAL_SCHEMA_VERSION)?;
        Ok(EvalReport {
            rmse: F::from_f64(doc.rmse),
            mae: F::from_f64(doc.mae),
            r2: doc.r2.map(F::from_f64),
            n: doc.n,
            pairs: doc.pairs.iter().map(|[a, p]| (F::from_f64(*a), F::from_f64(*p))).collect(),
            residuals: doc.residuals.into_iter().map(F::from_f64).collect(),
            split_spec: doc.split_spec,
            model_fingerprint: doc.model_fingerprint,
        })
    }

    fn to_doc(&self) -> EvalDoc {
        EvalDoc {
            schema_version: EVAL_SCHEMA_VERSION,
            rmse: self.rmse.as_f64(),
            mae: self.mae.as_f64(),
            r2: self.r2.map(|v| v.as_f64()),
            n: self.n,
            pairs: self.pairs.iter().map(|&(a, p)| [a.as_f64(), p.as_f64()]).collect(),
            residuals: self.residuals.iter().map(|r| r.as_f64()).collect(),
            split_spec: self.split_spec.clone(),
            model_fingerprint: self.model_fingerprint.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ForestParams, ForestPayload, Payload, PredictorModel, Tree, TreeNode, TrainMeta};

    #[test]
    fn rmse_hand_arithmetic() {
        let value = rmse(&[1.0, 2.0, 5.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((value - 1.1547005383792515).abs() < 1e-12);
    }

    #[test]
    fn rmse_trivial_cases() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[2.0], &[3.5]).unwrap(), 1.5);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn rmse_is_symmetric_and_dominates_mae() {
        let a = [0.5, 1.25, -3.0, 2.0];
        let p = [0.75, 1.0, -2.5, 7.0];
        assert_eq!(rmse(&a, &p).unwrap(), rmse(&p, &a).unwrap());
        assert!(rmse(&a, &p).unwrap() >= mae(&a, &p).unwrap());
        assert!(mae(&a, &p).unwrap() >= 0.0);
    }

    fn leaf_model(value: f64) -> PredictorModel<f64> {
        PredictorModel::new(
            crate::dataset::feature_names_vec(),
            None,
            Payload::Forest(ForestPayload {
                trees: vec![Tree { nodes: vec![TreeNode::Leaf { value, n_samples: 1 }] }],
                params: ForestParams { n_trees: 1, ..Default::default() },
            }),
            TrainMeta {
                seed: 0,
                hyperparameters: serde_json::json!({}),
                dataset_fingerprint: "test".into(),
                normalized: false,
                ridge_fallback: false,
            },
        )
        .unwrap()
    }

    fn tiny_dataset(targets: &[f64]) -> Dataset<f64> {
        use crate::dataset::{FeatureVector, LabeledSample};
        let samples = targets
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                LabeledSample::new(
                    FeatureVector {
                        num_load_insts: i as f64,
                        num_store_insts: 1.0,
                        num_insts: 10.0,
                        num_branches: 1.0,
                        num_ops: 12.0,
                        l1i_kb: 32.0,
                        l1d_kb: 512.0,
                        l2_kb: 8192.0,
                        pipeline_width: 8.0,
                    },
                    t,
                    "w".into(),
                    "c".into(),
                    i.to_string(),
                    false,
                )
                .unwrap()
            })
            .collect();
        Dataset::new(samples, false).unwrap()
    }

    #[test]
    fn constant_mean_predictor_has_r2_zero() {
        let targets = [0.5, 1.0, 1.5, 2.0];
        let mean = targets.iter().sum::<f64>() / targets.len() as f64;
        let ds = tiny_dataset(&targets);
        let report = evaluate(&leaf_model(mean), &ds, "full").unwrap();
        assert!(report.r2.unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_actuals_report_r2_not_applicable() {
        let ds = tiny_dataset(&[0.75, 0.75, 0.75]);
        let report = evaluate(&leaf_model(0.5), &ds, "full").unwrap();
        assert_eq!(report.r2, None);
    }

    #[test]
    fn residuals_reproduce_pairs_bit_exactly() {
        let ds = tiny_dataset(&[0.5, 1.0, 2.0]);
        let report = evaluate(&leaf_model(0.9), &ds, "full").unwrap();
        for ((a, p), r) in report.pairs.iter().zip(&report.residuals) {
            assert_eq!((p - a).to_bits(), r.to_bits());
        }
        assert_eq!(report.n, report.pairs.len());
    }

    #[test]
    fn report_document_round_trips_byte_identically() {
        let ds = tiny_dataset(&[0.5, 1.0, 2.0]);
        let report = evaluate(&leaf_model(0.9), &ds, "random:0.2").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eval_report.json");
        report.save(&path).unwrap();
        let loaded: EvalReport<f64> = EvalReport::load(&path).unwrap();
        assert_eq!(loaded, report);
        let bytes = std::fs::read(&path).unwrap();
        loaded.save(&path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), bytes);
    }
}
