//! Feature-importance analysis.
//!
//! Two methods, labeled in the report so their scales are never confused:
//! permutation importance (RMSE increase on the test partition when one
//! column is shuffled — works for any model) and impurity importance
//! (normalized variance reduction — forests only).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::docio;
use crate::error::{Error, Result};
use crate::eval::rmse;
use crate::models::{Payload, PredictorModel, TreeNode};
use crate::rng;
use crate::scalar::Real;
use crate::textfmt::fmt_real;

pub const IMPORTANCE_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceMethod {
    Permutation,
    Impurity,
}

impl ImportanceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ImportanceMethod::Permutation => "permutation",
            ImportanceMethod::Impurity => "impurity",
        }
    }

    pub fn parse(text: &str) -> Result<ImportanceMethod> {
        match text {
            "permutation" => Ok(ImportanceMethod::Permutation),
            "impurity" => Ok(ImportanceMethod::Impurity),
            other => Err(Error::data(format!("unknown importance method '{other}'"))),
        }
    }
}

/// Scores are in canonical feature order. Permutation scores are RMSE deltas
/// (may be slightly negative from noise); impurity scores are non-negative
/// and sum to 1 whenever any split exists.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport<F> {
    pub method: ImportanceMethod,
    pub scores: Vec<(String, F)>,
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    /// Impurity only: true when no tree in the forest has any split.
    pub no_splits: bool,
}

/// Permutation importance on `test`: for feature `j` and repeat `r` in
/// `1..=repeats`, column `j` is shuffled with the stream derived from
/// `(seed, j, r)` and the RMSE is recomputed; the score is the mean RMSE
/// increase over the baseline.
pub fn permutation_importance<F: Real>(
    model: &PredictorModel<F>,
    test: &Dataset<F>,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport<F>> {
    if test.is_empty() {
        return Err(Error::EmptyDataset { context: "permutation importance".into() });
    }
    if repeats == 0 {
        return Err(Error::data("permutation importance needs repeats >= 1"));
    }
    if test.normalized() != model.train_meta.normalized {
        return Err(Error::RegimeMismatch {
            model_normalized: model.train_meta.normalized,
            data_normalized: test.normalized(),
        });
    }
    let rows: Vec<Vec<F>> = test.feature_matrix().iter().map(|r| r.to_vec()).collect();
    let actual = test.targets();
    let baseline = rmse(&actual, &model.predict_matrix(&rows)?)?;

    let width = model.width();
    let mut scores = Vec::with_capacity(width);
    for (j, name) in model.feature_names.iter().enumerate() {
        let mut delta_sum = F::zero();
        for r in 1..=repeats {
            let mut column: Vec<F> = rows.iter().map(|row| row[j]).collect();
            rng::shuffle(&mut column, &mut rng::stream2(seed, j as u64, r as u64));
            let mut shuffled = rows.clone();
            for (row, v) in shuffled.iter_mut().zip(column) {
                row[j] = v;
            }
            let shuffled_rmse = rmse(&actual, &model.predict_matrix(&shuffled)?)?;
            delta_sum = delta_sum + (shuffled_rmse - baseline);
        }
        scores.push((name.clone(), delta_sum / F::from_usize(repeats).unwrap()));
    }
    Ok(ImportanceReport {
        method: ImportanceMethod::Permutation,
        scores,
        repeats: Some(repeats),
        seed: Some(seed),
        no_splits: false,
    })
}

/// Impurity importance of a forest: per tree, each feature's summed impurity
/// decrease divided by the tree's total decrease; trees without splits
/// contribute nothing; the average over contributing trees is renormalized to
/// sum 1.
pub fn impurity_importance<F: Real>(model: &PredictorModel<F>) -> Result<ImportanceReport<F>> {
    let Payload::Forest(payload) = &model.payload else {
        return Err(Error::WrongModelKind {
            expected: "forest",
            got: model.kind().as_str().to_string(),
        });
    };
    let width = model.width();
    let mut mean = vec![F::zero(); width];
    let mut contributing = 0usize;
    for tree in &payload.trees {
        let mut per_feature = vec![F::zero(); width];
        let mut total = F::zero();
        for node in &tree.nodes {
            if let TreeNode::Internal { feature_index, impurity_decrease, .. } = node {
                per_feature[*feature_index] = per_feature[*feature_index] + *impurity_decrease;
                total = total + *impurity_decrease;
            }
        }
        if total > F::zero() {
            contributing += 1;
            for (m, f) in mean.iter_mut().zip(per_feature) {
                *m = *m + f / total;
            }
        }
    }

    let no_splits = contributing == 0;
    if !no_splits {
        let count = F::from_usize(contributing).unwrap();
        for m in mean.iter_mut() {
            *m = *m / count;
        }
        let sum = mean.iter().fold(F::zero(), |a, &v| a + v);
        for m in mean.iter_mut() {
            *m = *m / sum;
        }
    }
    Ok(ImportanceReport {
        method: ImportanceMethod::Impurity,
        scores: model.feature_names.iter().cloned().zip(mean).collect(),
        repeats: None,
        seed: None,
        no_splits,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct ImportanceDoc {
    schema_version: u64,
    method: ImportanceMethod,
    scores: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    no_splits: bool,
}

impl<F: Real> ImportanceReport<F> {
    pub fn save(&self, path: &Path) -> Result<()> {
        docio::write_doc(
            path,
            &ImportanceDoc {
                schema_version: IMPORTANCE_SCHEMA_VERSION,
                method: self.method,
                scores: self.scores.iter().map(|(n, s)| (n.clone(), s.as_f64())).collect(),
                repeats: self.repeats,
                seed: self.seed,
                no_splits: self.no_splits,
            },
        )
    }

    pub fn load(path: &Path) -> Result<ImportanceReport<F>> {
        let doc: ImportanceDoc = docio::read_doc(path, IMPORTANCE_SCHEMA_VERSION)?;
        Ok(ImportanceReport {
            method: doc.method,
            scores: doc.scores.into_iter().map(|(n, s)| (n, F::from_f64(s))).collect(),
            repeats: doc.repeats,
            seed: doc.seed,
            no_splits: doc.no_splits,
        })
    }

    /// `feature,score` CSV for plotting, in canonical feature order.
    pub fn write_scores_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let wrap = |e: std::io::Error| Error::Csv { row: None, msg: e.to_string() };
        writeln!(writer, "feature,score").map_err(wrap)?;
        for (name, score) in &self.scores {
            writeln!(writer, "{},{}", name, fmt_real(*score)).map_err(wrap)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::forest::tests::random_dataset;
    use crate::models::{fit_forest, ForestParams, ForestPayload, Tree, TrainMeta};

    fn forest_model(trees: Vec<Tree<f64>>) -> PredictorModel<f64> {
        let n = trees.len();
        PredictorModel::new(
            crate::dataset::feature_names_vec(),
            None,
            Payload::Forest(ForestPayload {
                trees,
                params: ForestParams { n_trees: n, ..Default::default() },
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

    #[test]
    fn unread_feature_scores_exactly_zero() {
        // One split on feature 6 (l1d_kb); nothing reads the other columns.
        let tree = Tree {
            nodes: vec![
                TreeNode::Internal {
                    feature_index: 6,
                    threshold: 512.0,
                    left: 1,
                    right: 2,
                    n_samples: 4,
                    impurity_decrease: 1.0,
                },
                TreeNode::Leaf { value: 0.2, n_samples: 2 },
                TreeNode::Leaf { value: 0.8, n_samples: 2 },
            ],
        };
        let model = forest_model(vec![tree]);
        let ds = random_dataset(30, 3, None);
        let report = permutation_importance(&model, &ds, 5, 11).unwrap();
        for (name, score) in &report.scores {
            if name != "l1d_kb" {
                assert_eq!(*score, 0.0, "feature {name} scored {score}");
            }
        }
        assert!(report.scores.iter().any(|(n, s)| n == "l1d_kb" && *s != 0.0));
    }

    #[test]
    fn constant_column_scores_zero() {
        // l2_kb and pipeline_width are constant in random_dataset.
        let ds = random_dataset(40, 5, None);
        let model = fit_forest(&ds, ForestParams { n_trees: 10, ..Default::default() }, 1).unwrap();
        let report = permutation_importance(&model, &ds, 3, 0).unwrap();
        let l2 = report.scores.iter().find(|(n, _)| n == "l2_kb").unwrap();
        assert_eq!(l2.1, 0.0);
    }

    #[test]
    fn permutation_is_deterministic_given_seed() {
        let ds = random_dataset(40, 6, None);
        let model = fit_forest(&ds, ForestParams { n_trees: 5, ..Default::default() }, 1).unwrap();
        let a = permutation_importance(&model, &ds, 4, 9).unwrap();
        let b = permutation_importance(&model, &ds, 4, 9).unwrap();
        assert_eq!(a, b);
        let c = permutation_importance(&model, &ds, 4, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn impurity_of_single_split_is_one() {
        let tree = Tree {
            nodes: vec![
                TreeNode::Internal {
                    feature_index: 3,
                    threshold: 1.0,
                    left: 1,
                    right: 2,
                    n_samples: 2,
                    impurity_decrease: 0.5,
                },
                TreeNode::Leaf { value: 0.0, n_samples: 1 },
                TreeNode::Leaf { value: 1.0, n_samples: 1 },
            ],
        };
        let report = impurity_importance(&forest_model(vec![tree])).unwrap();
        for (i, (_, score)) in report.scores.iter().enumerate() {
            assert_eq!(*score, if i == 3 { 1.0 } else { 0.0 });
        }
        assert!(!report.no_splits);
    }

    #[test]
    fn all_leaf_forest_reports_no_splits() {
        let trees = vec![
            Tree { nodes: vec![TreeNode::Leaf { value: 0.6, n_samples: 3 }] },
            Tree { nodes: vec![TreeNode::Leaf { value: 0.6, n_samples: 3 }] },
        ];
        let report = impurity_importance(&forest_model(trees)).unwrap();
        assert!(report.no_splits);
        assert!(report.scores.iter().all(|(_, s)| *s == 0.0));
    }

    #[test]
    fn impurity_scores_sum_to_one_for_trained_forest() {
        let ds = random_dataset(60, 7, None);
        let model = fit_forest(&ds, ForestParams { n_trees: 20, ..Default::default() }, 1).unwrap();
        let report = impurity_importance(&model).unwrap();
        let total: f64 = report.scores.iter().map(|(_, s)| s).sum();
        assert!((total - 1.0).abs() < 1e-12, "sum {total}");
        assert!(report.scores.iter().all(|(_, s)| *s >= 0.0));
    }

    #[test]
    fn impurity_is_permutation_covariant() {
        let ds = random_dataset(50, 8, None);
        let model = fit_forest(&ds, ForestParams { n_trees: 8, ..Default::default() }, 1).unwrap();
        let base = impurity_importance(&model).unwrap();

        // Relabel features through a rotation of the index space.
        let perm: Vec<usize> = (0..9).map(|i| (i + 2) % 9).collect();
        let Payload::Forest(payload) = &model.payload else { unreachable!() };
        let relabeled: Vec<Tree<f64>> = payload
            .trees
            .iter()
            .map(|t| Tree {
                nodes: t
                    .nodes
                    .iter()
                    .map(|n| match n {
                        TreeNode::Internal {
                            feature_index,
                            threshold,
                            left,
                            right,
                            n_samples,
                            impurity_decrease,
                        } => TreeNode::Internal {
                            feature_index: perm[*feature_index],
                            threshold: *threshold,
                            left: *left,
                            right: *right,
                            n_samples: *n_samples,
                            impurity_decrease: *impurity_decrease,
                        },
                        leaf => leaf.clone(),
                    })
                    .collect(),
            })
            .collect();
        let permuted = impurity_importance(&forest_model(relabeled)).unwrap();
        for (j, (_, score)) in base.scores.iter().enumerate() {
            assert_eq!(permuted.scores[perm[j]].1, *score);
        }
    }

    #[test]
    fn impurity_of_linear_model_is_wrong_kind() {
        use crate::models::fit_linear;
        let ds = crate::models::linear::tests::planted_linear(20, 3);
        let model = fit_linear(&ds).unwrap();
        match impurity_importance(&model).unwrap_err() {
            Error::WrongModelKind { .. } => {}
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn report_round_trips() {
        let ds = random_dataset(30, 9, None);
        let model = fit_forest(&ds, ForestParams { n_trees: 5, ..Default::default() }, 1).unwrap();
        let report = permutation_importance(&model, &ds, 2, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("importance_report.json");
        report.save(&path).unwrap();
        let loaded: ImportanceReport<f64> = ImportanceReport::load(&path).unwrap();
        assert_eq!(loaded, report);
        let mut csv = Vec::new();
        loaded.write_scores_csv(&mut csv).unwrap();
        assert_eq!(csv.iter().filter(|&&b| b == b'\n').count(), 10);
    }
}
