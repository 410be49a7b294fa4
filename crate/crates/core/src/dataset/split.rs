//! Deterministic train/test splitting.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::docio;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

pub const SPLIT_SCHEMA_VERSION: u64 = 1;

/// How to partition a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitSpec {
    /// Seeded shuffle; `ceil(fraction * n)` samples go to test.
    Random { fraction: f64, seed: u64 },
    /// Every sample of the named workload goes to test.
    LeaveWorkloadOut { workload: String },
    /// Every sample of the named config goes to test.
    LeaveConfigOut { config_id: String },
}

impl SplitSpec {
    /// Parse the CLI form `random:F`, `workload:W`, or `config:C`.
    pub fn parse(text: &str, seed: u64) -> Result<SplitSpec> {
        let (kind, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::data(format!("split spec '{text}' is not KIND:ARG")))?;
        match kind {
            "random" => {
                let fraction: f64 = arg
                    .parse()
                    .map_err(|_| Error::data(format!("split fraction '{arg}' is not a number")))?;
                if !(fraction > 0.0 && fraction < 1.0) {
                    return Err(Error::data(format!(
                        "split fraction {fraction} must be in (0, 1)"
                    )));
                }
                Ok(SplitSpec::Random { fraction, seed })
            }
            "workload" => Ok(SplitSpec::LeaveWorkloadOut { workload: arg.to_string() }),
            "config" => Ok(SplitSpec::LeaveConfigOut { config_id: arg.to_string() }),
            other => Err(Error::data(format!(
                "unknown split kind '{other}' (expected random, workload, or config)"
            ))),
        }
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitSpec::Random { fraction, .. } => write!(f, "random:{fraction}"),
            SplitSpec::LeaveWorkloadOut { workload } => write!(f, "workload:{workload}"),
            SplitSpec::LeaveConfigOut { config_id } => write!(f, "config:{config_id}"),
        }
    }
}

/// Row indices of the (train, test) partitions. Both are sorted ascending;
/// together they are disjoint and exhaustive.
pub fn split_indices<F: Real>(
    dataset: &Dataset<F>,
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset { context: "split".into() });
    }
    let n = dataset.len();
    let (mut train, mut test): (Vec<usize>, Vec<usize>) = match spec {
        SplitSpec::Random { fraction, seed } => {
            if !(*fraction > 0.0 && *fraction < 1.0) {
                return Err(Error::data(format!("split fraction {fraction} must be in (0, 1)")));
            }
            let mut order: Vec<usize> = (0..n).collect();
            rng::shuffle(&mut order, &mut rng::root_stream(*seed));
            let n_test = (fraction * n as f64).ceil() as usize;
            let test = order[..n_test].to_vec();
            let train = order[n_test..].to_vec();
            (train, test)
        }
        SplitSpec::LeaveWorkloadOut { workload } => {
            (0..n).partition(|&i| dataset.samples()[i].workload != *workload)
        }
        SplitSpec::LeaveConfigOut { config_id } => {
            (0..n).partition(|&i| dataset.samples()[i].config_id != *config_id)
        }
    };
    train.sort_unstable();
    test.sort_unstable();
    if test.is_empty() {
        return Err(Error::EmptyPartition { which: "test", detail: format!("spec {spec}") });
    }
    if train.is_empty() {
        return Err(Error::EmptyPartition { which: "train", detail: format!("spec {spec}") });
    }
    Ok((train, test))
}

pub fn split<F: Real>(
    dataset: &Dataset<F>,
    spec: &SplitSpec,
) -> Result<(Dataset<F>, Dataset<F>)> {
    let (train_idx, test_idx) = split_indices(dataset, spec)?;
    Ok((dataset.subset(&train_idx)?, dataset.subset(&test_idx)?))
}

/// Persisted record of a split, so evaluation and importance reuse the exact
/// partition the model was trained against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub schema_version: u64,
    pub spec: String,
    pub seed: u64,
    pub dataset_fingerprint: String,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

impl SplitRecord {
    pub fn new<F: Real>(
        dataset: &Dataset<F>,
        spec: &SplitSpec,
        seed: u64,
        train_indices: Vec<usize>,
        test_indices: Vec<usize>,
    ) -> SplitRecord {
        SplitRecord {
            schema_version: SPLIT_SCHEMA_VERSION,
            spec: spec.to_string(),
            seed,
            dataset_fingerprint: dataset.fingerprint(),
            train_indices,
            test_indices,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        docio::write_doc(path, self)
    }

    pub fn load(path: &Path) -> Result<SplitRecord> {
        docio::read_doc(path, SPLIT_SCHEMA_VERSION)
    }

    /// Error if the record was produced from a different dataset.
    pub fn check_dataset<F: Real>(&self, dataset: &Dataset<F>) -> Result<()> {
        let fp = dataset.fingerprint();
        if fp != self.dataset_fingerprint {
            return Err(Error::data(format!(
                "split record was made for dataset {}, got {}",
                &self.dataset_fingerprint[..12.min(self.dataset_fingerprint.len())],
                &fp[..12]
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureVector, LabeledSample};

    fn dataset(n: usize, workloads: &[&str]) -> Dataset<f64> {
        let samples = (0..n)
            .map(|i| {
                LabeledSample::new(
                    FeatureVector {
                        num_load_insts: i as f64 + 1.0,
                        num_store_insts: 1.0,
                        num_insts: 100.0,
                        num_branches: 1.0,
                        num_ops: 110.0,
                        l1i_kb: 32.0,
                        l1d_kb: 512.0,
                        l2_kb: 8192.0,
                        pipeline_width: 8.0,
                    },
                    1.0,
                    workloads[i % workloads.len()].to_string(),
                    "baseline".into(),
                    i.to_string(),
                    false,
                )
                .unwrap()
            })
            .collect();
        Dataset::new(samples, false).unwrap()
    }

    #[test]
    fn random_split_sizes_follow_the_ceiling_rule() {
        let ds = dataset(10, &["a"]);
        let (train, test) = split_indices(&ds, &SplitSpec::Random { fraction: 0.2, seed: 42 }).unwrap();
        assert_eq!(test.len(), 2);
        assert_eq!(train.len(), 8);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());

        let ds3 = dataset(3, &["a"]);
        let (_, test3) = split_indices(&ds3, &SplitSpec::Random { fraction: 0.2, seed: 1 }).unwrap();
        assert_eq!(test3.len(), 1);
    }

    #[test]
    fn random_split_is_deterministic() {
        let ds = dataset(50, &["a", "b"]);
        let spec = SplitSpec::Random { fraction: 0.3, seed: 7 };
        let a = split_indices(&ds, &spec).unwrap();
        let b = split_indices(&ds, &spec).unwrap();
        assert_eq!(a, b);
        let c = split_indices(&ds, &SplitSpec::Random { fraction: 0.3, seed: 8 }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn leave_one_workload_out_takes_the_whole_group() {
        let ds = dataset(10, &["bfs", "cg"]);
        let spec = SplitSpec::LeaveWorkloadOut { workload: "bfs".into() };
        let (train, test) = split(&ds, &spec).unwrap();
        assert!(test.samples().iter().all(|s| s.workload == "bfs"));
        assert!(train.samples().iter().all(|s| s.workload == "cg"));
        assert_eq!(test.len(), 5);
    }

    #[test]
    fn absent_group_means_empty_test_partition() {
        let ds = dataset(4, &["synth"]);
        let spec = SplitSpec::LeaveWorkloadOut { workload: "bfs".into() };
        match split_indices(&ds, &spec).unwrap_err() {
            Error::EmptyPartition { which, .. } => assert_eq!(which, "test"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn single_group_means_empty_train_partition() {
        let ds = dataset(4, &["synth"]);
        let spec = SplitSpec::LeaveWorkloadOut { workload: "synth".into() };
        match split_indices(&ds, &spec).unwrap_err() {
            Error::EmptyPartition { which, .. } => assert_eq!(which, "train"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            SplitSpec::parse("random:0.2", 9).unwrap(),
            SplitSpec::Random { fraction: 0.2, seed: 9 }
        );
        assert_eq!(
            SplitSpec::parse("workload:bfs", 0).unwrap(),
            SplitSpec::LeaveWorkloadOut { workload: "bfs".into() }
        );
        assert!(SplitSpec::parse("random:1.5", 0).is_err());
        assert!(SplitSpec::parse("random:0", 0).is_err());
        assert!(SplitSpec::parse("nope:1", 0).is_err());
        assert!(SplitSpec::parse("random", 0).is_err());
    }

    #[test]
    fn split_record_round_trips_and_checks_fingerprint() {
        let ds = dataset(10, &["a"]);
        let spec = SplitSpec::Random { fraction: 0.2, seed: 3 };
        let (train, test) = split_indices(&ds, &spec).unwrap();
        let record = SplitRecord::new(&ds, &spec, 3, train, test);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("split.json");
        record.save(&path).unwrap();
        let loaded = SplitRecord::load(&path).unwrap();
        assert_eq!(loaded, record);
        loaded.check_dataset(&ds).unwrap();
        let other = dataset(11, &["a"]);
        assert!(loaded.check_dataset(&other).is_err());
    }
}
