//! Turning simulation runs into labeled samples.
//!
//! A run manifest lists (workload, interval) entries, each pointing at a
//! stats file, a dump index within it, and the system configuration the run
//! used. `build_records` resolves every entry through the stat mapping;
//! entries that cannot produce a complete sample are dropped and reported
//! with a reason rather than silently defaulting to zero.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::dataset::{Dataset, FeatureVector, LabeledSample, COUNT_FEATURE_NAMES};
use crate::docio;
use crate::error::{Error, Result};
use crate::mapping::{apply_mapping, extract_target, StatMapping};
use crate::scalar::Real;
use crate::stats::{parse_stats_file, StatsDump};

pub const MANIFEST_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEntry {
    pub workload: String,
    pub interval_id: String,
    pub stats_path: PathBuf,
    pub dump_index: usize,
    pub config: SystemConfig,
}

impl RunEntry {
    fn label(&self) -> String {
        format!("({}, {}, {})", self.workload, self.interval_id, self.config.config_id)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u64,
    pub entries: Vec<RunEntry>,
}

impl RunManifest {
    pub fn new(entries: Vec<RunEntry>) -> Result<RunManifest> {
        let manifest = RunManifest { schema_version: MANIFEST_SCHEMA_VERSION, entries };
        manifest.validate()?;
        Ok(manifest)
    }

    /// Load a manifest; relative stats paths are resolved against the
    /// manifest's own directory.
    pub fn load(path: &Path) -> Result<RunManifest> {
        let mut manifest: RunManifest = docio::read_doc(path, MANIFEST_SCHEMA_VERSION)?;
        if let Some(dir) = path.parent() {
            for entry in &mut manifest.entries {
                if entry.stats_path.is_relative() {
                    entry.stats_path = dir.join(&entry.stats_path);
                }
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        docio::write_doc(path, self)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.entries {
            entry.config.validate().map_err(|e| Error::Manifest { msg: e.to_string() })?;
            let key =
                (entry.workload.clone(), entry.interval_id.clone(), entry.config.config_id.clone());
            if !seen.insert(key) {
                return Err(Error::Manifest {
                    msg: format!("duplicate entry {}", entry.label()),
                });
            }
        }
        Ok(())
    }
}

/// Entries that did not make it into the dataset, with the reason.
#[derive(Debug, Clone, Default)]
pub struct DropReport {
    pub dropped: Vec<(String, String)>,
}

impl DropReport {
    pub fn is_empty(&self) -> bool {
        self.dropped.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.dropped.is_empty() {
            return "no entries dropped".to_string();
        }
        let mut out = format!("{} entries dropped:", self.dropped.len());
        for (entry, reason) in &self.dropped {
            out.push_str(&format!("\n  {entry}: {reason}"));
        }
        out
    }
}

/// One labeled sample per usable manifest entry. Count features come from
/// the stat mapping, configuration features from the entry's SystemConfig.
pub fn build_records<F: Real>(
    manifest: &RunManifest,
    mapping: &StatMapping,
) -> Result<(Dataset<F>, DropReport)> {
    let mut cache: HashMap<PathBuf, std::result::Result<Vec<StatsDump>, String>> = HashMap::new();
    let mut samples = Vec::new();
    let mut report = DropReport::default();

    for entry in &manifest.entries {
        let parsed = cache.entry(entry.stats_path.clone()).or_insert_with(|| {
            std::fs::read_to_string(&entry.stats_path)
                .map_err(|e| format!("{}: {e}", entry.stats_path.display()))
                .and_then(|text| parse_stats_file(&text).map_err(|e| e.to_string()))
        });
        let dumps = match parsed {
            Ok(dumps) => dumps,
            Err(reason) => {
                report.dropped.push((entry.label(), reason.clone()));
                continue;
            }
        };
        let Some(dump) = dumps.get(entry.dump_index) else {
            report.dropped.push((
                entry.label(),
                format!("dump_index {} out of range ({} dumps)", entry.dump_index, dumps.len()),
            ));
            continue;
        };

        let features = apply_mapping(dump, mapping);
        let missing: Vec<&str> = COUNT_FEATURE_NAMES
            .iter()
            .filter(|name| features.get(**name) == Some(&None))
            .copied()
            .collect();
        if !missing.is_empty() {
            report
                .dropped
                .push((entry.label(), format!("{} missing", missing.join(", "))));
            continue;
        }
        let count = |name: &str| F::from_f64(features[name].unwrap());

        let ipc = match extract_target(dump, mapping) {
            Ok(ipc) => ipc,
            Err(e) => {
                report.dropped.push((entry.label(), e.to_string()));
                continue;
            }
        };

        let vector = FeatureVector {
            num_load_insts: count("numLoadInsts"),
            num_store_insts: count("numStoreInsts"),
            num_insts: count("numInsts"),
            num_branches: count("numBranches"),
            num_ops: count("numOps"),
            l1i_kb: F::from_f64(entry.config.l1i_kb as f64),
            l1d_kb: F::from_f64(entry.config.l1d_kb as f64),
            l2_kb: F::from_f64(entry.config.l2_kb as f64),
            pipeline_width: F::from_f64(entry.config.pipeline_width as f64),
        };
        match LabeledSample::new(
            vector,
            F::from_f64(ipc),
            entry.workload.clone(),
            entry.config.config_id.clone(),
            entry.interval_id.clone(),
            false,
        ) {
            Ok(sample) => samples.push(sample),
            Err(e) => report.dropped.push((entry.label(), e.to_string())),
        }
    }

    if samples.is_empty() {
        return Err(Error::EmptyDataset {
            context: format!("ingest produced no valid samples ({})", report.summary()),
        });
    }
    let dataset = Dataset::new(samples, false)?;
    Ok((dataset, report))
}
