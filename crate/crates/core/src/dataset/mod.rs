//! Labeled samples and dataset operations.

mod csvio;
mod scale;
mod split;

pub use csvio::{read_csv, read_csv_path, write_csv, write_csv_path};
pub use scale::Scaler;
pub use split::{split, split_indices, SplitRecord, SplitSpec, SPLIT_SCHEMA_VERSION};

use crate::docio;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Canonical feature order. Every matrix, model payload, and CSV column set
/// uses exactly this order.
pub const FEATURE_NAMES: [&str; 9] = [
    "numLoadInsts",
    "numStoreInsts",
    "numInsts",
    "numBranches",
    "numOps",
    "l1i_kb",
    "l1d_kb",
    "l2_kb",
    "pipeline_width",
];

/// The application count features (the rest are configuration features).
pub const COUNT_FEATURE_NAMES: [&str; 5] =
    ["numLoadInsts", "numStoreInsts", "numInsts", "numBranches", "numOps"];

pub fn feature_names_vec() -> Vec<String> {
    FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

/// The nine model inputs, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector<F> {
    pub num_load_insts: F,
    pub num_store_insts: F,
    pub num_insts: F,
    pub num_branches: F,
    pub num_ops: F,
    pub l1i_kb: F,
    pub l1d_kb: F,
    pub l2_kb: F,
    pub pipeline_width: F,
}

impl<F: Real> FeatureVector<F> {
    pub fn as_array(&self) -> [F; 9] {
        [
            self.num_load_insts,
            self.num_store_insts,
            self.num_insts,
            self.num_branches,
            self.num_ops,
            self.l1i_kb,
            self.l1d_kb,
            self.l2_kb,
            self.pipeline_width,
        ]
    }

    pub fn from_array(values: [F; 9]) -> Self {
        FeatureVector {
            num_load_insts: values[0],
            num_store_insts: values[1],
            num_insts: values[2],
            num_branches: values[3],
            num_ops: values[4],
            l1i_kb: values[5],
            l1d_kb: values[6],
            l2_kb: values[7],
            pipeline_width: values[8],
        }
    }

    /// All fields finite and non-negative; raw samples additionally need a
    /// positive instruction count (normalization divides by it).
    pub fn validate(&self, normalized: bool) -> Result<()> {
        for (name, v) in FEATURE_NAMES.iter().zip(self.as_array()) {
            if !v.is_finite() || v < F::zero() {
                return Err(Error::data(format!("feature {name} = {v} (must be finite and >= 0)")));
            }
        }
        if !normalized && self.num_insts <= F::zero() {
            return Err(Error::data("raw sample has numInsts <= 0"));
        }
        Ok(())
    }
}

/// One (workload, config, interval) observation with its IPC target.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample<F> {
    pub features: FeatureVector<F>,
    pub ipc: F,
    pub workload: String,
    pub config_id: String,
    pub interval_id: String,
    pub normalized: bool,
}

impl<F: Real> LabeledSample<F> {
    pub fn new(
        features: FeatureVector<F>,
        ipc: F,
        workload: String,
        config_id: String,
        interval_id: String,
        normalized: bool,
    ) -> Result<Self> {
        features.validate(normalized)?;
        if !ipc.is_finite() || ipc <= F::zero() {
            return Err(Error::data(format!("ipc = {ipc} (must be finite and positive)")));
        }
        Ok(LabeledSample { features, ipc, workload, config_id, interval_id, normalized })
    }
}

/// Convert count features to per-instruction rates. The four count features
/// are divided by `numInsts`; `numInsts` itself becomes `log10(numInsts)` to
/// preserve interval-length information at a comparable scale. Configuration
/// features and the IPC target are unchanged.
pub fn normalize_per_instruction<F: Real>(sample: &LabeledSample<F>) -> Result<LabeledSample<F>> {
    if sample.normalized {
        return Err(Error::data("sample is already normalized per instruction"));
    }
    let n = sample.features.num_insts;
    if n <= F::zero() {
        return Err(Error::data("cannot normalize: numInsts <= 0"));
    }
    let f = &sample.features;
    let features = FeatureVector {
        num_load_insts: f.num_load_insts / n,
        num_store_insts: f.num_store_insts / n,
        num_insts: n.log10(),
        num_branches: f.num_branches / n,
        num_ops: f.num_ops / n,
        l1i_kb: f.l1i_kb,
        l1d_kb: f.l1d_kb,
        l2_kb: f.l2_kb,
        pipeline_width: f.pipeline_width,
    };
    LabeledSample::new(
        features,
        sample.ipc,
        sample.workload.clone(),
        sample.config_id.clone(),
        sample.interval_id.clone(),
        true,
    )
}

/// Ordered collection of samples sharing one normalization regime.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    samples: Vec<LabeledSample<F>>,
    normalized: bool,
}

impl<F: Real> Dataset<F> {
    pub fn new(samples: Vec<LabeledSample<F>>, normalized: bool) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|s| s.normalized != normalized) {
            return Err(Error::data(format!(
                "sample ({}, {}, {}) has normalized={}, dataset expects {}",
                bad.workload, bad.config_id, bad.interval_id, bad.normalized, normalized
            )));
        }
        Ok(Dataset { samples, normalized })
    }

    pub fn samples(&self) -> &[LabeledSample<F>] {
        &self.samples
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_matrix(&self) -> Vec<[F; 9]> {
        self.samples.iter().map(|s| s.features.as_array()).collect()
    }

    pub fn targets(&self) -> Vec<F> {
        self.samples.iter().map(|s| s.ipc).collect()
    }

    /// New dataset with every sample normalized per instruction.
    pub fn normalize_per_instruction(&self) -> Result<Dataset<F>> {
        let samples: Result<Vec<_>> =
            self.samples.iter().map(normalize_per_instruction).collect();
        Dataset::new(samples?, true)
    }

    /// Samples at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset<F>> {
        let mut samples = Vec::with_capacity(indices.len());
        for &i in indices {
            let sample = self.samples.get(i).ok_or_else(|| {
                Error::data(format!("subset index {i} out of range for {} samples", self.len()))
            })?;
            samples.push(sample.clone());
        }
        Dataset::new(samples, self.normalized)
    }

    /// SHA-256 of the canonical CSV serialization.
    pub fn fingerprint(&self) -> String {
        let mut bytes = Vec::new();
        write_csv(self, &mut bytes).expect("in-memory csv write cannot fail");
        docio::fingerprint(&bytes)
    }
}
