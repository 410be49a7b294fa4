//! Synthetic ground-truth generator.
//!
//! A closed-form mechanistic IPC model over the feature space serves as a
//! fully specified test oracle (real simulator traces are not part of this
//! repository). It is a test instrument, not a simulator: CPI is a base
//! issue term plus cache-miss and branch-flush penalties with square-root
//! cache-size sensitivities, and IPC is its reciprocal. Rate ranges are
//! deliberately narrow so that cache-size variation dominates IPC variance
//! across the configuration grid.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::dataset::{Dataset, FeatureVector, LabeledSample};
use crate::docio;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

pub const GENERATOR_SCHEMA_VERSION: u64 = 1;

// Domain tags for per-sample stream derivation.
const DOMAIN_DRAW: u64 = 0x4452_4157; // "DRAW"
const DOMAIN_NOISE: u64 = 0x4e4f_4953; // "NOIS"

/// Constants of the closed-form IPC model plus the noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams<F> {
    /// L1D miss coefficient.
    pub a1: F,
    /// L2 miss coefficient (applied to the L2 size in MiB).
    pub a2: F,
    /// L1I miss coefficient.
    pub ai: F,
    /// L2 hit latency in cycles.
    pub l2_latency: F,
    /// Memory latency in cycles.
    pub mem_latency: F,
    /// Frontend stall weight.
    pub frontend_weight: F,
    /// Branch misprediction rate.
    pub mispredict_rate: F,
    /// Flush penalty in cycles.
    pub flush_penalty: F,
    /// Std of the additive Gaussian noise on IPC.
    pub sigma: F,
    pub seed: u64,
}

impl<F: Real> Default for OracleParams<F> {
    fn default() -> Self {
        OracleParams {
            a1: F::from_f64(2.0),
            a2: F::from_f64(1.2),
            ai: F::from_f64(0.25),
            l2_latency: F::from_f64(15.0),
            mem_latency: F::from_f64(120.0),
            frontend_weight: F::from_f64(0.1),
            mispredict_rate: F::from_f64(0.05),
            flush_penalty: F::from_f64(20.0),
            sigma: F::zero(),
            seed: 0,
        }
    }
}

/// Per-instruction behavior rates of a workload interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates<F> {
    pub load: F,
    pub store: F,
    pub branch: F,
    /// Micro-op expansion factor (numOps / numInsts).
    pub uops_per_inst: F,
}

/// The noiseless mechanistic IPC.
///
/// Miss rates fall with the square root of cache size (clamped at 1):
/// `m1 = min(1, a1/sqrt(l1d_kb))`, `m2 = min(1, a2/sqrt(l2_mib))`,
/// `mi = min(1, ai/sqrt(l1i_kb))`. The average miss penalty is
/// `Lmiss = l2_latency + m2*mem_latency`, and
///
/// ```text
/// CPI = u/width + (r_load + r_store)*m1*Lmiss
///     + mi*Lmiss*frontend_weight + r_branch*mispredict_rate*flush_penalty
/// ```
///
/// IPC = 1/CPI. Strictly increasing in every cache size and in width (until
/// the miss-rate clamps engage), strictly decreasing in every rate.
pub fn true_ipc<F: Real>(rates: &Rates<F>, config: &SystemConfig, params: &OracleParams<F>) -> F {
    let one = F::one();
    let l1d = F::from_f64(config.l1d_kb as f64);
    let l1i = F::from_f64(config.l1i_kb as f64);
    let l2_mib = F::from_f64(config.l2_kb as f64 / 1024.0);
    let width = F::from_f64(config.pipeline_width as f64);

    let m1 = (params.a1 / l1d.sqrt()).min(one);
    let m2 = (params.a2 / l2_mib.sqrt()).min(one);
    let mi = (params.ai / l1i.sqrt()).min(one);
    let l_miss = params.l2_latency + m2 * params.mem_latency;

    let cpi = rates.uops_per_inst / width
        + (rates.load + rates.store) * m1 * l_miss
        + mi * l_miss * params.frontend_weight
        + rates.branch * params.mispredict_rate * params.flush_penalty;
    one / cpi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// The three published presets: baseline, aggressive, lean.
    Table1,
    /// Full cross of width x l1d x l2 x l1i around the presets (81 configs).
    Extended,
}

pub fn config_grid(kind: GridKind) -> Vec<SystemConfig> {
    match kind {
        GridKind::Table1 => {
            vec![SystemConfig::baseline(), SystemConfig::aggressive(), SystemConfig::lean()]
        }
        GridKind::Extended => {
            let mut grid = Vec::with_capacity(81);
            for width in [4u32, 8, 16] {
                for l1d in [256u32, 512, 1024] {
                    for l2 in [4096u32, 8192, 16384] {
                        for l1i in [16u32, 32, 64] {
                            grid.push(SystemConfig {
                                config_id: format!("w{width}_l1i{l1i}_l1d{l1d}_l2_{l2}"),
                                pipeline_width: width,
                                rob_entries: 24 * width,
                                l1i_kb: l1i,
                                l1d_kb: l1d,
                                l2_kb: l2,
                                dram_device: "DDR4_2400".into(),
                                n_cores: 8,
                            });
                        }
                    }
                }
            }
            grid
        }
    }
}

/// Sampling ranges and grid for dataset generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig<F> {
    pub n_samples: usize,
    pub r_load: (F, F),
    pub r_store: (F, F),
    pub r_branch: (F, F),
    pub uops_per_inst: (F, F),
    /// numInsts is log-uniform; these are the log10 bounds.
    pub insts_log10: (F, F),
    pub grid: GridKind,
    pub seed: u64,
}

impl<F: Real> GeneratorConfig<F> {
    pub fn with_defaults(n_samples: usize, grid: GridKind, seed: u64) -> Self {
        GeneratorConfig {
            n_samples,
            r_load: (F::from_f64(0.20), F::from_f64(0.30)),
            r_store: (F::from_f64(0.05), F::from_f64(0.10)),
            r_branch: (F::from_f64(0.10), F::from_f64(0.20)),
            uops_per_inst: (F::from_f64(1.0), F::from_f64(1.5)),
            insts_log10: (F::from_f64(6.0), F::from_f64(9.0)),
            grid,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::data("generator n_samples must be >= 1"));
        }
        let rate_ranges =
            [("r_load", self.r_load), ("r_store", self.r_store), ("r_branch", self.r_branch)];
        for (name, (lo, hi)) in rate_ranges {
            if !(lo > F::zero() && hi <= F::one() && lo <= hi) {
                return Err(Error::data(format!("generator {name} range must be within (0, 1]")));
            }
        }
        let (ulo, uhi) = self.uops_per_inst;
        if !(ulo > F::zero() && ulo <= uhi) {
            return Err(Error::data("generator uops_per_inst range must be positive"));
        }
        let (ilo, ihi) = self.insts_log10;
        if !(ilo > F::zero() && ilo <= ihi) {
            return Err(Error::data("generator insts_log10 range must be positive"));
        }
        Ok(())
    }
}

fn uniform<F: Real>(rng: &mut rand_chacha::ChaCha8Rng, range: (F, F)) -> F {
    let u = F::from_f64(rng.gen::<f64>());
    range.0 + u * (range.1 - range.0)
}

/// Generate a labeled dataset from the oracle. Per-sample streams are derived
/// from `(seed, DOMAIN, sample_index)`, so batches can be produced in any
/// order (or in parallel) with identical results. Counts are rounded to whole
/// instructions; IPC gets `Normal(0, sigma)` noise and is clamped at 0.01.
pub fn generate<F: Real>(
    gen: &GeneratorConfig<F>,
    params: &OracleParams<F>,
) -> Result<Dataset<F>> {
    gen.validate()?;
    let grid = config_grid(gen.grid);
    let ten = F::from_f64(10.0);
    let clamp_floor = F::from_f64(0.01);

    let mut samples = Vec::with_capacity(gen.n_samples);
    for index in 0..gen.n_samples {
        let mut draw = rng::stream2(gen.seed, DOMAIN_DRAW, index as u64);
        let rates = Rates {
            load: uniform(&mut draw, gen.r_load),
            store: uniform(&mut draw, gen.r_store),
            branch: uniform(&mut draw, gen.r_branch),
            uops_per_inst: uniform(&mut draw, gen.uops_per_inst),
        };
        let exponent = uniform(&mut draw, gen.insts_log10);
        let num_insts = ten.powf(exponent).round();
        let config = &grid[draw.gen_range(0..grid.len() as u64) as usize];

        let mut noise_stream = rng::stream2(params.seed, DOMAIN_NOISE, index as u64);
        let noise = F::from_f64(rng::standard_normal(&mut noise_stream));
        let ipc = (true_ipc(&rates, config, params) + params.sigma * noise).max(clamp_floor);

        let features = FeatureVector {
            num_load_insts: (rates.load * num_insts).round(),
            num_store_insts: (rates.store * num_insts).round(),
            num_insts,
            num_branches: (rates.branch * num_insts).round(),
            num_ops: (rates.uops_per_inst * num_insts).round(),
            l1i_kb: F::from_f64(config.l1i_kb as f64),
            l1d_kb: F::from_f64(config.l1d_kb as f64),
            l2_kb: F::from_f64(config.l2_kb as f64),
            pipeline_width: F::from_f64(config.pipeline_width as f64),
        };
        samples.push(LabeledSample::new(
            features,
            ipc,
            "synth".into(),
            config.config_id.clone(),
            index.to_string(),
            false,
        )?);
    }
    Dataset::new(samples, false)
}

/// Reconstruct the latent rates of a generated sample from its count
/// features (exact up to count rounding).
pub fn rates_from_sample<F: Real>(sample: &LabeledSample<F>) -> Rates<F> {
    let f = &sample.features;
    Rates {
        load: f.num_load_insts / f.num_insts,
        store: f.num_store_insts / f.num_insts,
        branch: f.num_branches / f.num_insts,
        uops_per_inst: f.num_ops / f.num_insts,
    }
}

/// Configuration of a generated sample, rebuilt from its feature values.
pub fn config_from_sample<F: Real>(sample: &LabeledSample<F>) -> SystemConfig {
    let f = &sample.features;
    SystemConfig {
        config_id: sample.config_id.clone(),
        pipeline_width: f.pipeline_width.as_f64() as u32,
        rob_entries: 24 * f.pipeline_width.as_f64() as u32,
        l1i_kb: f.l1i_kb.as_f64() as u32,
        l1d_kb: f.l1d_kb.as_f64() as u32,
        l2_kb: f.l2_kb.as_f64() as u32,
        dram_device: "DDR4_2400".into(),
        n_cores: 8,
    }
}

/// On-disk form of (GeneratorConfig, OracleParams); every field optional so a
/// document can override just a few defaults.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub schema_version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_load: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_store: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_branch: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uops_per_inst: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insts_log10: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl GeneratorDoc {
    pub fn load(path: &Path) -> Result<GeneratorDoc> {
        docio::read_doc(path, GENERATOR_SCHEMA_VERSION)
    }

    /// Apply the document's overrides onto defaults.
    pub fn apply<F: Real>(&self, gen: &mut GeneratorConfig<F>, params: &mut OracleParams<F>) {
        let pair = |p: (f64, f64)| (F::from_f64(p.0), F::from_f64(p.1));
        if let Some(n) = self.n_samples {
            gen.n_samples = n;
        }
        if let Some(r) = self.r_load {
            gen.r_load = pair(r);
        }
        if let Some(r) = self.r_store {
            gen.r_store = pair(r);
        }
        if let Some(r) = self.r_branch {
            gen.r_branch = pair(r);
        }
        if let Some(r) = self.uops_per_inst {
            gen.uops_per_inst = pair(r);
        }
        if let Some(r) = self.insts_log10 {
            gen.insts_log10 = pair(r);
        }
        if let Some(g) = self.grid {
            gen.grid = g;
        }
        if let Some(s) = self.seed {
            gen.seed = s;
            params.seed = s;
        }
        if let Some(s) = self.sigma {
            params.sigma = F::from_f64(s);
        }
    }
}
