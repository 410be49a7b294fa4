//! Simulated-system configuration metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One hardware configuration. Cache sizes are stored uniformly in KiB so the
/// model never mixes units (an 8 MB L2 is 8192). `dram_device` and
/// `rob_entries` are metadata only; they are not model features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub config_id: String,
    pub pipeline_width: u32,
    pub rob_entries: u32,
    pub l1i_kb: u32,
    pub l1d_kb: u32,
    pub l2_kb: u32,
    pub dram_device: String,
    pub n_cores: u32,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pipeline_width", self.pipeline_width),
            ("rob_entries", self.rob_entries),
            ("l1i_kb", self.l1i_kb),
            ("l1d_kb", self.l1d_kb),
            ("l2_kb", self.l2_kb),
            ("n_cores", self.n_cores),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::data(format!(
                    "config '{}': {name} must be strictly positive",
                    self.config_id
                )));
            }
        }
        Ok(())
    }

    pub fn baseline() -> SystemConfig {
        SystemConfig {
            config_id: "baseline".into(),
            pipeline_width: 8,
            rob_entries: 192,
            l1i_kb: 32,
            l1d_kb: 512,
            l2_kb: 8192,
            dram_device: "DDR4_2400".into(),
            n_cores: 8,
        }
    }

    pub fn aggressive() -> SystemConfig {
        SystemConfig {
            config_id: "aggressive".into(),
            pipeline_width: 16,
            rob_entries: 384,
            l1i_kb: 64,
            l1d_kb: 1024,
            l2_kb: 16384,
            dram_device: "DDR4_2400".into(),
            n_cores: 8,
        }
    }

    pub fn lean() -> SystemConfig {
        SystemConfig {
            config_id: "lean".into(),
            pipeline_width: 4,
            rob_entries: 96,
            l1i_kb: 16,
            l1d_kb: 256,
            l2_kb: 4096,
            dram_device: "DDR4_2400".into(),
            n_cores: 8,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_the_published_grid() {
        let b = SystemConfig::baseline();
        assert_eq!((b.pipeline_width, b.rob_entries), (8, 192));
        assert_eq!((b.l1i_kb, b.l1d_kb, b.l2_kb), (32, 512, 8192));
        let a = SystemConfig::aggressive();
        assert_eq!((a.pipeline_width, a.rob_entries), (16, 384));
        assert_eq!((a.l1i_kb, a.l1d_kb, a.l2_kb), (64, 1024, 16384));
        let l = SystemConfig::lean();
        assert_eq!((l.pipeline_width, l.rob_entries), (4, 96));
        assert_eq!((l.l1i_kb, l.l1d_kb, l.l2_kb), (16, 256, 4096));
        for c in [b, a, l] {
            assert_eq!(c.n_cores, 8);
            c.validate().unwrap();
        }
    }

    #[test]
    fn zero_sized_fields_are_rejected() {
        let mut c = SystemConfig::baseline();
        c.l2_kb = 0;
        assert!(c.validate().is_err());
    }
}
