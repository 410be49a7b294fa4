//! Mapping from raw stat names onto the model's feature vector.
//!
//! gem5 stat names drift across simulator versions, so the mapping is data,
//! not code: each count feature is defined by a list of glob patterns over
//! stat names, and matching stats are summed (which also aggregates per-core
//! stats across `cpu0..cpuN`). The IPC target is a numerator/denominator
//! pattern pair. Pattern wildcards: `*` matches any run of non-dot
//! characters, `**` matches any run including dots; everything else is
//! literal.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::dataset::COUNT_FEATURE_NAMES;
use crate::docio;
use crate::error::{Error, Result};
use crate::stats::StatsDump;

pub const MAPPING_SCHEMA_VERSION: u64 = 1;

/// How per-core cycle counts are collapsed into the IPC denominator.
///
/// `Max` models the slowest core bounding the wall-clock of a multicore
/// interval and is the default; `Mean` is available as an override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DenomAgg {
    Max,
    Mean,
}

#[derive(Debug, Clone)]
pub struct FeatureRule {
    pub feature: String,
    pub patterns: Vec<String>,
    compiled: Vec<Regex>,
}

#[derive(Debug, Clone)]
pub struct TargetRule {
    pub numerator: Vec<String>,
    pub denominator: Vec<String>,
    pub denominator_agg: DenomAgg,
    numerator_compiled: Vec<Regex>,
    denominator_compiled: Vec<Regex>,
}

#[derive(Debug, Clone)]
pub struct StatMapping {
    pub features: Vec<FeatureRule>,
    pub target: TargetRule,
}

fn glob_to_regex(pattern: &str) -> Result<Regex> {
    let mut re = String::from("^");
    let mut chars = pattern.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '*' {
            if chars.peek() == Some(&'*') {
                chars.next();
                re.push_str(".*");
            } else {
                re.push_str("[^.]*");
            }
        } else {
            re.push_str(&regex::escape(&c.to_string()));
        }
    }
    re.push('$');
    Regex::new(&re)
        .map_err(|e| Error::Mapping { msg: format!("pattern '{pattern}' is invalid: {e}") })
}

fn compile_all(patterns: &[String]) -> Result<Vec<Regex>> {
    patterns.iter().map(|p| glob_to_regex(p)).collect()
}

fn matches_any(compiled: &[Regex], name: &str) -> bool {
    compiled.iter().any(|re| re.is_match(name))
}

impl StatMapping {
    /// Build and validate a mapping. Every count feature of the model must
    /// have at least one pattern, and only count features may appear.
    pub fn new(
        features: Vec<(String, Vec<String>)>,
        numerator: Vec<String>,
        denominator: Vec<String>,
        denominator_agg: DenomAgg,
    ) -> Result<StatMapping> {
        let mut rules = Vec::new();
        for (feature, patterns) in features {
            if !COUNT_FEATURE_NAMES.contains(&feature.as_str()) {
                return Err(Error::Mapping {
                    msg: format!("unknown feature '{feature}': mapping rules cover only {COUNT_FEATURE_NAMES:?}"),
                });
            }
            if rules.iter().any(|r: &FeatureRule| r.feature == feature) {
                return Err(Error::Mapping { msg: format!("duplicate feature rule '{feature}'") });
            }
            if patterns.is_empty() {
                return Err(Error::Mapping { msg: format!("feature '{feature}' has no patterns") });
            }
            let compiled = compile_all(&patterns)?;
            rules.push(FeatureRule { feature, patterns, compiled });
        }
        for required in COUNT_FEATURE_NAMES {
            if !rules.iter().any(|r| r.feature == required) {
                return Err(Error::Mapping { msg: format!("feature '{required}' has no rule") });
            }
        }
        if numerator.is_empty() || denominator.is_empty() {
            return Err(Error::Mapping { msg: "target rule needs numerator and denominator patterns".into() });
        }
        let target = TargetRule {
            numerator_compiled: compile_all(&numerator)?,
            denominator_compiled: compile_all(&denominator)?,
            numerator,
            denominator,
            denominator_agg,
        };
        Ok(StatMapping { features: rules, target })
    }

    /// The shipped default for modern gem5 O3CPU stat names.
    pub fn default_gem5() -> StatMapping {
        let count = |name: &str| {
            (
                name.to_string(),
                vec![format!("system.cpu*.commitStats*.{name}")],
            )
        };
        StatMapping::new(
            vec![
                count("numLoadInsts"),
                count("numStoreInsts"),
                count("numInsts"),
                count("numBranches"),
                count("numOps"),
            ],
            vec!["system.cpu*.commitStats*.numInsts".to_string()],
            vec!["system.cpu*.baseStats.numCycles".to_string()],
            DenomAgg::Max,
        )
        .expect("default mapping is valid")
    }

    pub fn load(path: &Path) -> Result<StatMapping> {
        let doc: MappingDoc = docio::read_doc(path, MAPPING_SCHEMA_VERSION)?;
        StatMapping::new(
            doc.features.into_iter().map(|f| (f.name, f.patterns)).collect(),
            doc.target.numerator,
            doc.target.denominator,
            doc.target.denominator_agg,
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        docio::write_doc(path, &self.to_doc())
    }

    pub fn to_doc(&self) -> MappingDoc {
        MappingDoc {
            schema_version: MAPPING_SCHEMA_VERSION,
            features: self
                .features
                .iter()
                .map(|r| FeatureRuleDoc { name: r.feature.clone(), patterns: r.patterns.clone() })
                .collect(),
            target: TargetRuleDoc {
                numerator: self.target.numerator.clone(),
                denominator: self.target.denominator.clone(),
                denominator_agg: self.target.denominator_agg,
            },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MappingDoc {
    pub schema_version: u64,
    pub features: Vec<FeatureRuleDoc>,
    pub target: TargetRuleDoc,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FeatureRuleDoc {
    pub name: String,
    pub patterns: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TargetRuleDoc {
    pub numerator: Vec<String>,
    pub denominator: Vec<String>,
    pub denominator_agg: DenomAgg,
}

/// Sum each feature's matching stats. A feature with zero matches maps to
/// `None` rather than 0 — downstream decides what to do with missing data.
pub fn apply_mapping(dump: &StatsDump, mapping: &StatMapping) -> BTreeMap<String, Option<f64>> {
    let mut out = BTreeMap::new();
    for rule in &mapping.features {
        let mut sum = 0.0;
        let mut matched = false;
        for (name, value) in &dump.values {
            if matches_any(&rule.compiled, name) {
                sum += *value;
                matched = true;
            }
        }
        out.insert(rule.feature.clone(), matched.then_some(sum));
    }
    out
}

/// IPC for one dump: sum of numerator matches over the aggregated denominator.
pub fn extract_target(dump: &StatsDump, mapping: &StatMapping) -> Result<f64> {
    let target = &mapping.target;
    let mut num_sum = 0.0;
    let mut num_matched = false;
    let mut den: Vec<f64> = Vec::new();
    for (name, value) in &dump.values {
        if matches_any(&target.numerator_compiled, name) {
            num_sum += *value;
            num_matched = true;
        }
        if matches_any(&target.denominator_compiled, name) {
            den.push(*value);
        }
    }
    if !num_matched {
        return Err(Error::Target {
            entry: format!("dump {}", dump.dump_index),
            msg: "numerator patterns matched no stats".into(),
        });
    }
    if den.is_empty() {
        return Err(Error::Target {
            entry: format!("dump {}", dump.dump_index),
            msg: "denominator patterns matched no stats".into(),
        });
    }
    let denominator = match target.denominator_agg {
        DenomAgg::Max => den.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        DenomAgg::Mean => den.iter().sum::<f64>() / den.len() as f64,
    };
    if !(denominator > 0.0) {
        return Err(Error::Target {
            entry: format!("dump {}", dump.dump_index),
            msg: format!("denominator is {denominator}, must be positive"),
        });
    }
    Ok(num_sum / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dump_of(pairs: &[(&str, f64)]) -> StatsDump {
        let mut d = StatsDump::new(0);
        for (k, v) in pairs {
            d.values.insert(k.to_string(), *v);
        }
        d
    }

    fn mapping_with(pattern: &str) -> StatMapping {
        let rules = COUNT_FEATURE_NAMES
            .iter()
            .map(|name| {
                let pats = if *name == "numLoadInsts" {
                    vec![pattern.to_string()]
                } else {
                    vec![format!("unmatched.{name}")]
                };
                (name.to_string(), pats)
            })
            .collect();
        StatMapping::new(
            rules,
            vec!["insts.*".to_string()],
            vec!["cycles.*".to_string()],
            DenomAgg::Max,
        )
        .unwrap()
    }

    #[test]
    fn sum_aggregates_across_cores() {
        let dump = dump_of(&[("cpu0.commit.loads", 100.0), ("cpu1.commit.loads", 50.0)]);
        let features = apply_mapping(&dump, &mapping_with("cpu*.commit.loads"));
        assert_eq!(features["numLoadInsts"], Some(150.0));
    }

    #[test]
    fn zero_matches_is_missing_not_zero() {
        let dump = dump_of(&[("cpu0.numInsts", 1000.0)]);
        let features = apply_mapping(&dump, &mapping_with("cpu*.commit.loads"));
        assert_eq!(features["numLoadInsts"], None);
    }

    #[test]
    fn single_star_does_not_cross_dots() {
        let dump = dump_of(&[("a.b", 1.0), ("a.c", 2.0), ("x.b", 5.0)]);
        let features = apply_mapping(&dump, &mapping_with("a.*"));
        assert_eq!(features["numLoadInsts"], Some(3.0));
    }

    #[test]
    fn double_star_crosses_dots() {
        let dump = dump_of(&[("a.b.c", 1.0), ("a.d", 2.0), ("b.c", 4.0)]);
        let features = apply_mapping(&dump, &mapping_with("a.**"));
        assert_eq!(features["numLoadInsts"], Some(3.0));
    }

    #[test]
    fn star_matches_empty_run() {
        let dump = dump_of(&[("system.cpu.loads", 7.0), ("system.cpu3.loads", 1.0)]);
        let features = apply_mapping(&dump, &mapping_with("system.cpu*.loads"));
        assert_eq!(features["numLoadInsts"], Some(8.0));
    }

    #[test]
    fn ipc_uses_max_cycles() {
        let dump = dump_of(&[
            ("insts.cpu0", 800.0),
            ("insts.cpu1", 1200.0),
            ("cycles.cpu0", 1000.0),
            ("cycles.cpu1", 1000.0),
        ]);
        let ipc = extract_target(&dump, &mapping_with("unused")).unwrap();
        assert_eq!(ipc, 2.0);
    }

    #[test]
    fn zero_numerator_is_zero_ipc() {
        let dump = dump_of(&[("insts.cpu0", 0.0), ("cycles.cpu0", 1000.0)]);
        assert_eq!(extract_target(&dump, &mapping_with("unused")).unwrap(), 0.0);
    }

    #[test]
    fn missing_cycles_is_an_error() {
        let dump = dump_of(&[("insts.cpu0", 100.0)]);
        assert!(extract_target(&dump, &mapping_with("unused")).is_err());
    }

    #[test]
    fn zero_cycles_is_an_error() {
        let dump = dump_of(&[("insts.cpu0", 100.0), ("cycles.cpu0", 0.0)]);
        assert!(extract_target(&dump, &mapping_with("unused")).is_err());
    }

    #[test]
    fn mean_aggregation_override() {
        let mut m = mapping_with("unused");
        m.target.denominator_agg = DenomAgg::Mean;
        let dump = dump_of(&[
            ("insts.cpu0", 900.0),
            ("cycles.cpu0", 800.0),
            ("cycles.cpu1", 1000.0),
        ]);
        assert_eq!(extract_target(&dump, &m).unwrap(), 1.0);
    }

    #[test]
    fn default_mapping_handles_modern_o3_names() {
        let mapping = StatMapping::default_gem5();
        let mut pairs = Vec::new();
        for core in 0..2 {
            pairs.push((format!("system.cpu{core}.commitStats0.numLoadInsts"), 10.0));
            pairs.push((format!("system.cpu{core}.commitStats0.numStoreInsts"), 5.0));
            pairs.push((format!("system.cpu{core}.commitStats0.numInsts"), 100.0));
            pairs.push((format!("system.cpu{core}.commitStats0.numBranches"), 8.0));
            pairs.push((format!("system.cpu{core}.commitStats0.numOps"), 120.0));
            pairs.push((format!("system.cpu{core}.baseStats.numCycles"), 400.0));
        }
        let mut dump = StatsDump::new(0);
        for (k, v) in pairs {
            dump.values.insert(k, v);
        }
        let features = apply_mapping(&dump, &mapping);
        assert_eq!(features["numLoadInsts"], Some(20.0));
        assert_eq!(features["numInsts"], Some(200.0));
        assert_eq!(extract_target(&dump, &mapping).unwrap(), 0.5);
    }

    #[test]
    fn mapping_missing_a_count_feature_is_invalid() {
        let err = StatMapping::new(
            vec![("numLoadInsts".to_string(), vec!["a".to_string()])],
            vec!["n".to_string()],
            vec!["d".to_string()],
            DenomAgg::Max,
        )
        .unwrap_err();
        assert!(err.to_string().contains("has no rule"));
    }

    #[test]
    fn mapping_document_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mapping.json");
        let mapping = StatMapping::default_gem5();
        mapping.save(&path).unwrap();
        let loaded = StatMapping::load(&path).unwrap();
        assert_eq!(loaded.features.len(), 5);
        assert_eq!(loaded.target.denominator_agg, DenomAgg::Max);
        assert_eq!(loaded.features[0].patterns, mapping.features[0].patterns);
    }
}
