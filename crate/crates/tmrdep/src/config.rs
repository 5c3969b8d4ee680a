//! TOML analysis configuration.
//!
//! ```toml
//! model_kind = ["scu", "combined"]
//! partitions = [1, 2, 4, 8]          # or: cuts = [["m0", "m1"], ["a1"]]
//! scrub_intervals = ["15min", "1h", "4h"]
//! mission_time = "730h"
//! lambda_bit = "7.31e-12/s"
//! lambda_voter = "5e-3/h"
//! alpha_scu = 0.99
//! alpha_dcu = 0.01
//! outputs = ["reliability", "availability", "steady_state"]
//! seed = 7
//! simulate_trials = 0
//! ```
//!
//! Relative `dfg` and `library` paths are resolved against the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tmrdep_core::composed::StateLabel;
use tmrdep_core::engine::DEFAULT_EPSILON;
use tmrdep_core::{ModelKind, RateParams};

use crate::error::{read_file, Error, Result};
use crate::units::{parse_duration, parse_rate};

pub fn parse_model_kind(text: &str) -> Result<ModelKind> {
    match text {
        "scu" | "scu_only" => Ok(ModelKind::ScuOnly),
        "combined" => Ok(ModelKind::Combined),
        other => Err(Error::Config(format!(
            "model kind `{other}` is not one of scu, combined"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSpec {
    /// Target partition counts, planned automatically.
    Counts(Vec<usize>),
    /// One explicit plan.
    Cuts(Vec<Vec<String>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub reliability: bool,
    pub availability: bool,
    pub steady_state: bool,
    pub correctness: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            reliability: true,
            availability: true,
            steady_state: true,
            correctness: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub models: Vec<ModelKind>,
    pub partitions: PartitionSpec,
    pub terminal_voter_partition: bool,
    /// Scrub intervals in seconds.
    pub scrub_intervals: Vec<f64>,
    /// Rate parameters; `mu` is replaced per design point.
    pub params: RateParams,
    pub outputs: Outputs,
    /// Label that reliability keeps the chain inside.
    pub reliability_label: StateLabel,
    pub epsilon: f64,
    pub seed: u64,
    /// Zero disables simulated rows.
    pub simulate_trials: u64,
    pub dfg: Option<PathBuf>,
    pub library: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            models: vec![ModelKind::ScuOnly],
            partitions: PartitionSpec::Counts(vec![1]),
            terminal_voter_partition: false,
            scrub_intervals: vec![900.0],
            params: RateParams::default(),
            outputs: Outputs::default(),
            reliability_label: StateLabel::Up,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
            simulate_trials: 0,
            dfg: None,
            library: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RateValue {
    PerSecond(f64),
    Text(String),
}

impl RateValue {
    fn per_second(&self, field: &str) -> Result<f64> {
        match self {
            RateValue::PerSecond(v) => Ok(*v),
            RateValue::Text(t) => parse_rate(t).map_err(|e| Error::Config(format!("{field}: {e}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model_kind: Option<OneOrMany>,
    partitions: Option<Vec<i64>>,
    cuts: Option<Vec<Vec<String>>>,
    terminal_voter_partition: Option<bool>,
    scrub_intervals: Option<Vec<String>>,
    mission_time: Option<String>,
    lambda_bit: Option<RateValue>,
    lambda_voter: Option<RateValue>,
    alpha_scu: Option<f64>,
    alpha_dcu: Option<f64>,
    gamma_same: Option<RateValue>,
    gamma_cross: Option<RateValue>,
    outputs: Option<Vec<String>>,
    reliability_label: Option<String>,
    epsilon: Option<f64>,
    seed: Option<u64>,
    simulate_trials: Option<u64>,
    dfg: Option<PathBuf>,
    library: Option<PathBuf>,
}

impl AnalysisConfig {
    /// Parses TOML text; relative paths stay relative.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = AnalysisConfig::default();
        if let Some(kinds) = raw.model_kind {
            let names = match kinds {
                OneOrMany::One(s) => vec![s],
                OneOrMany::Many(v) => v,
            };
            cfg.models = names.iter().map(|n| parse_model_kind(n)).collect::<Result<_>>()?;
        }
        match (raw.partitions, raw.cuts) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either `partitions` or `cuts`, not both".into()))
            }
            (Some(counts), None) => {
                let counts = counts
                    .into_iter()
                    .map(|n| {
                        usize::try_from(n)
                            .ok()
                            .filter(|&n| n >= 1)
                            .ok_or_else(|| Error::Config(format!("partition count {n} is below 1")))
                    })
                    .collect::<Result<_>>()?;
                cfg.partitions = PartitionSpec::Counts(counts);
            }
            (None, Some(cuts)) => cfg.partitions = PartitionSpec::Cuts(cuts),
            (None, None) => {}
        }
        if let Some(t) = raw.terminal_voter_partition {
            cfg.terminal_voter_partition = t;
        }
        if let Some(list) = raw.scrub_intervals {
            cfg.scrub_intervals = list
                .iter()
                .map(|s| parse_duration(s).map_err(|e| Error::Config(format!("scrub_intervals: {e}"))))
                .collect::<Result<_>>()?;
        }
        if let Some(t) = raw.mission_time {
            cfg.params.mission_time =
                parse_duration(&t).map_err(|e| Error::Config(format!("mission_time: {e}")))?;
        }
        if let Some(v) = raw.lambda_bit {
            cfg.params.lambda_bit = v.per_second("lambda_bit")?;
        }
        if let Some(v) = raw.lambda_voter {
            cfg.params.lambda_voter = v.per_second("lambda_voter")?;
        }
        if let Some(v) = raw.gamma_same {
            cfg.params.gamma_same = Some(v.per_second("gamma_same")?);
        }
        if let Some(v) = raw.gamma_cross {
            cfg.params.gamma_cross = Some(v.per_second("gamma_cross")?);
        }
        match (raw.alpha_scu, raw.alpha_dcu) {
            (Some(s), Some(d)) => (cfg.params.alpha_scu, cfg.params.alpha_dcu) = (s, d),
            (Some(s), None) => (cfg.params.alpha_scu, cfg.params.alpha_dcu) = (s, 1.0 - s),
            (None, Some(d)) => (cfg.params.alpha_scu, cfg.params.alpha_dcu) = (1.0 - d, d),
            (None, None) => {}
        }
        if let Some(outputs) = raw.outputs {
            let mut o = Outputs {
                reliability: false,
                availability: false,
                steady_state: false,
                correctness: false,
            };
            for name in &outputs {
                match name.as_str() {
                    "reliability" => o.reliability = true,
                    "availability" => o.availability = true,
                    "steady_state" => o.steady_state = true,
                    "correctness" => o.correctness = true,
                    other => return Err(Error::Config(format!("unknown output `{other}`"))),
                }
            }
            cfg.outputs = o;
        }
        if let Some(label) = raw.reliability_label {
            cfg.reliability_label = match StateLabel::from_name(&label) {
                Some(l @ (StateLabel::Up | StateLabel::Operational)) => l,
                _ => {
                    return Err(Error::Config(format!(
                        "reliability_label `{label}` must be up or operational"
                    )))
                }
            };
        }
        if let Some(e) = raw.epsilon {
            cfg.epsilon = e;
        }
        if let Some(s) = raw.seed {
            cfg.seed = s;
        }
        if let Some(t) = raw.simulate_trials {
            cfg.simulate_trials = t;
        }
        cfg.dfg = raw.dfg;
        cfg.library = raw.library;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&read_file(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.dfg, &mut cfg.library].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::Config("model_kind list is empty".into()));
        }
        match &self.partitions {
            PartitionSpec::Counts(c) if c.is_empty() => {
                return Err(Error::Config("partitions list is empty".into()))
            }
            PartitionSpec::Counts(c) if c.contains(&0) => {
                return Err(Error::Config("partition count 0 is below 1".into()))
            }
            PartitionSpec::Cuts(c) if c.is_empty() => {
                return Err(Error::Config("cuts list is empty".into()))
            }
            _ => {}
        }
        if self.scrub_intervals.is_empty() {
            return Err(Error::Config("at least one scrub interval is required".into()));
        }
        if let Some(t) = self.scrub_intervals.iter().find(|&&t| !(t > 0.0)) {
            return Err(Error::Config(format!("scrub interval {t}s is not positive")));
        }
        if !(self.params.mission_time > 0.0) {
            return Err(Error::Config("mission_time must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {} must lie in (0, 1)", self.epsilon)));
        }
        let violations = self.params.validate();
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Config(text.join("; ")));
        }
        Ok(())
    }
}
