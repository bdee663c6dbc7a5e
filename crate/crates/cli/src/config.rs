//! Run configuration: a flat `key = value` file, overridden by flags.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Relative paths are taken relative to the working
//! directory. Recognized keys:
//!
//! | key | default |
//! |-----|---------|
//! | `input`, `out`, `tree` | unset |
//! | `seed` | 42 |
//! | `train_fraction` | 74/151 |
//! | `tnorm` | `product` (or `minimum`) |
//! | `mode` | `exemplar` (or `set`) |
//! | `fuzziness_threshold` | 0.4 |
//! | `effort_classes` | 16 |
//! | `leaf_decision_threshold` | 0 |
//! | `min_information_gain` | 1e-6 |
//! | `feature_sets` | `7,11,9,9,9` |
//! | `sweep_thresholds` | `0.1,...,0.9` |
//! | `sweep_classes` | `11,16` |
//! | `synth_count` | 151 |
//! | `synth_noise` | 0.2 |
//! | `synth_missing` | 0.05 (each input feature) |
//! | `synth_missing_effort` | 0 |
//! | `synth_violation_quality`, `synth_violation_resource`, `synth_violation_ufp`, `synth_violation_type` | 0 |

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fuzzy_effort::dataset::{SynthSpec, DEFAULT_TRAIN_FRACTION};
use fuzzy_effort::evaluation::SweepConfig;
use fuzzy_effort::induction::FeatureSetCounts;
use fuzzy_effort::{GrowthConfig, InferenceMode};

use crate::CliError;

pub const KEYS: [&str; 22] = [
    "input",
    "out",
    "tree",
    "seed",
    "train_fraction",
    "tnorm",
    "mode",
    "fuzziness_threshold",
    "effort_classes",
    "leaf_decision_threshold",
    "min_information_gain",
    "feature_sets",
    "sweep_thresholds",
    "sweep_classes",
    "synth_count",
    "synth_noise",
    "synth_missing",
    "synth_missing_effort",
    "synth_violation_quality",
    "synth_violation_resource",
    "synth_violation_ufp",
    "synth_violation_type",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub tree: Option<PathBuf>,
    pub seed: u64,
    pub train_fraction: f64,
    pub mode: InferenceMode,
    pub growth: GrowthConfig,
    pub sweep_thresholds: Vec<f64>,
    pub sweep_classes: Vec<usize>,
    /// `synth.seed` is kept equal to `seed`.
    pub synth: SynthSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        Self {
            input: None,
            out: None,
            tree: None,
            seed: 42,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            mode: InferenceMode::ExemplarBased,
            growth: GrowthConfig::default(),
            sweep_thresholds: sweep.thresholds,
            sweep_classes: sweep.class_counts,
            synth: SynthSpec::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("{key}: cannot parse {value:?}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "input" => self.input = Some(value.into()),
            "out" => self.out = Some(value.into()),
            "tree" => self.tree = Some(value.into()),
            "seed" => self.seed = parse(key, value)?,
            "train_fraction" => self.train_fraction = parse(key, value)?,
            "tnorm" => self.growth.tnorm = value.parse().map_err(|e| format!("{key}: {e}"))?,
            "mode" => self.mode = value.parse().map_err(|e| format!("{key}: {e}"))?,
            "fuzziness_threshold" => self.growth.fuzziness_threshold = parse(key, value)?,
            "effort_classes" => self.growth.effort_classes = parse(key, value)?,
            "leaf_decision_threshold" => self.growth.leaf_decision_threshold = parse(key, value)?,
            "min_information_gain" => self.growth.min_information_gain = parse(key, value)?,
            "feature_sets" => {
                let counts: [usize; 5] = parse_list(key, value)?
                    .try_into()
                    .map_err(|_| format!("{key}: expected five counts"))?;
                self.growth.feature_sets = FeatureSetCounts::from_array(counts);
            }
            "sweep_thresholds" => self.sweep_thresholds = parse_list(key, value)?,
            "sweep_classes" => self.sweep_classes = parse_list(key, value)?,
            "synth_count" => self.synth.count = parse(key, value)?,
            "synth_noise" => self.synth.noise = parse(key, value)?,
            "synth_missing" => {
                let rate: f64 = parse(key, value)?;
                let effort = self.synth.missing.work_effort;
                self.synth.missing = fuzzy_effort::dataset::MissingRates::features(rate);
                self.synth.missing.work_effort = effort;
            }
            "synth_missing_effort" => self.synth.missing.work_effort = parse(key, value)?,
            "synth_violation_quality" => self.synth.violations.data_quality_rating = parse(key, value)?,
            "synth_violation_resource" => self.synth.violations.resource_level = parse(key, value)?,
            "synth_violation_ufp" => self.synth.violations.ufp_rating = parse(key, value)?,
            "synth_violation_type" => self.synth.violations.development_type = parse(key, value)?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", no + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(format!("line {}: duplicate key {key:?}", no + 1));
            }
            cfg.set(key, value).map_err(|e| format!("line {}: {e}", no + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks every setting; run after flags are applied.
    pub fn validate(&mut self) -> Result<(), CliError> {
        self.synth.seed = self.seed;
        let config = |e: String| CliError::Config(e);
        self.growth.validate().map_err(|e| config(e.to_string()))?;
        self.synth.validate().map_err(|e| config(e.to_string()))?;
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(config(format!(
                "train_fraction {} must lie in (0, 1)",
                self.train_fraction
            )));
        }
        if self.sweep_thresholds.is_empty() || self.sweep_classes.is_empty() {
            return Err(config("sweep lists must not be empty".into()));
        }
        for t in &self.sweep_thresholds {
            if !(*t > 0.0 && *t <= 1.0) {
                return Err(config(format!("sweep threshold {t} must lie in (0, 1]")));
            }
        }
        if let Some(k) = self.sweep_classes.iter().find(|k| **k < 2) {
            return Err(config(format!("sweep class count {k} must be >= 2")));
        }
        Ok(())
    }

    pub fn sweep(&self, thresholds: Vec<f64>, class_counts: Vec<usize>) -> SweepConfig {
        SweepConfig {
            thresholds,
            class_counts,
            seed: self.seed,
            train_fraction: self.train_fraction,
            mode: self.mode,
            growth: self.growth.clone(),
        }
    }
}
