//! Accuracy metrics and the fuzziness-threshold sweep.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{normalize_minmax, split, Dataset, DEFAULT_TRAIN_FRACTION};
use crate::induction::GrowthConfig;
use crate::inference::InferenceMode;
use crate::model::train_effort_model;

/// MMRE at or below this (percent) is acceptable.
pub const MMRE_ACCEPTABLE: f64 = 25.0;
/// Pred(25) at or above this (percent) is acceptable.
pub const PRED_ACCEPTABLE: f64 = 75.0;
pub const DEFAULT_PRED_LEVEL: f64 = 25.0;

#[derive(Debug, Error, PartialEq)]
pub enum EvaluationError {
    #[error("actual effort must be positive, got {0}")]
    NonPositiveActual(f64),
    #[error("cannot evaluate an empty prediction list")]
    Empty,
    #[error("prediction level must be >= 0, got {0}")]
    NegativeLevel(f64),
    #[error("sweep needs at least one threshold and one class count")]
    EmptySweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionPair {
    pub project_id: String,
    pub actual: f64,
    pub estimated: f64,
}

impl PredictionPair {
    pub fn new(project_id: impl Into<String>, actual: f64, estimated: f64) -> Self {
        Self {
            project_id: project_id.into(),
            actual,
            estimated,
        }
    }
}

/// Magnitude of relative error, `|actual - estimated| / actual`.
pub fn mre(pair: &PredictionPair) -> Result<f64, EvaluationError> {
    if pair.actual.is_nan() || pair.actual <= 0.0 {
        return Err(EvaluationError::NonPositiveActual(pair.actual));
    }
    Ok((pair.actual - pair.estimated).abs() / pair.actual)
}

fn mres(pairs: &[PredictionPair]) -> Result<Vec<f64>, EvaluationError> {
    if pairs.is_empty() {
        return Err(EvaluationError::Empty);
    }
    pairs.iter().map(mre).collect()
}

/// Mean MRE as a percentage.
pub fn mmre(pairs: &[PredictionPair]) -> Result<f64, EvaluationError> {
    let m = mres(pairs)?;
    Ok(m.iter().sum::<f64>() / m.len() as f64 * 100.0)
}

/// Percentage of pairs whose MRE is at most `level` percent.
pub fn pred(pairs: &[PredictionPair], level: f64) -> Result<f64, EvaluationError> {
    if level.is_nan() || level < 0.0 {
        return Err(EvaluationError::NegativeLevel(level));
    }
    let m = mres(pairs)?;
    let limit = level / 100.0;
    let hits = m.iter().filter(|e| **e <= limit).count();
    Ok(100.0 * hits as f64 / m.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Acceptability {
    pub mmre_ok: bool,
    pub pred_ok: bool,
}

pub fn acceptable(mmre_value: f64, pred25_value: f64) -> Acceptability {
    Acceptability {
        mmre_ok: mmre_value <= MMRE_ACCEPTABLE,
        pred_ok: pred25_value >= PRED_ACCEPTABLE,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub thresholds: Vec<f64>,
    pub class_counts: Vec<usize>,
    pub seed: u64,
    pub train_fraction: f64,
    pub mode: InferenceMode,
    /// Everything except the threshold and class count is taken from here.
    pub growth: GrowthConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            thresholds: (1..=9).map(|i| i as f64 / 10.0).collect(),
            class_counts: vec![11, 16],
            seed: 42,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            mode: InferenceMode::ExemplarBased,
            growth: GrowthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub threshold: f64,
    pub effort_classes: usize,
    /// Percent.
    pub mmre: f64,
    /// Percent.
    pub pred25: f64,
    pub node_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
}

pub const REPORT_HEADER: &str = "threshold,effort_classes,mmre,pred25,node_count,seed";

impl EvaluationReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4},{},{}",
                r.threshold, r.effort_classes, r.mmre, r.pred25, r.node_count, r.seed
            );
        }
        out
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.rows.iter().map(|r| r.effort_classes).collect();
        ks.dedup();
        ks
    }

    fn rows_for(&self, k: usize) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.effort_classes == k)
    }

    /// `threshold value` lines for one class count, for plotting tools.
    /// Returns the MMRE series and the Pred(25) series.
    pub fn series(&self, k: usize) -> (String, String) {
        let mut mmre = String::from("# threshold mmre\n");
        let mut pred = String::from("# threshold pred25\n");
        for r in self.rows_for(k) {
            let _ = writeln!(mmre, "{} {:.4}", r.threshold, r.mmre);
            let _ = writeln!(pred, "{} {:.4}", r.threshold, r.pred25);
        }
        (mmre, pred)
    }

    /// True when, for every class count, node counts never shrink as the
    /// threshold grows.
    pub fn node_counts_monotone(&self) -> bool {
        self.class_counts().into_iter().all(|k| {
            let rows: Vec<&ReportRow> = self.rows_for(k).collect();
            rows.windows(2)
                .all(|w| w[0].threshold > w[1].threshold || w[0].node_count <= w[1].node_count)
        })
    }
}

/// Splits once under `cfg.seed`, fits normalization on the training part,
/// then grows and scores one tree per (class count, threshold) cell on the
/// test part. Rows are ordered by class count, then threshold.
pub fn threshold_sweep(ds: &Dataset, cfg: &SweepConfig) -> Result<EvaluationReport, crate::Error> {
    if cfg.thresholds.is_empty() || cfg.class_counts.is_empty() {
        return Err(EvaluationError::EmptySweep.into());
    }
    let (train, test) = split(ds, cfg.train_fraction, cfg.seed)?;
    let (train_n, test_n, params) = normalize_minmax(&train, &test)?;

    let mut cells: Vec<(usize, f64)> = cfg
        .class_counts
        .iter()
        .flat_map(|k| cfg.thresholds.iter().map(move |t| (*k, *t)))
        .collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let rows = cells
        .into_par_iter()
        .map(|(k, t)| {
            let growth = GrowthConfig {
                fuzziness_threshold: t,
                effort_classes: k,
                ..cfg.growth.clone()
            };
            let model = train_effort_model(&train_n, params.clone(), &growth)?;
            let pairs = test_n
                .iter()
                .map(|r| {
                    let p = model.predict_normalized(&r.features, r.platform, cfg.mode)?;
                    Ok(PredictionPair::new(r.project_id.clone(), r.effort_hours, p.hours))
                })
                .collect::<Result<Vec<_>, crate::Error>>()?;
            Ok(ReportRow {
                threshold: t,
                effort_classes: k,
                mmre: mmre(&pairs)?,
                pred25: pred(&pairs, DEFAULT_PRED_LEVEL)?,
                node_count: model.tree.stats().nodes,
                seed: cfg.seed,
            })
        })
        .collect::<Result<Vec<_>, crate::Error>>()?;
    Ok(EvaluationReport { rows })
}
