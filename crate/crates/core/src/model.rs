//! A trained effort estimator: a fuzzy tree together with the normalization
//! parameters of its training set, plus its text file format.

use std::fmt::Write as _;

use crate::dataset::{Feature, NormalizationParams, NormalizedRecord, Platform, ProjectRecord, ValueRange};
use crate::induction::{
    effort_inputs, effort_schema, fuzzify_training_set, grow_tree, FeatureSetCounts, FuzzyTree, GrowthConfig,
};
use crate::inference::{infer, weighted_centroid, ClassActivation, InferenceMode};
use crate::Error;

const MAGIC: &str = "# fuzzy-effort model v1";

#[derive(Debug, Clone, PartialEq)]
pub struct EffortModel {
    pub tree: FuzzyTree,
    pub params: NormalizationParams,
}

/// Effort estimate for one project with the activation behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub hours: f64,
    pub activation: ClassActivation,
}

/// Fuzzifies a normalized training set under `config` and grows the tree.
pub fn train_effort_model(
    train: &[NormalizedRecord],
    params: NormalizationParams,
    config: &GrowthConfig,
) -> Result<EffortModel, Error> {
    let schema = effort_schema(config)?;
    let examples = fuzzify_training_set(train, &schema)?;
    let tree = grow_tree(&examples, &schema, config)?;
    Ok(EffortModel { tree, params })
}

impl EffortModel {
    /// Prediction from already-normalized inputs.
    pub fn predict_normalized(
        &self,
        features: &[f64; 5],
        platform: Platform,
        mode: InferenceMode,
    ) -> Result<Prediction, Error> {
        let inputs = self.tree.schema.fuzzify_inputs(&effort_inputs(features, platform))?;
        let activation = infer(&self.tree, &inputs, mode)?;
        let normalized = weighted_centroid(&activation.values, &self.tree.schema.classes.centroids())?;
        Ok(Prediction {
            hours: self.params.effort.denormalize(normalized),
            activation,
        })
    }

    /// Normalizes (and clamps) a raw record, then predicts. Every input
    /// feature must be present.
    pub fn predict(&self, record: &ProjectRecord, mode: InferenceMode) -> Result<Prediction, Error> {
        let (features, platform) = self.params.normalize_features(record)?;
        self.predict_normalized(&features, platform, mode)
    }

    pub fn to_text(&self) -> String {
        let cfg = &self.tree.config;
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "tnorm {}", cfg.tnorm);
        let _ = writeln!(out, "fuzziness_threshold {}", cfg.fuzziness_threshold);
        let _ = writeln!(out, "leaf_decision_threshold {}", cfg.leaf_decision_threshold);
        let _ = writeln!(out, "min_information_gain {}", cfg.min_information_gain);
        let counts: Vec<String> = cfg.feature_sets.as_array().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "feature_sets {}", counts.join(" "));
        let _ = writeln!(out, "effort_classes {}", cfg.effort_classes);
        for (f, r) in Feature::NUMERIC.iter().zip(&self.params.features) {
            let _ = writeln!(out, "range {} {} {}", f.name(), r.min, r.max);
        }
        let _ = writeln!(
            out,
            "range work_effort {} {}",
            self.params.effort.min, self.params.effort.max
        );
        out.push_str("tree\n");
        out.push_str(&self.tree.to_text());
        out
    }

    pub fn from_text(text: &str) -> Result<Self, Error> {
        let bad = |line: usize, reason: String| Error::ModelFormat { line, reason };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(bad(1, format!("missing header {MAGIC:?}"))),
        }

        let mut cfg = GrowthConfig::default();
        let mut ranges: [Option<ValueRange>; 6] = [None; 6];
        let mut tree_start = None;
        for (no, line) in lines.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line == "tree" {
                tree_start = Some(no);
                break;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let one = || -> Result<&str, Error> {
                match rest[..] {
                    [v] => Ok(v),
                    _ => Err(bad(no, format!("{key} takes one value"))),
                }
            };
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(no, format!("bad number {v:?}")));
            match key {
                "tnorm" => cfg.tnorm = one()?.parse()?,
                "fuzziness_threshold" => cfg.fuzziness_threshold = num(one()?)?,
                "leaf_decision_threshold" => cfg.leaf_decision_threshold = num(one()?)?,
                "min_information_gain" => cfg.min_information_gain = num(one()?)?,
                "effort_classes" => {
                    cfg.effort_classes = one()?.parse().map_err(|_| bad(no, "bad class count".into()))?
                }
                "feature_sets" => {
                    let counts: Vec<usize> = rest
                        .iter()
                        .map(|v| v.parse())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad(no, "bad fuzzy-set count".into()))?;
                    let counts: [usize; 5] = counts
                        .try_into()
                        .map_err(|_| bad(no, "feature_sets takes five counts".into()))?;
                    cfg.feature_sets = FeatureSetCounts::from_array(counts);
                }
                "range" => {
                    let [name, min, max] = rest[..] else {
                        return Err(bad(no, "range takes a column name, min and max".into()));
                    };
                    let slot = Feature::NUMERIC
                        .iter()
                        .position(|f| f.name() == name)
                        .or((name == "work_effort").then_some(5))
                        .ok_or_else(|| bad(no, format!("unknown column {name:?}")))?;
                    ranges[slot] = Some(
                        ValueRange::new(num(min)?, num(max)?)
                            .ok_or_else(|| bad(no, "range needs finite min <= max".into()))?,
                    );
                }
                other => return Err(bad(no, format!("unknown key {other:?}"))),
            }
        }
        let tree_start = tree_start.ok_or_else(|| bad(0, "missing `tree` section".into()))?;
        let mut params = [ValueRange { min: 0.0, max: 0.0 }; 6];
        for (i, r) in ranges.iter().enumerate() {
            params[i] = r.ok_or_else(|| bad(0, format!("missing range #{}", i + 1)))?;
        }
        cfg.validate()?;

        let body: Vec<&str> = lines.map(|(_, l)| l).collect();
        let schema = effort_schema(&cfg)?;
        let tree = FuzzyTree::from_text(&body.join("\n"), schema, cfg).map_err(|e| match e {
            crate::induction::InductionError::Parse { line, reason } => bad(line + tree_start, reason),
            other => other.into(),
        })?;
        Ok(EffortModel {
            tree,
            params: NormalizationParams {
                features: [params[0], params[1], params[2], params[3], params[4]],
                effort: params[5],
            },
        })
    }
}

/// Estimated hours for a raw project record.
pub fn predict_effort(model: &EffortModel, record: &ProjectRecord, mode: InferenceMode) -> Result<f64, Error> {
    Ok(model.predict(record, mode)?.hours)
}
