//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the induction or evaluation code it checks; the
//! crisp oracle works on integer counts and the formula oracles are written
//! as plain double loops.

#![allow(dead_code, clippy::needless_range_loop)]

use fuzzy_effort::evaluation::PredictionPair;
use fuzzy_effort::induction::{Attribute, FuzzifiedExample, NodeKind, TreeNode, TreeSchema};
use fuzzy_effort::{FuzzyPartition, TNormKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A categorical dataset: `rows[i][a]` is the value index of attribute `a`.
#[derive(Debug, Clone)]
pub struct CrispCase {
    pub arities: Vec<usize>,
    pub classes: usize,
    pub rows: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
}

impl CrispCase {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let attrs = rng.random_range(1..=6);
        let arities: Vec<usize> = (0..attrs).map(|_| rng.random_range(2..=4)).collect();
        let classes = rng.random_range(2..=4);
        let n = rng.random_range(1..=40);
        let rows = (0..n)
            .map(|_| arities.iter().map(|&k| rng.random_range(0..k)).collect())
            .collect();
        // skewed labels give a mix of pure and mixed nodes
        let labels = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                ((u * u * classes as f64) as usize).min(classes - 1)
            })
            .collect();
        Self {
            arities,
            classes,
            rows,
            labels,
        }
    }

    pub fn schema(&self) -> TreeSchema {
        let attributes = self
            .arities
            .iter()
            .enumerate()
            .map(|(a, &k)| {
                let values: Vec<String> = (0..k).map(|v| format!("v{v}")).collect();
                let refs: Vec<&str> = values.iter().map(String::as_str).collect();
                Attribute::nominal(format!("a{a}"), &refs)
            })
            .collect();
        TreeSchema {
            attributes,
            classes: FuzzyPartition::uniform(self.classes).unwrap(),
        }
    }

    pub fn examples(&self) -> Vec<FuzzifiedExample> {
        self.rows
            .iter()
            .zip(&self.labels)
            .map(|(row, &y)| FuzzifiedExample {
                memberships: row.iter().zip(&self.arities).map(|(&v, &k)| one_hot(v, k)).collect(),
                classes: one_hot(y, self.classes),
            })
            .collect()
    }

    pub fn inputs(&self, row: usize) -> Vec<Vec<f64>> {
        self.examples()[row].memberships.clone()
    }
}

pub fn one_hot(i: usize, n: usize) -> Vec<f64> {
    (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
}

/// Textbook ID3 over counts.
#[derive(Debug, Clone)]
pub struct OracleNode {
    pub counts: Vec<usize>,
    pub split: Option<(usize, Vec<(usize, OracleNode)>)>,
}

impl OracleNode {
    pub fn size(&self) -> usize {
        1 + self
            .split
            .as_ref()
            .map_or(0, |(_, ch)| ch.iter().map(|(_, c)| c.size()).sum())
    }

    pub fn majority(&self) -> usize {
        let best = *self.counts.iter().max().unwrap();
        self.counts.iter().position(|c| *c == best).unwrap()
    }

    /// Class predicted for a row, following its value at every split.
    pub fn classify(&self, row: &[usize]) -> usize {
        match &self.split {
            None => self.majority(),
            Some((a, children)) => match children.iter().find(|(v, _)| *v == row[*a]) {
                Some((_, child)) => child.classify(row),
                None => self.majority(),
            },
        }
    }
}

fn count_entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

pub fn id3(case: &CrispCase) -> OracleNode {
    let all: Vec<usize> = (0..case.rows.len()).collect();
    let mut used = vec![false; case.arities.len()];
    id3_node(case, &all, &mut used)
}

fn id3_node(case: &CrispCase, rows: &[usize], used: &mut Vec<bool>) -> OracleNode {
    let mut counts = vec![0; case.classes];
    for &r in rows {
        counts[case.labels[r]] += 1;
    }
    let pure = counts.contains(&rows.len());
    if pure || used.iter().all(|u| *u) {
        return OracleNode { counts, split: None };
    }
    let h = count_entropy(&counts);
    let mut gains = Vec::new();
    for a in 0..case.arities.len() {
        if used[a] {
            continue;
        }
        let mut remainder = 0.0;
        for v in 0..case.arities[a] {
            let mut sub = vec![0; case.classes];
            for &r in rows {
                if case.rows[r][a] == v {
                    sub[case.labels[r]] += 1;
                }
            }
            let nv: usize = sub.iter().sum();
            if nv > 0 {
                remainder += nv as f64 / rows.len() as f64 * count_entropy(&sub);
            }
        }
        gains.push((a, h - remainder));
    }
    let best = gains.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    let attr = gains.iter().find(|g| g.1 >= best - 1e-12).unwrap().0;

    used[attr] = true;
    let mut children = Vec::new();
    for v in 0..case.arities[attr] {
        let sub: Vec<usize> = rows.iter().copied().filter(|&r| case.rows[r][attr] == v).collect();
        if !sub.is_empty() {
            children.push((v, id3_node(case, &sub, used)));
        }
    }
    used[attr] = false;
    OracleNode {
        counts,
        split: Some((attr, children)),
    }
}

/// Exact structural comparison between a grown tree and the oracle.
pub fn compare_crisp(node: &TreeNode, oracle: &OracleNode) -> Result<(), String> {
    let n: usize = oracle.counts.iter().sum();
    if node.mass != n as f64 {
        return Err(format!("node {}: mass {} vs {n} rows", node.id, node.mass));
    }
    let expected: Vec<f64> = oracle.counts.iter().map(|c| *c as f64 / n as f64).collect();
    if node.proportions != expected {
        return Err(format!(
            "node {}: proportions {:?} vs {expected:?}",
            node.id, node.proportions
        ));
    }
    match (&node.kind, &oracle.split) {
        (NodeKind::Leaf(_), None) => Ok(()),
        (NodeKind::Split { attribute, children }, Some((a, expected))) => {
            if attribute != a {
                return Err(format!("node {}: split on {attribute}, oracle splits on {a}", node.id));
            }
            if children.len() != expected.len() {
                return Err(format!(
                    "node {}: {} children vs {}",
                    node.id,
                    children.len(),
                    expected.len()
                ));
            }
            for (b, (v, o)) in children.iter().zip(expected) {
                if b.index != *v {
                    return Err(format!("node {}: branch {} vs {v}", node.id, b.index));
                }
                compare_crisp(&b.node, o)?;
            }
            Ok(())
        }
        _ => Err(format!("node {}: leaf/split mismatch with oracle", node.id)),
    }
}

/// First index of the largest value.
pub fn argmax(values: &[f64]) -> usize {
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|v| *v == best).unwrap()
}

/// A random fuzzified node: examples, node memberships and an attribute
/// count. Memberships are arbitrary values in [0, 1]; about a fifth of the
/// node memberships are zero.
pub struct FormulaCase {
    pub examples: Vec<FuzzifiedExample>,
    pub node: Vec<f64>,
    pub attributes: usize,
}

impl FormulaCase {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=25);
        let attributes = rng.random_range(1..=5);
        let arities: Vec<usize> = (0..attributes).map(|_| rng.random_range(2..=6)).collect();
        let k = rng.random_range(2..=8);
        let mut examples = Vec::with_capacity(n);
        let mut node = Vec::with_capacity(n);
        for _ in 0..n {
            let memberships = arities
                .iter()
                .map(|&b| (0..b).map(|_| rng.random::<f64>()).collect())
                .collect();
            let classes = (0..k).map(|_| rng.random::<f64>()).collect();
            examples.push(FuzzifiedExample { memberships, classes });
            node.push(if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() });
        }
        // keep at least one member so the node has mass
        if node.iter().all(|m| *m == 0.0) {
            node[0] = 0.5;
        }
        Self {
            examples,
            node,
            attributes,
        }
    }
}

fn t(kind: TNormKind, a: f64, b: f64) -> f64 {
    match kind {
        TNormKind::Product => a * b,
        TNormKind::Minimum => a.min(b),
    }
}

pub fn brute_proportions(ex: &[FuzzifiedExample], node: &[f64], kind: TNormKind) -> Vec<f64> {
    let k = ex[0].classes.len();
    let mut denom = 0.0;
    for c in 0..k {
        for i in 0..ex.len() {
            denom += t(kind, ex[i].classes[c], node[i]);
        }
    }
    let mut p = vec![0.0; k];
    for c in 0..k {
        let mut num = 0.0;
        for i in 0..ex.len() {
            num += t(kind, ex[i].classes[c], node[i]);
        }
        p[c] = num / denom;
    }
    p
}

pub fn brute_entropy(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v != 0.0 {
            h += -v * v.ln() / std::f64::consts::LN_2;
        }
    }
    h
}

pub fn brute_gain(ex: &[FuzzifiedExample], node: &[f64], attribute: usize, kind: TNormKind) -> f64 {
    let parent = brute_entropy(&brute_proportions(ex, node, kind));
    let branches = ex[0].memberships[attribute].len();
    let mut masses = vec![0.0; branches];
    let mut entropies = vec![0.0; branches];
    for l in 0..branches {
        let child: Vec<f64> = (0..ex.len())
            .map(|i| t(kind, node[i], ex[i].memberships[attribute][l]))
            .collect();
        masses[l] = child.iter().sum();
        let class_mass: f64 = (0..ex.len())
            .map(|i| ex[i].classes.iter().map(|u| t(kind, *u, child[i])).sum::<f64>())
            .sum();
        if class_mass > 0.0 {
            entropies[l] = brute_entropy(&brute_proportions(ex, &child, kind));
        }
    }
    let total: f64 = masses.iter().sum();
    let mut weighted = 0.0;
    for l in 0..branches {
        if total > 0.0 {
            weighted += masses[l] / total * entropies[l];
        }
    }
    parent - weighted
}

/// MMRE in percent, written out longhand.
pub fn oracle_mmre(pairs: &[PredictionPair]) -> f64 {
    let mut sum = 0.0;
    for p in pairs {
        sum += (p.actual - p.estimated).abs() / p.actual;
    }
    sum / pairs.len() as f64 * 100.0
}

/// Pred(level) in percent.
pub fn oracle_pred(pairs: &[PredictionPair], level: f64) -> f64 {
    let mut hits = 0usize;
    for p in pairs {
        if (p.actual - p.estimated).abs() / p.actual <= level / 100.0 {
            hits += 1;
        }
    }
    100.0 * hits as f64 / pairs.len() as f64
}

pub fn random_pairs(seed: u64) -> Vec<PredictionPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=60);
    (0..n)
        .map(|i| {
            let actual = rng.random_range(10.0..50_000.0);
            let estimated = actual * rng.random_range(0.0..2.5);
            PredictionPair::new(format!("p{i}"), actual, estimated)
        })
        .collect()
}

/// A consistent crisp training set for the effort schema: every feature
/// sits at the core midpoint of one fuzzy set, and each distinct input
/// combination always maps to the same effort class, whose effort is placed
/// exactly on that class's centroid. Hours are `scale * effort`.
pub fn memorization_case(
    seed: u64,
    rows: usize,
    config: &fuzzy_effort::GrowthConfig,
    scale: f64,
) -> (
    Vec<fuzzy_effort::dataset::NormalizedRecord>,
    fuzzy_effort::NormalizationParams,
) {
    use fuzzy_effort::dataset::{NormalizedRecord, Platform, ValueRange};
    use std::collections::HashMap;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let partitions: Vec<FuzzyPartition> = config
        .feature_sets
        .as_array()
        .iter()
        .map(|n| FuzzyPartition::uniform(*n).unwrap())
        .collect();
    let classes = FuzzyPartition::uniform(config.effort_classes).unwrap();
    let centroids = classes.centroids();
    let mut label_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut records = Vec::with_capacity(rows);
    for i in 0..rows {
        // only a few sets per feature so combinations repeat
        let mut combo: Vec<usize> = partitions.iter().map(|p| rng.random_range(0..p.len().min(3))).collect();
        combo.push(rng.random_range(0..Platform::ALL.len()));
        let k = config.effort_classes;
        let class = *label_of.entry(combo.clone()).or_insert_with(|| rng.random_range(0..k));
        let features: [f64; 5] = std::array::from_fn(|a| partitions[a].sets()[combo[a]].core_midpoint());
        let effort = centroids[class];
        records.push(NormalizedRecord {
            project_id: format!("m{i}"),
            features,
            platform: Platform::ALL[combo[5]],
            effort,
            effort_hours: effort * scale,
        });
    }
    let unit = ValueRange::new(0.0, 1.0).unwrap();
    let params = fuzzy_effort::NormalizationParams {
        features: [unit; 5],
        effort: ValueRange::new(0.0, scale).unwrap(),
    };
    (records, params)
}
