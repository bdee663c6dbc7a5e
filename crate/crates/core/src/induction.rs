//! Fuzzy ID3 induction.
//!
//! Examples belong to every node with a degree. A node's class proportions
//! weigh each example's class memberships by its node membership through the
//! chosen t-norm; entropy and information gain are computed from those
//! proportions, and the node is split on the attribute of highest gain.
//! Membership flows to a child as `tnorm(parent, fuzzy_set(x))`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::{Feature, NormalizedRecord, Platform};
use crate::fuzzy::{FuzzyError, FuzzyPartition, TNormKind};

/// Gains within this distance of the best are considered tied; the tie goes
/// to the attribute that comes first in schema order.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum InductionError {
    #[error("invalid growth config: {0}")]
    InvalidConfig(String),
    #[error("cannot grow a tree from an empty example set")]
    NoExamples,
    #[error("node has zero membership mass")]
    ZeroMass,
    #[error("proportion vector has a negative entry {0}")]
    NegativeProportion(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown value {value:?} for nominal attribute {attribute}")]
    UnknownNominal { attribute: String, value: String },
    #[error("tree text line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

/// Fuzzy-set counts per continuous feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSetCounts {
    pub function_points: usize,
    pub max_team_size: usize,
    pub ub_business_units: usize,
    pub ub_locations: usize,
    pub ub_concurrent_users: usize,
}

impl Default for FeatureSetCounts {
    fn default() -> Self {
        Self {
            function_points: 7,
            max_team_size: 11,
            ub_business_units: 9,
            ub_locations: 9,
            ub_concurrent_users: 9,
        }
    }
}

impl FeatureSetCounts {
    /// Counts in [`Feature::NUMERIC`] order.
    pub fn as_array(&self) -> [usize; 5] {
        [
            self.function_points,
            self.max_team_size,
            self.ub_business_units,
            self.ub_locations,
            self.ub_concurrent_users,
        ]
    }

    pub fn from_array(a: [usize; 5]) -> Self {
        Self {
            function_points: a[0],
            max_team_size: a[1],
            ub_business_units: a[2],
            ub_locations: a[3],
            ub_concurrent_users: a[4],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    pub tnorm: TNormKind,
    /// A node becomes a leaf once its largest class proportion reaches this.
    pub fuzziness_threshold: f64,
    /// A node becomes a leaf when its membership mass is below this.
    pub leaf_decision_threshold: f64,
    /// A node becomes a leaf when the best gain is below this; 0 disables
    /// the rule.
    pub min_information_gain: f64,
    pub feature_sets: FeatureSetCounts,
    pub effort_classes: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            tnorm: TNormKind::Product,
            fuzziness_threshold: 0.4,
            leaf_decision_threshold: 0.0,
            min_information_gain: 1e-6,
            feature_sets: FeatureSetCounts::default(),
            effort_classes: 16,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<(), InductionError> {
        let bad = |m: String| Err(InductionError::InvalidConfig(m));
        let t = self.fuzziness_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return bad(format!("fuzziness control threshold {t} must lie in (0, 1]"));
        }
        if !(self.leaf_decision_threshold >= 0.0 && self.leaf_decision_threshold.is_finite()) {
            return bad(format!(
                "leaf decision threshold {} must be >= 0",
                self.leaf_decision_threshold
            ));
        }
        if !(self.min_information_gain >= 0.0 && self.min_information_gain.is_finite()) {
            return bad(format!("minimum gain {} must be >= 0", self.min_information_gain));
        }
        if self.feature_sets.as_array().contains(&0) {
            return bad("every feature needs at least one fuzzy set".into());
        }
        if self.effort_classes < 2 {
            return bad(format!("effort class count {} must be >= 2", self.effort_classes));
        }
        Ok(())
    }
}

/// How an attribute's value is turned into branch memberships.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeDomain {
    /// One branch per fuzzy set.
    Fuzzy(FuzzyPartition),
    /// One crisp branch per value.
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub domain: AttributeDomain,
}

/// A raw attribute value prior to fuzzification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttributeValue<'a> {
    Numeric(f64),
    Nominal(&'a str),
}

impl Attribute {
    pub fn fuzzy(name: impl Into<String>, partition: FuzzyPartition) -> Self {
        Self {
            name: name.into(),
            domain: AttributeDomain::Fuzzy(partition),
        }
    }

    pub fn nominal(name: impl Into<String>, values: &[&str]) -> Self {
        Self {
            name: name.into(),
            domain: AttributeDomain::Nominal(values.iter().map(|v| v.to_string()).collect()),
        }
    }

    pub fn branch_count(&self) -> usize {
        match &self.domain {
            AttributeDomain::Fuzzy(p) => p.len(),
            AttributeDomain::Nominal(v) => v.len(),
        }
    }

    pub fn branch_label(&self, i: usize) -> &str {
        match &self.domain {
            AttributeDomain::Fuzzy(p) => p.sets()[i].label(),
            AttributeDomain::Nominal(v) => &v[i],
        }
    }

    pub fn fuzzify(&self, value: AttributeValue<'_>) -> Result<Vec<f64>, InductionError> {
        match (&self.domain, value) {
            (AttributeDomain::Fuzzy(p), AttributeValue::Numeric(x)) => Ok(p.fuzzify(x)),
            (AttributeDomain::Nominal(values), AttributeValue::Nominal(v)) => {
                match values.iter().position(|known| known == v) {
                    Some(hit) => Ok((0..values.len()).map(|i| if i == hit { 1.0 } else { 0.0 }).collect()),
                    None => Err(InductionError::UnknownNominal {
                        attribute: self.name.clone(),
                        value: v.to_string(),
                    }),
                }
            }
            _ => Err(InductionError::Shape(format!(
                "value kind does not match attribute {}",
                self.name
            ))),
        }
    }
}

/// Input attributes plus the fuzzy partition of the class variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSchema {
    pub attributes: Vec<Attribute>,
    pub classes: FuzzyPartition,
}

impl TreeSchema {
    /// Fuzzifies one input vector, one value per attribute.
    pub fn fuzzify_inputs(&self, values: &[AttributeValue<'_>]) -> Result<Vec<Vec<f64>>, InductionError> {
        if values.len() != self.attributes.len() {
            return Err(InductionError::Shape(format!(
                "expected {} attribute values, got {}",
                self.attributes.len(),
                values.len()
            )));
        }
        self.attributes.iter().zip(values).map(|(a, v)| a.fuzzify(*v)).collect()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

/// The effort-estimation schema: five continuous features with uniform
/// partitions, the nominal platform, and `effort_classes` effort sets.
pub fn effort_schema(config: &GrowthConfig) -> Result<TreeSchema, InductionError> {
    config.validate()?;
    let mut attributes = Feature::NUMERIC
        .iter()
        .zip(config.feature_sets.as_array())
        .map(|(f, n)| Ok(Attribute::fuzzy(f.name(), FuzzyPartition::uniform(n)?)))
        .collect::<Result<Vec<_>, InductionError>>()?;
    let platforms: Vec<&str> = Platform::ALL.iter().map(|p| p.as_str()).collect();
    attributes.push(Attribute::nominal(Feature::DevelopmentPlatform.name(), &platforms));
    Ok(TreeSchema {
        attributes,
        classes: FuzzyPartition::uniform(config.effort_classes)?,
    })
}

/// Attribute values of a normalized record in effort-schema order.
pub fn effort_inputs(features: &[f64; 5], platform: Platform) -> [AttributeValue<'static>; 6] {
    [
        AttributeValue::Numeric(features[0]),
        AttributeValue::Numeric(features[1]),
        AttributeValue::Numeric(features[2]),
        AttributeValue::Numeric(features[3]),
        AttributeValue::Numeric(features[4]),
        AttributeValue::Nominal(platform.as_str()),
    ]
}

/// An example after fuzzification: branch memberships per attribute and
/// memberships in each class.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzifiedExample {
    pub memberships: Vec<Vec<f64>>,
    pub classes: Vec<f64>,
}

pub fn fuzzify_training_set(
    train: &[NormalizedRecord],
    schema: &TreeSchema,
) -> Result<Vec<FuzzifiedExample>, InductionError> {
    train
        .iter()
        .map(|r| {
            Ok(FuzzifiedExample {
                memberships: schema.fuzzify_inputs(&effort_inputs(&r.features, r.platform))?,
                classes: schema.classes.fuzzify(r.effort),
            })
        })
        .collect()
}

/// Nonzero node memberships as `(example index, degree)`.
type Members = Vec<(usize, f64)>;

fn sparse(node_memberships: &[f64]) -> Members {
    node_memberships
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(i, m)| (i, *m))
        .collect()
}

fn proportions_of(examples: &[FuzzifiedExample], members: &[(usize, f64)], tnorm: TNormKind) -> Option<Vec<f64>> {
    let k = examples.first()?.classes.len();
    let mut weight = vec![0.0; k];
    for &(i, mu) in members {
        for (w, u) in weight.iter_mut().zip(&examples[i].classes) {
            *w += tnorm.combine(*u, mu);
        }
    }
    let total: f64 = weight.iter().sum();
    if total <= 0.0 {
        return None;
    }
    weight.iter_mut().for_each(|w| *w /= total);
    Some(weight)
}

fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().filter(|v| **v > 0.0).map(|v| v * v.log2()).sum::<f64>()
}

/// Class proportions at a node: `p_k = Σ_i t(u_k(y_i), μ_i) / Σ_c Σ_i t(u_c(y_i), μ_i)`.
pub fn class_proportions(
    examples: &[FuzzifiedExample],
    node_memberships: &[f64],
    tnorm: TNormKind,
) -> Result<Vec<f64>, InductionError> {
    if node_memberships.len() != examples.len() {
        return Err(InductionError::Shape(format!(
            "{} node memberships for {} examples",
            node_memberships.len(),
            examples.len()
        )));
    }
    proportions_of(examples, &sparse(node_memberships), tnorm).ok_or(InductionError::ZeroMass)
}

/// Base-2 entropy of a proportion vector, with `0 log 0 = 0`.
pub fn fuzzy_entropy(p: &[f64]) -> Result<f64, InductionError> {
    if let Some(neg) = p.iter().find(|v| **v < 0.0 || v.is_nan()) {
        return Err(InductionError::NegativeProportion(*neg));
    }
    Ok(entropy_of(p))
}

struct SplitCandidate {
    gain: f64,
    children: Vec<Members>,
}

fn evaluate_split(
    examples: &[FuzzifiedExample],
    members: &[(usize, f64)],
    attribute: usize,
    tnorm: TNormKind,
    parent_entropy: f64,
) -> SplitCandidate {
    let branches = examples[members[0].0].memberships[attribute].len();
    let children: Vec<Members> = (0..branches)
        .map(|l| {
            members
                .iter()
                .map(|&(i, mu)| (i, tnorm.combine(mu, examples[i].memberships[attribute][l])))
                .filter(|(_, m)| *m > 0.0)
                .collect()
        })
        .collect();
    let masses: Vec<f64> = children.iter().map(|c| c.iter().map(|(_, m)| m).sum()).collect();
    let total: f64 = masses.iter().sum();
    let mut weighted = 0.0;
    if total > 0.0 {
        for (child, mass) in children.iter().zip(&masses) {
            if let Some(p) = proportions_of(examples, child, tnorm) {
                weighted += mass / total * entropy_of(&p);
            }
        }
    }
    SplitCandidate {
        gain: parent_entropy - weighted,
        children,
    }
}

/// Information gain of splitting a node on `attribute`, with child weights
/// proportional to child membership mass.
pub fn information_gain(
    examples: &[FuzzifiedExample],
    node_memberships: &[f64],
    attribute: usize,
    tnorm: TNormKind,
) -> Result<f64, InductionError> {
    let p = class_proportions(examples, node_memberships, tnorm)?;
    if examples.iter().any(|e| attribute >= e.memberships.len()) {
        return Err(InductionError::Shape(format!("attribute {attribute} out of range")));
    }
    let members = sparse(node_memberships);
    Ok(evaluate_split(examples, &members, attribute, tnorm, entropy_of(&p)).gain)
}

/// Why a node was not expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StopCriterion {
    /// The largest class proportion reached the fuzziness control threshold.
    Threshold,
    /// Every attribute was already used on the path.
    AttributesExhausted,
    /// Membership mass fell below the leaf decision threshold.
    LowMass,
    /// No split gains at least the minimum information gain.
    LowGain,
}

impl StopCriterion {
    pub const ALL: [StopCriterion; 4] = [
        StopCriterion::Threshold,
        StopCriterion::AttributesExhausted,
        StopCriterion::LowMass,
        StopCriterion::LowGain,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            StopCriterion::Threshold => "threshold",
            StopCriterion::AttributesExhausted => "exhausted",
            StopCriterion::LowMass => "low-mass",
            StopCriterion::LowGain => "low-gain",
        }
    }
}

impl fmt::Display for StopCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StopCriterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| format!("unknown stop criterion {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// Preorder index.
    pub id: usize,
    pub depth: usize,
    /// Sum of example memberships at this node.
    pub mass: f64,
    pub proportions: Vec<f64>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Leaf(StopCriterion),
    /// Children with zero mass are pruned, so `children` may skip branches.
    Split {
        attribute: usize,
        children: Vec<Branch>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Fuzzy set (or nominal value) index of the split attribute.
    pub index: usize,
    pub node: TreeNode,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }

    pub fn children(&self) -> &[Branch] {
        match &self.kind {
            NodeKind::Leaf(_) => &[],
            NodeKind::Split { children, .. } => children,
        }
    }

    /// Preorder traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a TreeNode)) {
        visit(self);
        for b in self.children() {
            b.node.walk(visit);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyTree {
    pub root: TreeNode,
    pub config: GrowthConfig,
    pub schema: TreeSchema,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub max_depth: usize,
    pub criteria: BTreeMap<StopCriterion, usize>,
}

impl TreeStats {
    pub fn internal(&self) -> usize {
        self.nodes - self.leaves
    }
}

struct Grower<'a> {
    examples: &'a [FuzzifiedExample],
    config: &'a GrowthConfig,
    attributes: usize,
    next_id: usize,
}

impl Grower<'_> {
    fn grow(&mut self, members: Members, used: &mut [bool], depth: usize) -> TreeNode {
        let mass: f64 = members.iter().map(|(_, m)| m).sum();
        let tnorm = self.config.tnorm;
        let proportions =
            proportions_of(self.examples, &members, tnorm).expect("callers only grow nodes with positive mass");
        let id = self.next_id;
        self.next_id += 1;
        let leaf = |criterion| TreeNode {
            id,
            depth,
            mass,
            proportions: proportions.clone(),
            kind: NodeKind::Leaf(criterion),
        };

        let top = proportions.iter().cloned().fold(0.0, f64::max);
        if top >= self.config.fuzziness_threshold {
            return leaf(StopCriterion::Threshold);
        }
        if mass < self.config.leaf_decision_threshold {
            return leaf(StopCriterion::LowMass);
        }
        if used.iter().all(|u| *u) {
            return leaf(StopCriterion::AttributesExhausted);
        }

        let parent_entropy = entropy_of(&proportions);
        let candidates: Vec<(usize, SplitCandidate)> = (0..self.attributes)
            .filter(|a| !used[*a])
            .map(|a| (a, evaluate_split(self.examples, &members, a, tnorm, parent_entropy)))
            .collect();
        let best_gain = candidates.iter().map(|(_, c)| c.gain).fold(f64::NEG_INFINITY, f64::max);
        let (attribute, best) = candidates
            .into_iter()
            .find(|(_, c)| c.gain >= best_gain - GAIN_TIE_TOLERANCE)
            .expect("at least one unused attribute");
        let floor = self.config.min_information_gain;
        if floor > 0.0 && best.gain < floor {
            return leaf(StopCriterion::LowGain);
        }

        used[attribute] = true;
        let mut children = Vec::new();
        for (index, child) in best.children.into_iter().enumerate() {
            if child.is_empty() {
                continue;
            }
            children.push(Branch {
                index,
                node: self.grow(child, used, depth + 1),
            });
        }
        used[attribute] = false;
        TreeNode {
            id,
            depth,
            mass,
            proportions,
            kind: NodeKind::Split { attribute, children },
        }
    }
}

fn check_shapes(examples: &[FuzzifiedExample], schema: &TreeSchema) -> Result<(), InductionError> {
    for (n, e) in examples.iter().enumerate() {
        if e.memberships.len() != schema.attributes.len() {
            return Err(InductionError::Shape(format!(
                "example {n} has {} attributes, schema has {}",
                e.memberships.len(),
                schema.attributes.len()
            )));
        }
        for (m, a) in e.memberships.iter().zip(&schema.attributes) {
            if m.len() != a.branch_count() {
                return Err(InductionError::Shape(format!(
                    "example {n}: attribute {} has {} memberships, expected {}",
                    a.name,
                    m.len(),
                    a.branch_count()
                )));
            }
        }
        if e.classes.len() != schema.classes.len() {
            return Err(InductionError::Shape(format!(
                "example {n} has {} class memberships, expected {}",
                e.classes.len(),
                schema.classes.len()
            )));
        }
        let all = e.memberships.iter().flatten().chain(&e.classes);
        if let Some(bad) = all.into_iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(InductionError::Fuzzy(FuzzyError::DegreeOutOfRange(*bad)));
        }
    }
    Ok(())
}

/// Grows a fuzzy ID3 tree. Every example starts at the root with
/// membership 1.
///
/// A node becomes a leaf, checked in this order, when its top class
/// proportion reaches the fuzziness threshold, its mass is below the leaf
/// decision threshold, every attribute is used on its path, or the best gain
/// is below the minimum gain. Otherwise it splits on the best attribute and
/// each child with positive mass is grown in turn.
pub fn grow_tree(
    examples: &[FuzzifiedExample],
    schema: &TreeSchema,
    config: &GrowthConfig,
) -> Result<FuzzyTree, InductionError> {
    let t = config.fuzziness_threshold;
    if !(t > 0.0 && t <= 1.0) {
        return Err(InductionError::InvalidConfig(format!(
            "fuzziness control threshold {t} must lie in (0, 1]"
        )));
    }
    if examples.is_empty() {
        return Err(InductionError::NoExamples);
    }
    check_shapes(examples, schema)?;
    let members: Members = (0..examples.len()).map(|i| (i, 1.0)).collect();
    if proportions_of(examples, &members, config.tnorm).is_none() {
        return Err(InductionError::ZeroMass);
    }
    let mut grower = Grower {
        examples,
        config,
        attributes: schema.attributes.len(),
        next_id: 0,
    };
    let mut used = vec![false; schema.attributes.len()];
    let root = grower.grow(members, &mut used, 0);
    Ok(FuzzyTree {
        root,
        config: config.clone(),
        schema: schema.clone(),
    })
}

pub fn tree_stats(tree: &FuzzyTree) -> TreeStats {
    let mut stats = TreeStats {
        nodes: 0,
        leaves: 0,
        max_depth: 0,
        criteria: BTreeMap::new(),
    };
    tree.root.walk(&mut |n| {
        stats.nodes += 1;
        stats.max_depth = stats.max_depth.max(n.depth);
        if let NodeKind::Leaf(c) = n.kind {
            stats.leaves += 1;
            *stats.criteria.entry(c).or_default() += 1;
        }
    });
    stats
}

impl FuzzyTree {
    pub fn stats(&self) -> TreeStats {
        tree_stats(self)
    }

    /// Checks the structural invariants and that every leaf's recorded
    /// criterion holds given its stored proportions, mass and path.
    /// `LowGain` leaves are only checked for being eligible for that rule;
    /// confirming the gain itself needs the training examples.
    pub fn check_invariants(&self) -> Result<(), String> {
        fn visit(tree: &FuzzyTree, node: &TreeNode, path: &mut Vec<usize>, next_id: &mut usize) -> Result<(), String> {
            let cfg = &tree.config;
            if node.id != *next_id {
                return Err(format!("node ids are not preorder at {}", node.id));
            }
            *next_id += 1;
            if node.depth != path.len() {
                return Err(format!(
                    "node {} has depth {} on a path of length {}",
                    node.id,
                    node.depth,
                    path.len()
                ));
            }
            let sum: f64 = node.proportions.iter().sum();
            if node.mass > 0.0 && (sum - 1.0).abs() > 1e-9 {
                return Err(format!("node {} proportions sum to {sum}", node.id));
            }
            let top = node.proportions.iter().cloned().fold(0.0, f64::max);
            let pure_enough = top >= cfg.fuzziness_threshold;
            let exhausted = path.len() == tree.schema.attributes.len();
            let light = node.mass < cfg.leaf_decision_threshold;
            match &node.kind {
                NodeKind::Leaf(c) => {
                    let holds = match c {
                        StopCriterion::Threshold => pure_enough,
                        StopCriterion::LowMass => light && !pure_enough,
                        StopCriterion::AttributesExhausted => exhausted && !pure_enough && !light,
                        StopCriterion::LowGain => {
                            cfg.min_information_gain > 0.0 && !pure_enough && !light && !exhausted
                        }
                    };
                    if !holds {
                        return Err(format!("leaf {} does not satisfy its criterion {c}", node.id));
                    }
                }
                NodeKind::Split { attribute, children } => {
                    if pure_enough || light || exhausted {
                        return Err(format!("node {} was split although a stop rule holds", node.id));
                    }
                    if path.contains(attribute) {
                        return Err(format!("node {} reuses attribute {attribute}", node.id));
                    }
                    if children.is_empty() {
                        return Err(format!("split node {} has no children", node.id));
                    }
                    path.push(*attribute);
                    for b in children {
                        visit(tree, &b.node, path, next_id)?;
                    }
                    path.pop();
                }
            }
            Ok(())
        }
        visit(self, &self.root, &mut Vec::new(), &mut 0)
    }

    /// One line per node in preorder, indented two spaces per level:
    /// `<edge> <kind> mass=<m> p=<p1,...,pK>` where edge is `root` or
    /// `<branch>:<label>` and kind is `split=<attribute>` or
    /// `leaf=<criterion>`. Numbers are written so they parse back exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_node(&self.root, "root".to_string(), &mut out);
        out
    }

    fn write_node(&self, node: &TreeNode, edge: String, out: &mut String) {
        let kind = match &node.kind {
            NodeKind::Leaf(c) => format!("leaf={c}"),
            NodeKind::Split { attribute, .. } => format!("split={}", self.schema.attributes[*attribute].name),
        };
        let p: Vec<String> = node.proportions.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{}{edge} {kind} mass={} p={}\n",
            "  ".repeat(node.depth),
            node.mass,
            p.join(",")
        ));
        if let NodeKind::Split { attribute, children } = &node.kind {
            let attr = &self.schema.attributes[*attribute];
            for b in children {
                self.write_node(&b.node, format!("{}:{}", b.index, attr.branch_label(b.index)), out);
            }
        }
    }

    /// Parses [`FuzzyTree::to_text`] output against a known schema.
    pub fn from_text(text: &str, schema: TreeSchema, config: GrowthConfig) -> Result<Self, InductionError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l))
            .collect();
        let mut parser = TreeParser {
            lines: &lines,
            pos: 0,
            schema: &schema,
            next_id: 0,
        };
        let root = parser.node(0, None)?;
        if let Some((line, _)) = lines.get(parser.pos) {
            return Err(InductionError::Parse {
                line: *line,
                reason: "unexpected line after the root subtree".into(),
            });
        }
        Ok(FuzzyTree { root, config, schema })
    }
}

struct TreeParser<'a> {
    lines: &'a [(usize, &'a str)],
    pos: usize,
    schema: &'a TreeSchema,
    next_id: usize,
}

struct ParsedLine<'a> {
    depth: usize,
    edge: &'a str,
    kind: &'a str,
    mass: f64,
    proportions: Vec<f64>,
}

impl<'a> TreeParser<'a> {
    fn err(&self, line: usize, reason: impl Into<String>) -> InductionError {
        InductionError::Parse {
            line,
            reason: reason.into(),
        }
    }

    fn parse_line(&self, line_no: usize, line: &'a str) -> Result<ParsedLine<'a>, InductionError> {
        let indent = line.len() - line.trim_start_matches(' ').len();
        if !indent.is_multiple_of(2) {
            return Err(self.err(line_no, "odd indentation"));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [edge, kind, mass, p] = fields[..] else {
            return Err(self.err(line_no, "expected `<edge> <kind> mass=<m> p=<p,...>`"));
        };
        let mass = mass
            .strip_prefix("mass=")
            .and_then(|m| m.parse::<f64>().ok())
            .ok_or_else(|| self.err(line_no, format!("bad mass field {mass:?}")))?;
        let proportions = p
            .strip_prefix("p=")
            .ok_or_else(|| self.err(line_no, "missing p= field"))?
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| self.err(line_no, format!("bad proportions {p:?}")))?;
        if proportions.len() != self.schema.classes.len() {
            return Err(self.err(
                line_no,
                format!(
                    "{} proportions, expected {}",
                    proportions.len(),
                    self.schema.classes.len()
                ),
            ));
        }
        Ok(ParsedLine {
            depth: indent / 2,
            edge,
            kind,
            mass,
            proportions,
        })
    }

    fn node(&mut self, depth: usize, parent_attr: Option<usize>) -> Result<TreeNode, InductionError> {
        let &(line_no, raw) = self
            .lines
            .get(self.pos)
            .ok_or_else(|| self.err(0, "unexpected end of tree text"))?;
        let line = self.parse_line(line_no, raw)?;
        if line.depth != depth {
            return Err(self.err(line_no, format!("expected depth {depth}, found {}", line.depth)));
        }
        match parent_attr {
            None if line.edge != "root" => return Err(self.err(line_no, "first node must be `root`")),
            Some(_) if line.edge == "root" => return Err(self.err(line_no, "nested `root` edge")),
            _ => {}
        }
        self.pos += 1;
        let id = self.next_id;
        self.next_id += 1;

        let kind = if let Some(tag) = line.kind.strip_prefix("leaf=") {
            NodeKind::Leaf(tag.parse().map_err(|e: String| self.err(line_no, e))?)
        } else if let Some(name) = line.kind.strip_prefix("split=") {
            let attribute = self
                .schema
                .attribute_index(name)
                .ok_or_else(|| self.err(line_no, format!("unknown attribute {name:?}")))?;
            let branches = self.schema.attributes[attribute].branch_count();
            let mut children = Vec::new();
            while let Some(&(child_line, child_raw)) = self.lines.get(self.pos) {
                let child = self.parse_line(child_line, child_raw)?;
                if child.depth != depth + 1 {
                    break;
                }
                let index = child
                    .edge
                    .split(':')
                    .next()
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|i| *i < branches)
                    .ok_or_else(|| self.err(child_line, format!("bad branch {:?}", child.edge)))?;
                let node = self.node(depth + 1, Some(attribute))?;
                children.push(Branch { index, node });
            }
            if children.is_empty() {
                return Err(self.err(line_no, "split node without children"));
            }
            NodeKind::Split { attribute, children }
        } else {
            return Err(self.err(line_no, format!("bad node kind {:?}", line.kind)));
        };
        Ok(TreeNode {
            id,
            depth,
            mass: line.mass,
            proportions: line.proportions,
            kind,
        })
    }
}
