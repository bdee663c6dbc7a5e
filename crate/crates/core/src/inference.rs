//! Applying a grown tree to new inputs.
//!
//! A record reaches every leaf whose path it matches to some degree; the
//! degree is the t-norm of the edge memberships along the path. The two
//! modes then combine the leaves into one activation per effort class, and
//! [`defuzzify`] turns that activation into hours.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::NormalizationParams;
use crate::fuzzy::FuzzyPartition;
use crate::induction::{FuzzyTree, NodeKind, TreeNode};

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("input does not match the tree schema: {0}")]
    Shape(String),
    #[error("no leaf of the tree is activated by the input")]
    NoCoverage,
    #[error("activation vector has no positive entry")]
    ZeroActivation,
    #[error("unknown inference mode {0:?} (expected set or exemplar)")]
    UnknownMode(String),
}

/// How activated leaves are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InferenceMode {
    /// Leaves are fuzzy sets: `a_k = max_leaf min(activation, p_k)`.
    SetBased,
    /// Leaves are exemplars weighted by their training mass:
    /// `a_k ∝ Σ_leaf activation · mass · p_k`.
    #[default]
    ExemplarBased,
}

impl fmt::Display for InferenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InferenceMode::SetBased => "set",
            InferenceMode::ExemplarBased => "exemplar",
        })
    }
}

impl FromStr for InferenceMode {
    type Err = InferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "set" | "set-based" | "setbased" => Ok(InferenceMode::SetBased),
            "exemplar" | "exemplar-based" | "exemplarbased" => Ok(InferenceMode::ExemplarBased),
            other => Err(InferenceError::UnknownMode(other.to_string())),
        }
    }
}

/// A node reached by an input, with the degree it was reached to.
///
/// Usually a leaf. When the input flows into a branch that was pruned for
/// lack of training mass, the split node itself answers for that share and
/// `pruned_branch` names the branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeActivation<'a> {
    pub node: &'a TreeNode,
    pub activation: f64,
    pub pruned_branch: Option<usize>,
}

/// Trace entry kept with a [`ClassActivation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub node_id: usize,
    pub pruned_branch: Option<usize>,
    pub activation: f64,
}

impl TraceEntry {
    /// `L<id>` for a leaf, `N<id>/<branch>` for a split node standing in
    /// for a pruned branch.
    pub fn label(&self) -> String {
        match self.pruned_branch {
            None => format!("L{}", self.node_id),
            Some(b) => format!("N{}/{}", self.node_id, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassActivation {
    pub values: Vec<f64>,
    /// Reached nodes, strongest first.
    pub trace: Vec<TraceEntry>,
}

impl ClassActivation {
    pub fn top(&self, n: usize) -> &[TraceEntry] {
        &self.trace[..n.min(self.trace.len())]
    }
}

fn check_inputs(tree: &FuzzyTree, inputs: &[Vec<f64>]) -> Result<(), InferenceError> {
    let attrs = &tree.schema.attributes;
    if inputs.len() != attrs.len() {
        return Err(InferenceError::Shape(format!(
            "{} membership vectors for {} attributes",
            inputs.len(),
            attrs.len()
        )));
    }
    for (m, a) in inputs.iter().zip(attrs) {
        if m.len() != a.branch_count() {
            return Err(InferenceError::Shape(format!(
                "attribute {} has {} memberships, expected {}",
                a.name,
                m.len(),
                a.branch_count()
            )));
        }
    }
    Ok(())
}

/// Nodes reached by a fuzzified input (one membership vector per
/// attribute), in preorder. Zero activations are omitted.
pub fn leaf_activations<'a>(
    tree: &'a FuzzyTree,
    inputs: &[Vec<f64>],
) -> Result<Vec<NodeActivation<'a>>, InferenceError> {
    check_inputs(tree, inputs)?;
    let tnorm = tree.config.tnorm;
    let mut out = Vec::new();
    let mut stack = vec![(&tree.root, 1.0)];
    while let Some((node, act)) = stack.pop() {
        match &node.kind {
            NodeKind::Leaf(_) => out.push(NodeActivation {
                node,
                activation: act,
                pruned_branch: None,
            }),
            NodeKind::Split { attribute, children } => {
                let mut next = Vec::new();
                for (branch, u) in inputs[*attribute].iter().enumerate() {
                    let child_act = tnorm.combine(act, *u);
                    if child_act <= 0.0 {
                        continue;
                    }
                    match children.iter().find(|c| c.index == branch) {
                        Some(c) => next.push((&c.node, child_act)),
                        None => out.push(NodeActivation {
                            node,
                            activation: child_act,
                            pruned_branch: Some(branch),
                        }),
                    }
                }
                stack.extend(next.into_iter().rev());
            }
        }
    }
    out.sort_by_key(|a| a.node.id);
    Ok(out)
}

/// Combines the reached nodes into one activation per effort class.
pub fn infer(tree: &FuzzyTree, inputs: &[Vec<f64>], mode: InferenceMode) -> Result<ClassActivation, InferenceError> {
    let reached = leaf_activations(tree, inputs)?;
    let k = tree.schema.classes.len();
    let mut values = vec![0.0_f64; k];
    match mode {
        InferenceMode::SetBased => {
            for r in &reached {
                for (a, p) in values.iter_mut().zip(&r.node.proportions) {
                    *a = a.max(r.activation.min(*p));
                }
            }
        }
        InferenceMode::ExemplarBased => {
            for r in &reached {
                let w = r.activation * r.node.mass;
                for (a, p) in values.iter_mut().zip(&r.node.proportions) {
                    *a += w * p;
                }
            }
            let total: f64 = values.iter().sum();
            if total > 0.0 {
                values.iter_mut().for_each(|a| *a /= total);
            }
        }
    }
    if !values.iter().any(|a| *a > 0.0) {
        return Err(InferenceError::NoCoverage);
    }
    let mut trace: Vec<TraceEntry> = reached
        .iter()
        .map(|r| TraceEntry {
            node_id: r.node.id,
            pruned_branch: r.pruned_branch,
            activation: r.activation,
        })
        .collect();
    trace.sort_by(|a, b| b.activation.partial_cmp(&a.activation).unwrap_or(Ordering::Equal));
    Ok(ClassActivation { values, trace })
}

/// Activation-weighted mean of the given class centroids, in normalized
/// units.
pub fn weighted_centroid(activation: &[f64], centroids: &[f64]) -> Result<f64, InferenceError> {
    if activation.len() != centroids.len() {
        return Err(InferenceError::Shape(format!(
            "{} activations for {} classes",
            activation.len(),
            centroids.len()
        )));
    }
    if activation.iter().any(|a| *a < 0.0 || !a.is_finite()) {
        return Err(InferenceError::ZeroActivation);
    }
    let total: f64 = activation.iter().sum();
    if total <= 0.0 {
        return Err(InferenceError::ZeroActivation);
    }
    let weighted: f64 = activation.iter().zip(centroids).map(|(a, c)| a * c).sum();
    Ok(weighted / total)
}

/// Centroid defuzzification followed by inverse min-max scaling to hours.
pub fn defuzzify(
    activation: &[f64],
    effort_partition: &FuzzyPartition,
    params: &NormalizationParams,
) -> Result<f64, InferenceError> {
    let normalized = weighted_centroid(activation, &effort_partition.centroids())?;
    Ok(params.effort.denormalize(normalized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ValueRange;
    use crate::fuzzy::TNormKind;
    use crate::induction::{Attribute, Branch, GrowthConfig, StopCriterion, TreeSchema};
    use approx::assert_abs_diff_eq;

    fn leaf(id: usize, depth: usize, mass: f64, p: Vec<f64>) -> TreeNode {
        TreeNode {
            id,
            depth,
            mass,
            proportions: p,
            kind: NodeKind::Leaf(StopCriterion::Threshold),
        }
    }

    fn schema(branches: &[usize], classes: usize) -> TreeSchema {
        TreeSchema {
            attributes: branches
                .iter()
                .enumerate()
                .map(|(i, n)| Attribute::fuzzy(format!("x{i}"), FuzzyPartition::uniform(*n).unwrap()))
                .collect(),
            classes: FuzzyPartition::uniform(classes).unwrap(),
        }
    }

    fn tree(root: TreeNode, schema: TreeSchema) -> FuzzyTree {
        FuzzyTree {
            root,
            config: GrowthConfig::default(),
            schema,
        }
    }

    /// Root splits on x0 (2 sets); branch 0 splits on x1 (3 sets, branch 2
    /// pruned); branch 1 is a leaf.
    fn depth_two() -> FuzzyTree {
        let inner = TreeNode {
            id: 1,
            depth: 1,
            mass: 6.0,
            proportions: vec![0.5, 0.5],
            kind: NodeKind::Split {
                attribute: 1,
                children: vec![
                    Branch {
                        index: 0,
                        node: leaf(2, 2, 3.0, vec![1.0, 0.0]),
                    },
                    Branch {
                        index: 1,
                        node: leaf(3, 2, 3.0, vec![0.25, 0.75]),
                    },
                ],
            },
        };
        let root = TreeNode {
            id: 0,
            depth: 0,
            mass: 10.0,
            proportions: vec![0.4, 0.6],
            kind: NodeKind::Split {
                attribute: 0,
                children: vec![
                    Branch { index: 0, node: inner },
                    Branch {
                        index: 1,
                        node: leaf(4, 1, 4.0, vec![0.0, 1.0]),
                    },
                ],
            },
        };
        tree(root, schema(&[2, 3], 2))
    }

    #[test]
    fn single_leaf_tree_is_fully_activated() {
        let t = tree(leaf(0, 0, 5.0, vec![0.0, 1.0, 0.0]), schema(&[2], 3));
        let reached = leaf_activations(&t, &[vec![0.3, 0.7]]).unwrap();
        assert_eq!(reached.len(), 1);
        assert_eq!(reached[0].activation, 1.0);
        for mode in [InferenceMode::SetBased, InferenceMode::ExemplarBased] {
            assert_eq!(infer(&t, &[vec![0.3, 0.7]], mode).unwrap().values, vec![0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn core_input_reaches_exactly_one_leaf() {
        let t = depth_two();
        let reached = leaf_activations(&t, &[vec![1.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(reached.len(), 1);
        assert_eq!(reached[0].node.id, 3);
        assert_eq!(reached[0].activation, 1.0);
    }

    #[test]
    fn path_activations_match_hand_composition() {
        let t = depth_two();
        let x0 = vec![0.7, 0.3];
        let x1 = vec![0.0, 0.4, 0.6];
        let reached = leaf_activations(&t, &[x0, x1]).unwrap();
        let got: Vec<(usize, Option<usize>, f64)> = reached
            .iter()
            .map(|r| (r.node.id, r.pruned_branch, r.activation))
            .collect();
        // pruned branch 2 of node 1 answers through node 1 itself
        let expected = [(1, Some(2), 0.7 * 0.6), (3, None, 0.7 * 0.4), (4, None, 0.3)];
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(expected) {
            assert_eq!((g.0, g.1), (e.0, e.1));
            assert_abs_diff_eq!(g.2, e.2, epsilon = 1e-15);
        }
        let total: f64 = got.iter().map(|g| g.2).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn minimum_tnorm_composition() {
        let mut t = depth_two();
        t.config.tnorm = TNormKind::Minimum;
        let reached = leaf_activations(&t, &[vec![0.7, 0.3], vec![0.0, 0.4, 0.6]]).unwrap();
        let acts: Vec<f64> = reached.iter().map(|r| r.activation).collect();
        assert_eq!(acts, vec![0.6, 0.4, 0.3]);
    }

    #[test]
    fn two_leaves_one_active_returns_its_proportions() {
        let t = depth_two();
        for mode in [InferenceMode::SetBased, InferenceMode::ExemplarBased] {
            let a = infer(&t, &[vec![0.0, 1.0], vec![1.0, 0.0, 0.0]], mode).unwrap();
            assert_eq!(a.values, vec![0.0, 1.0]);
        }
    }

    #[test]
    fn two_half_activated_leaves() {
        let root = TreeNode {
            id: 0,
            depth: 0,
            mass: 4.0,
            proportions: vec![0.5, 0.5],
            kind: NodeKind::Split {
                attribute: 0,
                children: vec![
                    Branch {
                        index: 0,
                        node: leaf(1, 1, 2.0, vec![1.0, 0.0]),
                    },
                    Branch {
                        index: 1,
                        node: leaf(2, 1, 2.0, vec![0.0, 1.0]),
                    },
                ],
            },
        };
        let t = tree(root, schema(&[2], 2));
        let input = [vec![0.5, 0.5]];
        assert_eq!(
            infer(&t, &input, InferenceMode::ExemplarBased).unwrap().values,
            vec![0.5, 0.5]
        );
        assert_eq!(
            infer(&t, &input, InferenceMode::SetBased).unwrap().values,
            vec![0.5, 0.5]
        );
    }

    #[test]
    fn trace_is_sorted_strongest_first() {
        let t = depth_two();
        let a = infer(&t, &[vec![0.7, 0.3], vec![0.0, 0.4, 0.6]], InferenceMode::ExemplarBased).unwrap();
        let labels: Vec<String> = a.top(3).iter().map(TraceEntry::label).collect();
        assert_eq!(labels, vec!["N1/2", "L4", "L3"]);
        assert_eq!(a.top(10).len(), 3);
    }

    #[test]
    fn shape_errors() {
        let t = depth_two();
        assert!(matches!(
            leaf_activations(&t, &[vec![1.0, 0.0]]),
            Err(InferenceError::Shape(_))
        ));
        assert!(matches!(
            leaf_activations(&t, &[vec![1.0], vec![1.0, 0.0, 0.0]]),
            Err(InferenceError::Shape(_))
        ));
        assert_eq!(
            infer(&t, &[vec![0.0, 0.0], vec![0.0, 0.0, 0.0]], InferenceMode::SetBased).unwrap_err(),
            InferenceError::NoCoverage
        );
    }

    fn params(min: f64, max: f64) -> NormalizationParams {
        let r = ValueRange::new(0.0, 1.0).unwrap();
        NormalizationParams {
            features: [r; 5],
            effort: ValueRange::new(min, max).unwrap(),
        }
    }

    #[test]
    fn defuzzify_examples() {
        let p = FuzzyPartition::uniform(5).unwrap();
        let c = p.centroids();
        let prm = params(100.0, 1100.0);
        let onehot = [0.0, 0.0, 1.0, 0.0, 0.0];
        assert_abs_diff_eq!(
            defuzzify(&onehot, &p, &prm).unwrap(),
            100.0 + 1000.0 * c[2],
            epsilon = 1e-9
        );
        let pair = [0.0, 0.5, 0.0, 0.5, 0.0];
        assert_abs_diff_eq!(
            defuzzify(&pair, &p, &prm).unwrap(),
            100.0 + 1000.0 * (c[1] + c[3]) / 2.0,
            epsilon = 1e-9
        );
        // 0.2 * 0.25 + 0.8 * 0.75 = 0.65 of a 0..1000 range
        let hours = params(0.0, 1000.0)
            .effort
            .denormalize(weighted_centroid(&[0.2, 0.8], &[0.25, 0.75]).unwrap());
        assert_abs_diff_eq!(hours, 650.0, epsilon = 1e-9);
        assert_eq!(defuzzify(&[0.0; 5], &p, &prm), Err(InferenceError::ZeroActivation));
        assert!(matches!(defuzzify(&[1.0], &p, &prm), Err(InferenceError::Shape(_))));
    }

    #[test]
    fn moving_mass_upward_never_lowers_the_estimate() {
        let p = FuzzyPartition::uniform(11).unwrap();
        let prm = params(10.0, 5000.0);
        let base = [0.1, 0.0, 0.3, 0.0, 0.0, 0.2, 0.0, 0.0, 0.3, 0.0, 0.1];
        let before = defuzzify(&base, &p, &prm).unwrap();
        for (lo, hi) in [(0, 1), (2, 9), (5, 10), (8, 10)] {
            let mut shifted = base;
            let moved = shifted[lo] * 0.5;
            shifted[lo] -= moved;
            shifted[hi] += moved;
            assert!(defuzzify(&shifted, &p, &prm).unwrap() >= before);
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("set".parse::<InferenceMode>().unwrap(), InferenceMode::SetBased);
        assert_eq!(
            "Exemplar".parse::<InferenceMode>().unwrap(),
            InferenceMode::ExemplarBased
        );
        assert!("vote".parse::<InferenceMode>().is_err());
        assert_eq!(InferenceMode::default(), InferenceMode::ExemplarBased);
    }
}
