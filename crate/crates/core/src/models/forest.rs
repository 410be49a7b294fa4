//! Random-forest regression built from CART trees.
//!
//! Each tree draws a bootstrap sample from an RNG stream derived from
//! `(seed, tree_index)` via the documented `mix64` mixer, then grows greedily:
//! at every node `max_features` candidate features are drawn without
//! replacement from the tree's stream, split thresholds sit midway between
//! consecutive distinct sorted values, and the split minimizing
//! `n_left*var(left) + n_right*var(right)` (population variance) wins, ties
//! broken by lowest feature index then lowest threshold. Trees consume raw
//! (unstandardized) features: splits are scale-equivariant, and skipping the
//! scaler keeps importances easy to read.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::models::{Payload, PredictorModel, TrainMeta};
use crate::rng;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// None means unlimited depth. A node at this depth becomes a leaf.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// None defaults to max(1, floor(p/3)) at fit time.
    pub max_features: Option<usize>,
    /// Sample n rows with replacement per tree; off means every tree sees the
    /// full training set.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestParams {
    fn validate(&self, p: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::data("forest n_trees must be >= 1"));
        }
        if self.min_samples_split == 0 || self.min_samples_leaf == 0 {
            return Err(Error::data("forest min_samples_split and min_samples_leaf must be >= 1"));
        }
        if let Some(depth) = self.max_depth {
            if depth == 0 {
                return Err(Error::data("forest max_depth must be >= 1 when set"));
            }
        }
        if let Some(mf) = self.max_features {
            if mf == 0 || mf > p {
                return Err(Error::data(format!("forest max_features must be in 1..={p}")));
            }
        }
        Ok(())
    }

    fn effective_max_features(&self, p: usize) -> usize {
        self.max_features.unwrap_or_else(|| (p / 3).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<F> {
    Internal {
        feature_index: usize,
        threshold: F,
        left: usize,
        right: usize,
        n_samples: usize,
        impurity_decrease: F,
    },
    Leaf {
        value: F,
        n_samples: usize,
    },
}

/// Nodes stored flat, root at index 0, children indices greater than their
/// parent's.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<F> {
    pub nodes: Vec<TreeNode<F>>,
}

impl<F: Real> Tree<F> {
    pub fn predict_row(&self, row: &[F]) -> F {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                TreeNode::Leaf { value, .. } => return *value,
                TreeNode::Internal { feature_index, threshold, left, right, .. } => {
                    idx = if row[*feature_index] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn has_split(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, TreeNode::Internal { .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestPayload<F> {
    pub trees: Vec<Tree<F>>,
    pub params: ForestParams,
}

impl<F: Real> ForestPayload<F> {
    pub fn predict_row(&self, row: &[F]) -> F {
        let sum = self
            .trees
            .iter()
            .fold(F::zero(), |acc, tree| acc + tree.predict_row(row));
        sum / F::from_usize(self.trees.len()).unwrap()
    }

    /// Widest feature index referenced by any split, if any tree splits.
    pub fn width(&self) -> Option<usize> {
        self.trees
            .iter()
            .flat_map(|t| t.nodes.iter())
            .filter_map(|n| match n {
                TreeNode::Internal { feature_index, .. } => Some(feature_index + 1),
                TreeNode::Leaf { .. } => None,
            })
            .max()
    }

    pub fn to_doc(&self) -> ForestDoc {
        ForestDoc {
            params: self.params,
            trees: self
                .trees
                .iter()
                .map(|t| TreeDoc {
                    nodes: t
                        .nodes
                        .iter()
                        .map(|n| match n {
                            TreeNode::Internal {
                                feature_index,
                                threshold,
                                left,
                                right,
                                n_samples,
                                impurity_decrease,
                            } => NodeDoc {
                                kind: "internal".into(),
                                feature_index: Some(*feature_index),
                                threshold: Some(threshold.as_f64()),
                                left: Some(*left),
                                right: Some(*right),
                                value: None,
                                n_samples: *n_samples,
                                impurity_decrease: Some(impurity_decrease.as_f64()),
                            },
                            TreeNode::Leaf { value, n_samples } => NodeDoc {
                                kind: "leaf".into(),
                                feature_index: None,
                                threshold: None,
                                left: None,
                                right: None,
                                value: Some(value.as_f64()),
                                n_samples: *n_samples,
                                impurity_decrease: None,
                            },
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: ForestDoc) -> Result<ForestPayload<F>> {
        let mut trees = Vec::with_capacity(doc.trees.len());
        for tree_doc in doc.trees {
            let mut nodes = Vec::with_capacity(tree_doc.nodes.len());
            for (idx, n) in tree_doc.nodes.iter().enumerate() {
                let node = match n.kind.as_str() {
                    "internal" => {
                        let missing = || Error::Doc {
                            path: None,
                            msg: format!("internal node {idx} is missing split fields"),
                        };
                        let left = n.left.ok_or_else(missing)?;
                        let right = n.right.ok_or_else(missing)?;
                        if left <= idx || right <= idx {
                            return Err(Error::Doc {
                                path: None,
                                msg: format!("node {idx} has children not after it"),
                            });
                        }
                        TreeNode::Internal {
                            feature_index: n.feature_index.ok_or_else(missing)?,
                            threshold: F::from_f64(n.threshold.ok_or_else(missing)?),
                            left,
                            right,
                            n_samples: n.n_samples,
                            impurity_decrease: F::from_f64(
                                n.impurity_decrease.ok_or_else(missing)?,
                            ),
                        }
                    }
                    "leaf" => TreeNode::Leaf {
                        value: F::from_f64(n.value.ok_or_else(|| Error::Doc {
                            path: None,
                            msg: format!("leaf node {idx} is missing its value"),
                        })?),
                        n_samples: n.n_samples,
                    },
                    other => {
                        return Err(Error::Doc {
                            path: None,
                            msg: format!("node {idx} has unknown kind '{other}'"),
                        })
                    }
                };
                nodes.push(node);
            }
            let tree = Tree { nodes };
            validate_tree_structure(&tree)?;
            trees.push(tree);
        }
        let payload = ForestPayload { trees, params: doc.params };
        if payload.trees.len() != payload.params.n_trees {
            return Err(Error::Doc {
                path: None,
                msg: format!(
                    "forest has {} trees but params.n_trees = {}",
                    payload.trees.len(),
                    payload.params.n_trees
                ),
            });
        }
        Ok(payload)
    }
}

fn validate_tree_structure<F: Real>(tree: &Tree<F>) -> Result<()> {
    if tree.nodes.is_empty() {
        return Err(Error::Doc { path: None, msg: "tree has no nodes".into() });
    }
    let mut visits = vec![0usize; tree.nodes.len()];
    let mut stack = vec![0usize];
    while let Some(idx) = stack.pop() {
        let Some(node) = tree.nodes.get(idx) else {
            return Err(Error::Doc { path: None, msg: format!("node index {idx} out of range") });
        };
        visits[idx] += 1;
        if visits[idx] > 1 {
            return Err(Error::Doc { path: None, msg: format!("node {idx} reachable twice") });
        }
        if let TreeNode::Internal { left, right, .. } = node {
            stack.push(*left);
            stack.push(*right);
        }
    }
    if visits.iter().any(|&v| v == 0) {
        return Err(Error::Doc { path: None, msg: "tree has unreachable nodes".into() });
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ForestDoc {
    pub params: ForestParams,
    pub trees: Vec<TreeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TreeDoc {
    pub nodes: Vec<NodeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NodeDoc {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feature_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub impurity_decrease: Option<f64>,
}

/// The bootstrap rows tree `tree_index` trains on, plus the RNG stream
/// positioned right after the bootstrap draws (node candidate draws continue
/// on the same stream). Exposed so audits can replay training exactly.
pub fn bootstrap_indices(
    n: usize,
    params: &ForestParams,
    tree_index: usize,
) -> (Vec<usize>, rand_chacha::ChaCha8Rng) {
    use rand::Rng;
    let mut stream = rng::stream(params.seed, tree_index as u64);
    let indices = if params.bootstrap {
        (0..n).map(|_| stream.gen_range(0..n as u64) as usize).collect()
    } else {
        (0..n).collect()
    };
    (indices, stream)
}

struct TreeBuilder<'a, F> {
    matrix: &'a [[F; 9]],
    targets: &'a [F],
    rows: &'a [usize],
    params: &'a ForestParams,
    max_features: usize,
    rng: rand_chacha::ChaCha8Rng,
    nodes: Vec<TreeNode<F>>,
}

impl<'a, F: Real> TreeBuilder<'a, F> {
    /// Sum and sum of squares over a node's member positions (into `rows`).
    fn moments(&self, members: &[u32]) -> (F, F) {
        members.iter().fold((F::zero(), F::zero()), |(s, sq), &m| {
            let y = self.targets[self.rows[m as usize]];
            (s + y, sq + y * y)
        })
    }

    fn leaf(&mut self, members: &[u32]) -> usize {
        let sum = members
            .iter()
            .fold(F::zero(), |s, &m| s + self.targets[self.rows[m as usize]]);
        let value = sum / F::from_usize(members.len()).unwrap();
        self.nodes.push(TreeNode::Leaf { value, n_samples: members.len() });
        self.nodes.len() - 1
    }

    fn build(&mut self, members: Vec<u32>, depth: usize) -> usize {
        let m = members.len();
        let stop = m < self.params.min_samples_split
            || self.params.max_depth.is_some_and(|d| depth >= d)
            || {
                let first = self.targets[self.rows[members[0] as usize]];
                members.iter().all(|&i| self.targets[self.rows[i as usize]] == first)
            };
        if stop {
            return self.leaf(&members);
        }

        let mut candidates = rng::sample_without_replacement(9, self.max_features, &mut self.rng);
        candidates.sort_unstable();

        let mut best: Option<(usize, F, F)> = None; // (feature, threshold, score)
        for &feature in &candidates {
            let mut order: Vec<u32> = members.clone();
            order.sort_by(|&a, &b| {
                let va = self.matrix[self.rows[a as usize]][feature];
                let vb = self.matrix[self.rows[b as usize]][feature];
                va.partial_cmp(&vb).unwrap_or(std::cmp::Ordering::Equal)
            });
            let values: Vec<F> = order
                .iter()
                .map(|&i| self.matrix[self.rows[i as usize]][feature])
                .collect();
            let ys: Vec<F> = order
                .iter()
                .map(|&i| self.targets[self.rows[i as usize]])
                .collect();
            let mut prefix_sum = F::zero();
            let mut prefix_sq = F::zero();
            let (total_sum, total_sq) =
                ys.iter().fold((F::zero(), F::zero()), |(s, sq), &y| (s + y, sq + y * y));
            for i in 1..m {
                prefix_sum = prefix_sum + ys[i - 1];
                prefix_sq = prefix_sq + ys[i - 1] * ys[i - 1];
                if !(values[i - 1] < values[i]) {
                    continue;
                }
                if i < self.params.min_samples_leaf || m - i < self.params.min_samples_leaf {
                    continue;
                }
                let nl = F::from_usize(i).unwrap();
                let nr = F::from_usize(m - i).unwrap();
                // n*var(side) written as sum(y^2) - sum(y)^2/n
                let sse_left = prefix_sq - prefix_sum * prefix_sum / nl;
                let sse_right =
                    (total_sq - prefix_sq) - (total_sum - prefix_sum) * (total_sum - prefix_sum) / nr;
                let score = sse_left + sse_right;
                let improves = match &best {
                    Some((_, _, best_score)) => score < *best_score,
                    None => true,
                };
                if improves {
                    let two = F::from_f64(2.0);
                    let mut threshold = (values[i - 1] + values[i]) / two;
                    // Midpoint rounding may land on the upper value; snap down
                    // so routing `x <= threshold` matches the scanned prefix.
                    if !(threshold < values[i]) {
                        threshold = values[i - 1];
                    }
                    best = Some((feature, threshold, score));
                }
            }
        }

        let Some((feature, threshold, score)) = best else {
            return self.leaf(&members);
        };

        let (total_sum, total_sq) = self.moments(&members);
        let n = F::from_usize(m).unwrap();
        let node_sse = total_sq - total_sum * total_sum / n;
        let impurity_decrease = (node_sse - score).max(F::zero());

        let (left_members, right_members): (Vec<u32>, Vec<u32>) = members
            .into_iter()
            .partition(|&i| self.matrix[self.rows[i as usize]][feature] <= threshold);

        let idx = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { value: F::zero(), n_samples: m }); // patched below
        let left = self.build(left_members, depth + 1);
        let right = self.build(right_members, depth + 1);
        self.nodes[idx] = TreeNode::Internal {
            feature_index: feature,
            threshold,
            left,
            right,
            n_samples: m,
            impurity_decrease,
        };
        idx
    }
}

fn grow_tree<F: Real>(
    matrix: &[[F; 9]],
    targets: &[F],
    params: &ForestParams,
    tree_index: usize,
) -> Tree<F> {
    let n = targets.len();
    let (rows, rng) = bootstrap_indices(n, params, tree_index);
    let mut builder = TreeBuilder {
        matrix,
        targets,
        rows: &rows,
        params,
        max_features: params.effective_max_features(9),
        rng,
        nodes: Vec::new(),
    };
    let members: Vec<u32> = (0..n as u32).collect();
    builder.build(members, 0);
    Tree { nodes: builder.nodes }
}

/// Train a forest. `threads` > 1 distributes trees across that many workers;
/// per-tree RNG streams depend only on `(seed, tree_index)`, so the result is
/// byte-identical regardless of scheduling.
pub fn fit_forest<F: Real>(
    train: &Dataset<F>,
    params: ForestParams,
    threads: usize,
) -> Result<PredictorModel<F>> {
    if train.is_empty() {
        return Err(Error::EmptyDataset { context: "fit_forest".into() });
    }
    params.validate(9)?;
    let matrix = train.feature_matrix();
    let targets = train.targets();

    let trees: Vec<Tree<F>> = if threads <= 1 {
        (0..params.n_trees).map(|t| grow_tree(&matrix, &targets, &params, t)).collect()
    } else {
        let workers = threads.min(params.n_trees);
        let chunk = params.n_trees.div_ceil(workers);
        let mut chunks: Vec<Vec<Tree<F>>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let matrix = &matrix;
                    let targets = &targets;
                    let params = &params;
                    scope.spawn(move || {
                        let lo = w * chunk;
                        let hi = ((w + 1) * chunk).min(params.n_trees);
                        (lo..hi).map(|t| grow_tree(matrix, targets, params, t)).collect()
                    })
                })
                .collect();
            for handle in handles {
                chunks.push(handle.join().expect("tree worker panicked"));
            }
        });
        chunks.into_iter().flatten().collect()
    };

    let payload = ForestPayload { trees, params };
    let meta = TrainMeta {
        seed: params.seed,
        hyperparameters: json!({
            "n_trees": params.n_trees,
            "max_depth": params.max_depth,
            "min_samples_split": params.min_samples_split,
            "min_samples_leaf": params.min_samples_leaf,
            "max_features": params.effective_max_features(9),
            "bootstrap": params.bootstrap,
        }),
        dataset_fingerprint: train.fingerprint(),
        normalized: train.normalized(),
        ridge_fallback: false,
    };
    PredictorModel::new(crate::dataset::feature_names_vec(), None, Payload::Forest(payload), meta)
}

/// Structural audit: n_samples additivity, non-negative impurity decreases,
/// and leaf values that exactly equal the mean of the training targets routed
/// to them (replaying the bootstrap and the routing).
pub fn audit_forest<F: Real>(model: &PredictorModel<F>, train: &Dataset<F>) -> Result<()> {
    let Payload::Forest(payload) = &model.payload else {
        return Err(Error::WrongModelKind {
            expected: "forest",
            got: model.kind().as_str().to_string(),
        });
    };
    let matrix = train.feature_matrix();
    let targets = train.targets();
    let n = targets.len();

    for (t, tree) in payload.trees.iter().enumerate() {
        validate_tree_structure(tree)?;
        let (rows, _) = bootstrap_indices(n, &payload.params, t);

        // Route every bootstrap row, accumulating per-node membership in
        // bootstrap order (growth filtered stably, so sums match bit for bit).
        let mut node_sums = vec![F::zero(); tree.nodes.len()];
        let mut node_counts = vec![0usize; tree.nodes.len()];
        for &row in &rows {
            let mut idx = 0;
            loop {
                node_counts[idx] += 1;
                match &tree.nodes[idx] {
                    TreeNode::Leaf { .. } => {
                        node_sums[idx] = node_sums[idx] + targets[row];
                        break;
                    }
                    TreeNode::Internal { feature_index, threshold, left, right, .. } => {
                        idx = if matrix[row][*feature_index] <= *threshold { *left } else { *right };
                    }
                }
            }
        }

        for (idx, node) in tree.nodes.iter().enumerate() {
            match node {
                TreeNode::Internal { left, right, n_samples, impurity_decrease, .. } => {
                    if node_counts[idx] != *n_samples {
                        return Err(Error::data(format!(
                            "tree {t} node {idx}: recorded {} samples, routed {}",
                            n_samples, node_counts[idx]
                        )));
                    }
                    let ln = n_of(&tree.nodes[*left]);
                    let rn = n_of(&tree.nodes[*right]);
                    if ln + rn != *n_samples {
                        return Err(Error::data(format!(
                            "tree {t} node {idx}: n_samples {} != {} + {}",
                            n_samples, ln, rn
                        )));
                    }
                    if *impurity_decrease < F::zero() {
                        return Err(Error::data(format!(
                            "tree {t} node {idx}: negative impurity decrease"
                        )));
                    }
                }
                TreeNode::Leaf { value, n_samples } => {
                    if node_counts[idx] != *n_samples {
                        return Err(Error::data(format!(
                            "tree {t} leaf {idx}: recorded {} samples, routed {}",
                            n_samples, node_counts[idx]
                        )));
                    }
                    let mean = node_sums[idx] / F::from_usize(node_counts[idx]).unwrap();
                    if mean != *value {
                        return Err(Error::data(format!(
                            "tree {t} leaf {idx}: value {value} != routed mean {mean}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn n_of<F>(node: &TreeNode<F>) -> usize {
    match node {
        TreeNode::Internal { n_samples, .. } | TreeNode::Leaf { n_samples, .. } => *n_samples,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::{Dataset, FeatureVector, LabeledSample};
    use crate::rng;
    use rand::Rng;

    pub(crate) fn random_dataset(n: usize, seed: u64, constant_target: Option<f64>) -> Dataset<f64> {
        let mut r = rng::root_stream(seed);
        let samples = (0..n)
            .map(|i| {
                let f = FeatureVector {
                    num_load_insts: r.gen::<f64>() * 100.0,
                    num_store_insts: r.gen::<f64>() * 50.0,
                    num_insts: 100.0 + r.gen::<f64>() * 900.0,
                    num_branches: r.gen::<f64>() * 30.0,
                    num_ops: 100.0 + r.gen::<f64>() * 1000.0,
                    l1i_kb: [16.0, 32.0, 64.0][i % 3],
                    l1d_kb: [256.0, 512.0, 1024.0][(i / 3) % 3],
                    l2_kb: 8192.0,
                    pipeline_width: 8.0,
                };
                let ipc = constant_target
                    .unwrap_or_else(|| 0.1 + 0.5 * r.gen::<f64>() + f.l1d_kb / 4096.0);
                LabeledSample::new(f, ipc, "w".into(), "c".into(), i.to_string(), false).unwrap()
            })
            .collect();
        Dataset::new(samples, false).unwrap()
    }

    #[test]
    fn single_unbootstrapped_tree_memorizes_distinct_rows() {
        let ds = random_dataset(40, 5, None);
        let params = ForestParams { n_trees: 1, bootstrap: false, ..ForestParams::default() };
        let model = fit_forest(&ds, params, 1).unwrap();
        let preds = model.predict_dataset(&ds).unwrap();
        for (p, a) in preds.iter().zip(ds.targets()) {
            assert_eq!(*p, a);
        }
    }

    #[test]
    fn constant_target_gives_single_leaf_trees() {
        let ds = random_dataset(30, 6, Some(0.75));
        let model = fit_forest(&ds, ForestParams { n_trees: 5, ..Default::default() }, 1).unwrap();
        let Payload::Forest(payload) = &model.payload else { panic!() };
        for tree in &payload.trees {
            assert_eq!(tree.nodes.len(), 1);
            match &tree.nodes[0] {
                TreeNode::Leaf { value, .. } => assert_eq!(*value, 0.75),
                other => panic!("expected leaf, got {other:?}"),
            }
        }
        assert_eq!(model.predict_row(&ds.feature_matrix()[0]).unwrap(), 0.75);
    }

    #[test]
    fn predictions_stay_within_target_range() {
        let ds = random_dataset(80, 7, None);
        let model = fit_forest(&ds, ForestParams::default(), 1).unwrap();
        let y = ds.targets();
        let (lo, hi) = (
            y.iter().cloned().fold(f64::MAX, f64::min),
            y.iter().cloned().fold(f64::MIN, f64::max),
        );
        let mut r = rng::root_stream(99);
        for _ in 0..50 {
            let probe: Vec<f64> = (0..9).map(|_| r.gen::<f64>() * 2000.0).collect();
            let p = model.predict_row(&probe).unwrap();
            assert!(p >= lo && p <= hi, "prediction {p} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn training_is_deterministic_across_thread_counts() {
        let ds = random_dataset(60, 8, None);
        let params = ForestParams { n_trees: 12, seed: 3, ..Default::default() };
        let serial = fit_forest(&ds, params, 1).unwrap();
        let threaded = fit_forest(&ds, params, 4).unwrap();
        assert_eq!(serial.to_doc_bytes().unwrap(), threaded.to_doc_bytes().unwrap());
    }

    #[test]
    fn structural_audit_passes_on_trained_forest() {
        let ds = random_dataset(50, 9, None);
        let params = ForestParams { n_trees: 10, seed: 21, ..Default::default() };
        let model = fit_forest(&ds, params, 1).unwrap();
        audit_forest(&model, &ds).unwrap();
    }

    #[test]
    fn two_single_leaf_trees_average() {
        let payload = ForestPayload::<f64> {
            trees: vec![
                Tree { nodes: vec![TreeNode::Leaf { value: 1.0, n_samples: 1 }] },
                Tree { nodes: vec![TreeNode::Leaf { value: 3.0, n_samples: 1 }] },
            ],
            params: ForestParams { n_trees: 2, ..Default::default() },
        };
        assert_eq!(payload.predict_row(&[0.0; 9]), 2.0);
        assert_eq!(payload.predict_row(&[5.0; 9]), 2.0);
    }

    #[test]
    fn forest_round_trips_through_its_document() {
        let ds = random_dataset(40, 10, None);
        let params = ForestParams { n_trees: 4, seed: 2, ..Default::default() };
        let model = fit_forest(&ds, params, 1).unwrap();
        let doc = match &model.payload {
            Payload::Forest(p) => p.to_doc(),
            _ => unreachable!(),
        };
        let back = ForestPayload::<f64>::from_doc(doc).unwrap();
        match &model.payload {
            Payload::Forest(p) => assert_eq!(&back, p),
            _ => unreachable!(),
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        let ds = random_dataset(10, 1, None);
        assert!(fit_forest(&ds, ForestParams { n_trees: 0, ..Default::default() }, 1).is_err());
        assert!(
            fit_forest(&ds, ForestParams { max_features: Some(10), ..Default::default() }, 1)
                .is_err()
        );
        assert!(
            fit_forest(&ds, ForestParams { min_samples_leaf: 0, ..Default::default() }, 1).is_err()
        );
    }
}
