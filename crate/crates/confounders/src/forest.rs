//! From-scratch binary-classification random forest: CART trees split on
//! Gini impurity, bootstrap bagging, per-node feature subsampling, and
//! probability prediction by averaged leaf vote fractions.
//!
//! Training is deterministic in `(data, params)`: tree `t` draws every
//! random decision from the stream `(params.seed, t)`, so the result is
//! independent of how many threads build the ensemble.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::rng::stream_rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    /// Number of trees in the ensemble.
    pub n_trees: usize,
    /// Maximum tree depth; `None` grows until other stops apply.
    pub max_depth: Option<usize>,
    /// Minimum samples a node needs before a split is attempted.
    pub min_samples_split: usize,
    /// Minimum samples each child of a split must keep.
    pub min_samples_leaf: usize,
    /// Features drawn (without replacement) per node; `None` means
    /// `floor(sqrt(p))`.
    pub mtry: Option<usize>,
    /// Seed for all bootstrap and feature-subset draws.
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            mtry: None,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn mtry_for(&self, p: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| (p as f64).sqrt().floor() as usize)
            .max(1)
    }

    fn validate(&self, p: usize) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidParam { reason });
        if self.n_trees == 0 {
            return fail("n_trees must be >= 1".into());
        }
        if self.min_samples_split < 2 {
            return fail("min_samples_split must be >= 2".into());
        }
        if self.min_samples_leaf < 1 {
            return fail("min_samples_leaf must be >= 1".into());
        }
        if let Some(m) = self.mtry {
            if m < 1 || m > p {
                return fail(format!("mtry must be in [1, {p}], got {m}"));
            }
        }
        Ok(())
    }
}

/// A binary decision tree. Internal nodes route a sample left when
/// `row[feature_index] <= threshold`, right otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// Positive fraction of the training subsample that reached this leaf.
        positive_fraction: f64,
        sample_count: usize,
    },
}

impl TreeNode {
    fn route(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf {
                    positive_fraction, ..
                } => return *positive_fraction,
                TreeNode::Internal {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature_index] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

/// A trained ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    trees: Vec<TreeNode>,
    p: usize,
}

impl Forest {
    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    /// Feature count the forest was trained on.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Mean leaf vote fraction over all trees; always in [0, 1].
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.route(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// Positive iff `predict_proba > threshold`; a probability exactly equal
    /// to the threshold is negative.
    pub fn predict(&self, row: &[f64], threshold: f64) -> Result<bool> {
        Ok(self.predict_proba(row)? > threshold)
    }
}

/// Gini impurity of a non-empty set of binary labels:
/// `1 - q^2 - (1-q)^2` where `q` is the positive fraction.
pub fn gini(labels: &[bool]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput { what: "labels" });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    Ok(gini_counts(pos, labels.len()))
}

fn gini_counts(pos: usize, total: usize) -> f64 {
    let q = pos as f64 / total as f64;
    1.0 - q * q - (1.0 - q) * (1.0 - q)
}

/// A chosen split: route left when `value <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature_index: usize,
    pub threshold: f64,
    /// Child-size-weighted mean Gini impurity of the two children.
    pub weighted_impurity: f64,
}

/// Best split of `indices` (rows into `rows`) over `feature_subset`.
///
/// Candidate thresholds are midpoints between consecutive distinct sorted
/// values of each feature. Returns `None` when the node is pure, when every
/// candidate feature is constant, or when no split keeps
/// `min_samples_leaf` samples in both children. Impurity ties break toward
/// the lower feature index, then the lower threshold, so the result does
/// not depend on the order of `feature_subset`.
pub fn best_split(
    rows: &[Vec<f64>],
    labels: &[bool],
    indices: &[usize],
    feature_subset: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    let total = indices.len();
    if total < 2 {
        return None;
    }
    let total_pos = indices.iter().filter(|&&i| labels[i]).count();
    if total_pos == 0 || total_pos == total {
        return None; // pure parent
    }

    let mut best: Option<Split> = None;
    let mut scratch: Vec<(f64, bool)> = Vec::with_capacity(total);

    for &f in feature_subset {
        scratch.clear();
        scratch.extend(indices.iter().map(|&i| (rows[i][f], labels[i])));
        scratch.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

        let mut left_n = 0usize;
        let mut left_pos = 0usize;
        for k in 0..total - 1 {
            left_n += 1;
            if scratch[k].1 {
                left_pos += 1;
            }
            let (a, b) = (scratch[k].0, scratch[k + 1].0);
            if a == b {
                continue;
            }
            let right_n = total - left_n;
            if left_n < min_samples_leaf || right_n < min_samples_leaf {
                continue;
            }
            // midpoint, nudged down if rounding lands on the upper value
            let mut threshold = a + (b - a) / 2.0;
            if threshold >= b {
                threshold = a;
            }
            let right_pos = total_pos - left_pos;
            let weighted = (left_n as f64 * gini_counts(left_pos, left_n)
                + right_n as f64 * gini_counts(right_pos, right_n))
                / total as f64;
            let candidate = Split {
                feature_index: f,
                threshold,
                weighted_impurity: weighted,
            };
            let better = match &best {
                None => true,
                Some(cur) => {
                    weighted < cur.weighted_impurity
                        || (weighted == cur.weighted_impurity
                            && (f, threshold) < (cur.feature_index, cur.threshold))
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    best
}

/// Grow a single CART tree over all of `rows`, drawing a fresh size-`mtry`
/// feature subset from `rng` at every node.
///
/// `rows` must be non-empty and rectangular.
pub fn grow_tree(
    rows: &[Vec<f64>],
    labels: &[bool],
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> TreeNode {
    assert!(!rows.is_empty(), "grow_tree requires at least one row");
    let p = rows[0].len();
    let indices: Vec<usize> = (0..rows.len()).collect();
    grow(rows, labels, &indices, params, p, rng, 0)
}

fn leaf(labels: &[bool], indices: &[usize]) -> TreeNode {
    let pos = indices.iter().filter(|&&i| labels[i]).count();
    TreeNode::Leaf {
        positive_fraction: pos as f64 / indices.len() as f64,
        sample_count: indices.len(),
    }
}

fn grow(
    rows: &[Vec<f64>],
    labels: &[bool],
    indices: &[usize],
    params: &ForestParams,
    p: usize,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> TreeNode {
    let pos = indices.iter().filter(|&&i| labels[i]).count();
    let pure = pos == 0 || pos == indices.len();
    let depth_capped = params.max_depth.is_some_and(|d| depth >= d);
    if pure || depth_capped || indices.len() < params.min_samples_split {
        return leaf(labels, indices);
    }

    let mtry = params.mtry_for(p);
    let mut subset = sample(rng, p, mtry).into_vec();
    subset.sort_unstable();

    let Some(split) = best_split(rows, labels, indices, &subset, params.min_samples_leaf) else {
        return leaf(labels, indices);
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .iter()
        .partition(|&&i| rows[i][split.feature_index] <= split.threshold);

    TreeNode::Internal {
        feature_index: split.feature_index,
        threshold: split.threshold,
        left: Box::new(grow(rows, labels, &left_idx, params, p, rng, depth + 1)),
        right: Box::new(grow(rows, labels, &right_idx, params, p, rng, depth + 1)),
    }
}

/// The size-`n` with-replacement draw used for each tree's training
/// subsample.
pub fn bootstrap_indices(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Train a forest on a feature matrix. Requires at least two rows and both
/// classes present.
pub fn fit(matrix: &FeatureMatrix, params: &ForestParams) -> Result<Forest> {
    fit_rows(&matrix.rows, &matrix.labels, params)
}

/// Train a forest directly on rows and labels.
pub fn fit_rows(rows: &[Vec<f64>], labels: &[bool], params: &ForestParams) -> Result<Forest> {
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            predictions: rows.len(),
        });
    }
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: rows.len(),
        });
    }
    let p = rows[0].len();
    if p == 0 {
        return Err(Error::EmptyInput { what: "features" });
    }
    params.validate(p)?;
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::SingleClass);
    }

    let n = rows.len();
    let trees: Vec<TreeNode> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(params.seed, t as u64);
            let sample_idx = bootstrap_indices(&mut rng, n);
            let (boot_rows, boot_labels): (Vec<Vec<f64>>, Vec<bool>) = sample_idx
                .iter()
                .map(|&i| (rows[i].clone(), labels[i]))
                .unzip();
            grow_tree(&boot_rows, &boot_labels, params, &mut rng)
        })
        .collect();

    Ok(Forest {
        params: params.clone(),
        trees,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn column(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn gini_pure_node_is_zero() {
        assert_eq!(gini(&[true, true, true, true]).unwrap(), 0.0);
    }

    #[test]
    fn gini_balanced_pair_is_half() {
        assert_eq!(gini(&[true, false]).unwrap(), 0.5);
    }

    #[test]
    fn gini_two_one_split() {
        let g = gini(&[true, true, false]).unwrap();
        assert!((g - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gini_empty_errors() {
        assert!(gini(&[]).is_err());
    }

    #[test]
    fn best_split_finds_clean_midpoint() {
        let rows = column(&[1.0, 2.0, 3.0, 4.0]);
        let labels = [false, false, true, true];
        let s = best_split(&rows, &labels, &[0, 1, 2, 3], &[0], 1).unwrap();
        assert_eq!(s.feature_index, 0);
        assert_eq!(s.threshold, 2.5);
        assert_eq!(s.weighted_impurity, 0.0);
    }

    #[test]
    fn best_split_constant_feature_is_none() {
        let rows = column(&[5.0, 5.0, 5.0]);
        let labels = [true, false, true];
        assert!(best_split(&rows, &labels, &[0, 1, 2], &[0], 1).is_none());
    }

    #[test]
    fn best_split_pure_parent_is_none() {
        let rows = column(&[1.0, 2.0, 3.0]);
        let labels = [true, true, true];
        assert!(best_split(&rows, &labels, &[0, 1, 2], &[0], 1).is_none());
    }

    #[test]
    fn best_split_respects_min_samples_leaf() {
        // only the middle threshold keeps 2 per side
        let rows = column(&[1.0, 2.0, 3.0, 4.0]);
        let labels = [false, true, false, true];
        let s = best_split(&rows, &labels, &[0, 1, 2, 3], &[0], 2).unwrap();
        assert_eq!(s.threshold, 2.5);
    }

    #[test]
    fn best_split_tie_breaks_to_lower_feature_then_threshold() {
        // two identical features and mirror-symmetric labels: thresholds
        // 1.5 and 3.5 produce bit-identical weighted impurities
        // (3 * gini(2,3) / 4), and both features tie everywhere
        let rows: Vec<Vec<f64>> = [1.0, 2.0, 3.0, 4.0].iter().map(|&v| vec![v, v]).collect();
        let labels = [false, true, true, false];
        let s = best_split(&rows, &labels, &[0, 1, 2, 3], &[1, 0], 1).unwrap();
        assert_eq!(s.feature_index, 0);
        assert_eq!(s.threshold, 1.5);
    }

    #[test]
    fn grow_single_sample_is_leaf() {
        let rows = column(&[3.0]);
        let labels = [true];
        let mut rng = stream_rng(0, 0);
        let t = grow_tree(&rows, &labels, &ForestParams::default(), &mut rng);
        assert_eq!(
            t,
            TreeNode::Leaf {
                positive_fraction: 1.0,
                sample_count: 1
            }
        );
    }

    #[test]
    fn grow_separable_four_samples_is_depth_one() {
        let rows = column(&[1.0, 2.0, 3.0, 4.0]);
        let labels = [false, false, true, true];
        let mut rng = stream_rng(1, 0);
        let t = grow_tree(&rows, &labels, &ForestParams::default(), &mut rng);
        match t {
            TreeNode::Internal {
                threshold,
                left,
                right,
                ..
            } => {
                assert_eq!(threshold, 2.5);
                assert_eq!(
                    *left,
                    TreeNode::Leaf {
                        positive_fraction: 0.0,
                        sample_count: 2
                    }
                );
                assert_eq!(
                    *right,
                    TreeNode::Leaf {
                        positive_fraction: 1.0,
                        sample_count: 2
                    }
                );
            }
            other => panic!("expected internal root, got {other:?}"),
        }
    }

    #[test]
    fn grow_depth_zero_is_prior_leaf() {
        let rows = column(&[1.0, 2.0, 3.0, 4.0]);
        let labels = [false, true, true, true];
        let params = ForestParams {
            max_depth: Some(0),
            ..ForestParams::default()
        };
        let mut rng = stream_rng(2, 0);
        let t = grow_tree(&rows, &labels, &params, &mut rng);
        assert_eq!(
            t,
            TreeNode::Leaf {
                positive_fraction: 0.75,
                sample_count: 4
            }
        );
    }

    fn separable(n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
        // two features; label decided by a known threshold rule on feature 0
        let mut rng = stream_rng(99, 0);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
            .collect();
        let labels: Vec<bool> = rows.iter().map(|r| r[0] > 5.0).collect();
        (rows, labels)
    }

    #[test]
    fn fit_rejects_single_class() {
        let rows = column(&[1.0, 2.0]);
        assert!(matches!(
            fit_rows(&rows, &[true, true], &ForestParams::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn fit_is_deterministic_for_fixed_seed() {
        let (rows, labels) = separable(60);
        let params = ForestParams {
            seed: 42,
            ..ForestParams::default()
        };
        let a = fit_rows(&rows, &labels, &params).unwrap();
        let b = fit_rows(&rows, &labels, &params).unwrap();
        for probe in &rows {
            assert_eq!(
                a.predict_proba(probe).unwrap(),
                b.predict_proba(probe).unwrap()
            );
        }
    }

    #[test]
    fn fit_separable_reaches_high_training_accuracy() {
        let (rows, labels) = separable(100);
        let forest = fit_rows(&rows, &labels, &ForestParams::default()).unwrap();
        let correct = rows
            .iter()
            .zip(&labels)
            .filter(|(r, &l)| forest.predict(r, 0.5).unwrap() == l)
            .count();
        assert!(correct as f64 / rows.len() as f64 >= 0.99);
    }

    #[test]
    fn predict_proba_single_leaf_tree() {
        let forest = Forest {
            params: ForestParams::default(),
            trees: vec![TreeNode::Leaf {
                positive_fraction: 0.7,
                sample_count: 10,
            }],
            p: 3,
        };
        assert_eq!(forest.predict_proba(&[0.0, 0.0, 0.0]).unwrap(), 0.7);
    }

    #[test]
    fn predict_proba_averages_trees() {
        let forest = Forest {
            params: ForestParams::default(),
            trees: vec![
                TreeNode::Leaf {
                    positive_fraction: 0.2,
                    sample_count: 1,
                },
                TreeNode::Leaf {
                    positive_fraction: 0.6,
                    sample_count: 1,
                },
            ],
            p: 1,
        };
        let p = forest.predict_proba(&[1.0]).unwrap();
        assert!((p - 0.4).abs() < 1e-15);
    }

    #[test]
    fn predict_proba_rejects_dimension_mismatch() {
        let (rows, labels) = separable(10);
        let forest = fit_rows(&rows, &labels, &ForestParams::default()).unwrap();
        assert!(matches!(
            forest.predict_proba(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn predict_tie_is_negative() {
        let forest = Forest {
            params: ForestParams::default(),
            trees: vec![TreeNode::Leaf {
                positive_fraction: 0.5,
                sample_count: 2,
            }],
            p: 1,
        };
        assert!(!forest.predict(&[0.0], 0.5).unwrap());
        assert!(forest.predict(&[0.0], 0.49).unwrap());
    }

    #[test]
    fn predict_threshold_one_is_never_positive() {
        let (rows, labels) = separable(30);
        let forest = fit_rows(&rows, &labels, &ForestParams::default()).unwrap();
        for r in &rows {
            assert!(!forest.predict(r, 1.0).unwrap());
        }
    }

    #[test]
    fn forest_serializes_to_json_and_back() {
        let (rows, labels) = separable(20);
        let params = ForestParams {
            n_trees: 5,
            seed: 3,
            ..ForestParams::default()
        };
        let forest = fit_rows(&rows, &labels, &params).unwrap();
        let json = serde_json::to_string(&forest).unwrap();
        let back: Forest = serde_json::from_str(&json).unwrap();
        for r in &rows {
            assert_eq!(
                forest.predict_proba(r).unwrap(),
                back.predict_proba(r).unwrap()
            );
        }
    }

    #[test]
    fn bootstrap_unique_fraction_near_one_minus_inv_e() {
        let n = 116;
        let mut total = 0.0;
        for t in 0..100u64 {
            let mut rng = stream_rng(42, t);
            let idx = bootstrap_indices(&mut rng, n);
            let mut seen = vec![false; n];
            for i in idx {
                seen[i] = true;
            }
            total += seen.iter().filter(|&&s| s).count() as f64 / n as f64;
        }
        let mean = total / 100.0;
        assert!(
            (0.58..=0.68).contains(&mean),
            "mean unique fraction {mean} outside [0.58, 0.68]"
        );
    }

    #[test]
    fn monotone_transform_of_one_feature_preserves_training_predictions() {
        let (rows, labels) = separable(40);
        let params = ForestParams {
            seed: 11,
            ..ForestParams::default()
        };
        let forest = fit_rows(&rows, &labels, &params).unwrap();

        // strictly increasing transform of feature 1
        let transformed: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![r[0], r[1].powi(3) + 2.0 * r[1]])
            .collect();
        let forest_t = fit_rows(&transformed, &labels, &params).unwrap();

        for (orig, trans) in rows.iter().zip(&transformed) {
            assert_eq!(
                forest.predict_proba(orig).unwrap(),
                forest_t.predict_proba(trans).unwrap()
            );
        }
    }

    // Exhaustive brute-force CART used as an oracle: enumerates every
    // feature and every midpoint threshold at each node, with the same
    // stopping rules and tie-breaks as the implementation.
    mod oracle {
        use super::*;

        pub fn grow_brute(
            rows: &[Vec<f64>],
            labels: &[bool],
            indices: &[usize],
            params: &ForestParams,
            depth: usize,
        ) -> TreeNode {
            let pos = indices.iter().filter(|&&i| labels[i]).count();
            let pure = pos == 0 || pos == indices.len();
            if pure
                || params.max_depth.is_some_and(|d| depth >= d)
                || indices.len() < params.min_samples_split
            {
                return leaf(labels, indices);
            }
            let p = rows[0].len();
            let all: Vec<usize> = (0..p).collect();
            let Some(split) = best_split(rows, labels, indices, &all, params.min_samples_leaf)
            else {
                return leaf(labels, indices);
            };
            // recompute the best split by full enumeration, independently
            let brute = enumerate_best(rows, labels, indices, params.min_samples_leaf)
                .expect("oracle finds a split when the implementation does");
            assert_eq!(
                (brute.feature_index, brute.threshold),
                (split.feature_index, split.threshold),
                "oracle split disagrees"
            );
            let (l, r): (Vec<usize>, Vec<usize>) = indices
                .iter()
                .partition(|&&i| rows[i][brute.feature_index] <= brute.threshold);
            TreeNode::Internal {
                feature_index: brute.feature_index,
                threshold: brute.threshold,
                left: Box::new(grow_brute(rows, labels, &l, params, depth + 1)),
                right: Box::new(grow_brute(rows, labels, &r, params, depth + 1)),
            }
        }

        #[allow(clippy::needless_range_loop)] // f is a column index
        fn enumerate_best(
            rows: &[Vec<f64>],
            labels: &[bool],
            indices: &[usize],
            min_leaf: usize,
        ) -> Option<Split> {
            let total = indices.len();
            let total_pos = indices.iter().filter(|&&i| labels[i]).count();
            if total_pos == 0 || total_pos == total {
                return None;
            }
            let p = rows[0].len();
            let mut best: Option<Split> = None;
            for f in 0..p {
                let mut vals: Vec<f64> = indices.iter().map(|&i| rows[i][f]).collect();
                vals.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                vals.dedup();
                for w in vals.windows(2) {
                    let mut t = w[0] + (w[1] - w[0]) / 2.0;
                    if t >= w[1] {
                        t = w[0];
                    }
                    let left: Vec<usize> = indices
                        .iter()
                        .copied()
                        .filter(|&i| rows[i][f] <= t)
                        .collect();
                    let right_n = total - left.len();
                    if left.len() < min_leaf || right_n < min_leaf {
                        continue;
                    }
                    let lp = left.iter().filter(|&&i| labels[i]).count();
                    let rp = total_pos - lp;
                    let weighted = (left.len() as f64 * gini_counts(lp, left.len())
                        + right_n as f64 * gini_counts(rp, right_n))
                        / total as f64;
                    let cand = Split {
                        feature_index: f,
                        threshold: t,
                        weighted_impurity: weighted,
                    };
                    let better = match &best {
                        None => true,
                        Some(cur) => {
                            weighted < cur.weighted_impurity
                                || (weighted == cur.weighted_impurity
                                    && (f, t) < (cur.feature_index, cur.threshold))
                        }
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
            best
        }
    }

    #[test]
    fn single_tree_matches_brute_force_cart_on_small_instances() {
        // values drawn from a small grid to force duplicate values and
        // impurity ties; every instance n <= 8, p <= 2, mtry = p
        let grid = [0.0, 1.0, 2.0, 3.0];
        let mut rng = stream_rng(7, 0);
        let mut checked = 0;
        for case in 0..300u32 {
            let n = 2 + (case as usize % 7); // 2..=8
            let p = 1 + (case as usize % 2); // 1..=2
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..p).map(|_| grid[rng.gen_range(0..grid.len())]).collect())
                .collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            for max_depth in [Some(1), Some(2), None] {
                let params = ForestParams {
                    mtry: Some(p),
                    max_depth,
                    ..ForestParams::default()
                };
                let mut grow_rng = stream_rng(13, case as u64);
                let tree = grow_tree(&rows, &labels, &params, &mut grow_rng);
                let all: Vec<usize> = (0..n).collect();
                let brute = oracle::grow_brute(&rows, &labels, &all, &params, 0);
                for r in &rows {
                    assert_eq!(tree.route(r), brute.route(r), "case {case}");
                }
                checked += 1;
            }
        }
        assert_eq!(checked, 900);
    }
}
