//! Random-forest classifier over feature rows with missing values.
//!
//! Each tree trains on a bootstrap sample using a random subset of
//! features (drawn once per tree by default, per split optionally), with
//! Gini-impurity splits at midpoints of observed values. A sample whose
//! split feature is missing follows the branch that received the majority
//! of the non-missing training samples at that node. Each tree casts one
//! vote — the majority class of the leaf it lands in — and the forest
//! predicts the plurality class, all ties breaking toward the smaller
//! class id. Training is deterministic given (data, config, seed), down to
//! byte-identical serialized form.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Model;
use crate::seeds::derive_seed;

/// Default number of trees.
pub const DEFAULT_TREES: usize = 300;

/// Default number of candidate features per tree.
pub const DEFAULT_FEATURES_PER_TREE: usize = 5;

/// When the per-tree feature subset is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSampling {
    /// One subset per tree; every split in the tree searches it.
    PerTree,
    /// A fresh subset at every split.
    PerSplit,
}

/// Training-time knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub features_per_tree: usize,
    /// None = grow until pure or out of samples.
    pub max_depth: Option<usize>,
    /// Minimum samples a child may hold.
    pub min_leaf: usize,
    /// Draw a with-replacement sample of the rows for each tree.
    pub bootstrap: bool,
    pub feature_sampling: FeatureSampling,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: DEFAULT_TREES,
            features_per_tree: DEFAULT_FEATURES_PER_TREE,
            max_depth: None,
            min_leaf: 1,
            bootstrap: true,
            feature_sampling: FeatureSampling::PerTree,
        }
    }
}

/// One tree node; children are indices into the tree's node arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        /// Where a missing value goes; true = left.
        missing_left: bool,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Training-sample counts aligned to the forest's class list.
        histogram: Vec<u32>,
    },
}

/// A single trained decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Features this tree was allowed to split on (every feature under
    /// per-split sampling).
    feature_subset: Vec<usize>,
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    /// Leaf histogram for a row, routing missing values down each split's
    /// designated branch.
    fn leaf_histogram(&self, row: &[Option<f64>]) -> &[u32] {
        let mut index = 0;
        loop {
            match &self.nodes[index] {
                TreeNode::Leaf { histogram } => return histogram,
                TreeNode::Split {
                    feature,
                    threshold,
                    missing_left,
                    left,
                    right,
                } => {
                    let go_left = match row[*feature] {
                        Some(v) => v <= *threshold,
                        None => *missing_left,
                    };
                    index = if go_left { *left } else { *right };
                }
            }
        }
    }

    /// This tree's single vote: the majority class of the landing leaf,
    /// ties toward the smaller class id (= lower index).
    fn vote(&self, row: &[Option<f64>]) -> usize {
        let histogram = self.leaf_histogram(row);
        let mut best = 0;
        for (i, &count) in histogram.iter().enumerate() {
            if count > histogram[best] {
                best = i;
            }
        }
        best
    }
}

/// The trained ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub config: ForestConfig,
    pub seed: u64,
    /// Ascending class ids seen at training time.
    pub classes: Vec<u32>,
    /// Expected row length.
    pub dimension: usize,
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Trains `config.n_trees` trees. Requires at least two distinct
    /// classes — a single-class problem needs no forest, just the
    /// constant majority predictor.
    pub fn train(
        rows: &[Vec<Option<f64>>],
        labels: &[u32],
        config: &ForestConfig,
        seed: u64,
    ) -> Result<RandomForest> {
        if rows.is_empty() {
            return Err(Error::Training("no training rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::LabelLengthMismatch {
                predicted: rows.len(),
                actual: labels.len(),
            });
        }
        let dimension = rows[0].len();
        if dimension == 0 {
            return Err(Error::Training("rows have no features".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: bad.len(),
            });
        }
        let mut classes: Vec<u32> = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(Error::Training(
                "training labels hold a single class; use the constant majority predictor instead"
                    .into(),
            ));
        }
        if config.n_trees < 1 {
            return Err(Error::InvalidParameter("n_trees must be >= 1".into()));
        }
        if config.min_leaf < 1 {
            return Err(Error::InvalidParameter("min_leaf must be >= 1".into()));
        }
        if config.features_per_tree < 1 || config.features_per_tree > dimension {
            return Err(Error::InvalidParameter(format!(
                "features_per_tree must be in 1..={dimension}, got {}",
                config.features_per_tree
            )));
        }
        let class_index = |label: u32| classes.binary_search(&label).expect("label seen above");
        let y: Vec<usize> = labels.iter().map(|&l| class_index(l)).collect();
        let trees = (0..config.n_trees)
            .map(|t| {
                let tree_seed = derive_seed(seed, &format!("tree-{t}"));
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
                let sample: Vec<usize> = if config.bootstrap {
                    (0..rows.len()).map(|_| rng.gen_range(0..rows.len())).collect()
                } else {
                    (0..rows.len()).collect()
                };
                let subset = match config.feature_sampling {
                    FeatureSampling::PerTree => {
                        sample_features(&mut rng, dimension, config.features_per_tree)
                    }
                    FeatureSampling::PerSplit => (0..dimension).collect(),
                };
                let mut builder = TreeBuilder {
                    rows,
                    y: &y,
                    n_classes: classes.len(),
                    config,
                    dimension,
                    rng,
                    nodes: Vec::new(),
                };
                let subset_for_split = match config.feature_sampling {
                    FeatureSampling::PerTree => Some(subset.clone()),
                    FeatureSampling::PerSplit => None,
                };
                builder.grow(sample, 0, &subset_for_split);
                DecisionTree {
                    feature_subset: subset,
                    nodes: builder.nodes,
                }
            })
            .collect();
        Ok(RandomForest {
            config: config.clone(),
            seed,
            classes,
            dimension,
            trees,
        })
    }

    /// Per-class vote counts for a row; sums to `config.n_trees`.
    pub fn votes(&self, row: &[Option<f64>]) -> Result<Vec<usize>> {
        if row.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: row.len(),
            });
        }
        let mut votes = vec![0usize; self.classes.len()];
        for tree in &self.trees {
            votes[tree.vote(row)] += 1;
        }
        Ok(votes)
    }

    /// Plurality class over tree votes; ties toward the smaller class id.
    pub fn predict_row(&self, row: &[Option<f64>]) -> Result<u32> {
        let votes = self.votes(row)?;
        let mut best = 0;
        for (i, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = i;
            }
        }
        Ok(self.classes[best])
    }

    pub fn predict_batch(&self, rows: &[Vec<Option<f64>>]) -> Result<Vec<u32>> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

impl Model<Vec<Option<f64>>> for RandomForest {
    fn predict_one(&mut self, row: &Vec<Option<f64>>) -> u32 {
        self.predict_row(row).expect("row dimension fixed by training data")
    }
}

/// Draws `count` distinct feature ids from `0..dimension`, returned sorted
/// so split search order is stable.
fn sample_features(rng: &mut ChaCha8Rng, dimension: usize, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..dimension).collect();
    for i in 0..count {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut chosen = pool[..count].to_vec();
    chosen.sort_unstable();
    chosen
}

struct TreeBuilder<'a> {
    rows: &'a [Vec<Option<f64>>],
    /// Class index (into the forest's class list) per row.
    y: &'a [usize],
    n_classes: usize,
    config: &'a ForestConfig,
    dimension: usize,
    rng: ChaCha8Rng,
    nodes: Vec<TreeNode>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    missing_left: bool,
    score: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl TreeBuilder<'_> {
    /// Builds the subtree for `samples`, returning its node index.
    /// `fixed_subset` is Some for per-tree feature sampling; None draws a
    /// fresh subset at this split.
    fn grow(&mut self, samples: Vec<usize>, depth: usize, fixed_subset: &Option<Vec<usize>>) -> usize {
        let histogram = self.histogram(&samples);
        let n_present = samples.len();
        let pure = histogram.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.config.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || n_present < 2 * self.config.min_leaf {
            return self.push_leaf(histogram);
        }
        let subset = match fixed_subset {
            Some(s) => s.clone(),
            None => sample_features(&mut self.rng, self.dimension, self.config.features_per_tree),
        };
        let parent_gini = gini(&histogram, samples.len());
        match self.best_split(&samples, &subset, parent_gini) {
            Some(split) => {
                let index = self.nodes.len();
                // Reserve the slot so child indices land after it.
                self.nodes.push(TreeNode::Leaf { histogram: Vec::new() });
                let left = self.grow(split.left, depth + 1, fixed_subset);
                let right = self.grow(split.right, depth + 1, fixed_subset);
                self.nodes[index] = TreeNode::Split {
                    feature: split.feature,
                    threshold: split.threshold,
                    missing_left: split.missing_left,
                    left,
                    right,
                };
                index
            }
            None => self.push_leaf(histogram),
        }
    }

    fn push_leaf(&mut self, histogram: Vec<u32>) -> usize {
        self.nodes.push(TreeNode::Leaf { histogram });
        self.nodes.len() - 1
    }

    fn histogram(&self, samples: &[usize]) -> Vec<u32> {
        let mut h = vec![0u32; self.n_classes];
        for &s in samples {
            h[self.y[s]] += 1;
        }
        h
    }

    /// Scans every candidate (feature, midpoint threshold) and returns the
    /// split with the lowest weighted child Gini, provided it strictly
    /// improves on the parent. Missing-value samples join whichever child
    /// took the majority of the non-missing ones (ties go left), and the
    /// score is computed over the full resulting partition.
    fn best_split(
        &mut self,
        samples: &[usize],
        subset: &[usize],
        parent_gini: f64,
    ) -> Option<BestSplit> {
        let mut best: Option<BestSplit> = None;
        for &feature in subset {
            let mut present: Vec<(f64, usize)> = Vec::with_capacity(samples.len());
            let mut missing: Vec<usize> = Vec::new();
            for &s in samples {
                match self.rows[s][feature] {
                    Some(v) => present.push((v, s)),
                    None => missing.push(s),
                }
            }
            if present.len() < 2 {
                continue;
            }
            present.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut missing_hist = vec![0u32; self.n_classes];
            for &s in &missing {
                missing_hist[self.y[s]] += 1;
            }
            let total_hist = self.histogram(samples);
            let mut left_hist = vec![0u32; self.n_classes];
            for cut in 1..present.len() {
                left_hist[self.y[present[cut - 1].1]] += 1;
                let (prev, next) = (present[cut - 1].0, present[cut].0);
                if prev == next {
                    continue;
                }
                let threshold = prev + (next - prev) / 2.0;
                let n_left = cut;
                let n_right = present.len() - cut;
                let missing_left = n_left >= n_right;
                let (n_left_all, n_right_all) = if missing_left {
                    (n_left + missing.len(), n_right)
                } else {
                    (n_left, n_right + missing.len())
                };
                if n_left_all < self.config.min_leaf || n_right_all < self.config.min_leaf {
                    continue;
                }
                let mut score = 0.0;
                let total = samples.len() as f64;
                // Weighted Gini over the two children, missing included.
                let mut left_sq = 0.0;
                let mut right_sq = 0.0;
                for c in 0..self.n_classes {
                    let l = left_hist[c] + if missing_left { missing_hist[c] } else { 0 };
                    let r = total_hist[c] - l;
                    left_sq += (l as f64) * (l as f64);
                    right_sq += (r as f64) * (r as f64);
                }
                score += (n_left_all as f64) * (1.0 - left_sq / ((n_left_all * n_left_all) as f64));
                score +=
                    (n_right_all as f64) * (1.0 - right_sq / ((n_right_all * n_right_all) as f64));
                score /= total;
                let improves = score < parent_gini - 1e-12;
                let beats_best = best.as_ref().map_or(true, |b| score < b.score - 1e-12);
                if improves && beats_best {
                    let mut left = Vec::with_capacity(n_left_all);
                    let mut right = Vec::with_capacity(n_right_all);
                    for &(_, s) in &present[..cut] {
                        left.push(s);
                    }
                    for &(_, s) in &present[cut..] {
                        right.push(s);
                    }
                    if missing_left {
                        left.extend_from_slice(&missing);
                    } else {
                        right.extend_from_slice(&missing);
                    }
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        missing_left,
                        score,
                        left,
                        right,
                    });
                }
            }
        }
        best
    }
}

/// Gini impurity of a class histogram over `n` samples.
fn gini(histogram: &[u32], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = histogram.iter().map(|&c| (c as f64) * (c as f64)).sum();
    1.0 - sq / ((n * n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_1d(values: &[f64]) -> Vec<Vec<Option<f64>>> {
        values.iter().map(|&v| vec![Some(v)]).collect()
    }

    fn sign_data(count: usize) -> (Vec<Vec<Option<f64>>>, Vec<u32>) {
        // Deterministic pseudo-grid in [-1, 1] excluding 0.
        let values: Vec<f64> = (0..count)
            .map(|i| {
                let x = (i as f64 + 0.5) / count as f64 * 2.0 - 1.0;
                if x == 0.0 {
                    0.01
                } else {
                    x
                }
            })
            .collect();
        let labels = values.iter().map(|&v| if v < 0.0 { 1 } else { 2 }).collect();
        (rows_1d(&values), labels)
    }

    #[test]
    fn separable_data_is_learned() {
        let (rows, labels) = sign_data(200);
        let config = ForestConfig {
            n_trees: 25,
            features_per_tree: 1,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 3).unwrap();
        let predictions = forest.predict_batch(&rows).unwrap();
        let correct = predictions
            .iter()
            .zip(&labels)
            .filter(|(p, l)| p == l)
            .count();
        assert!(correct as f64 / rows.len() as f64 >= 0.99);
    }

    #[test]
    fn constant_features_predict_modal_class() {
        let rows: Vec<Vec<Option<f64>>> = (0..30).map(|_| vec![Some(1.0), Some(2.0)]).collect();
        let labels: Vec<u32> = (0..30).map(|i| if i < 20 { 3 } else { 5 }).collect();
        let config = ForestConfig {
            n_trees: 15,
            features_per_tree: 2,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 1).unwrap();
        for row in &rows {
            assert_eq!(forest.predict_row(row).unwrap(), 3);
        }
    }

    #[test]
    fn training_is_byte_reproducible() {
        let (rows, labels) = sign_data(60);
        let config = ForestConfig {
            n_trees: 10,
            features_per_tree: 1,
            ..ForestConfig::default()
        };
        let a = RandomForest::train(&rows, &labels, &config, 42).unwrap();
        let b = RandomForest::train(&rows, &labels, &config, 42).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let c = RandomForest::train(&rows, &labels, &config, 43).unwrap();
        assert_ne!(ja, serde_json::to_string(&c).unwrap());
    }

    #[test]
    fn serialization_round_trips() {
        let (rows, labels) = sign_data(60);
        let config = ForestConfig {
            n_trees: 5,
            features_per_tree: 1,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 9).unwrap();
        let json = serde_json::to_string(&forest).unwrap();
        let back: RandomForest = serde_json::from_str(&json).unwrap();
        assert_eq!(forest, back);
        assert_eq!(
            forest.predict_batch(&rows).unwrap(),
            back.predict_batch(&rows).unwrap()
        );
    }

    #[test]
    fn tied_votes_choose_smaller_class() {
        // Two single-leaf trees voting for different classes.
        let json = r#"{
            "config": {"n_trees": 2, "features_per_tree": 1, "max_depth": null,
                       "min_leaf": 1, "bootstrap": true, "feature_sampling": "per_tree"},
            "seed": 0,
            "classes": [2, 7],
            "dimension": 1,
            "trees": [
                {"feature_subset": [0], "nodes": [{"leaf": {"histogram": [5, 0]}}]},
                {"feature_subset": [0], "nodes": [{"leaf": {"histogram": [0, 5]}}]}
            ]
        }"#;
        let forest: RandomForest = serde_json::from_str(json).unwrap();
        assert_eq!(forest.predict_row(&[Some(0.0)]).unwrap(), 2);
        assert_eq!(forest.votes(&[Some(0.0)]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn votes_sum_to_tree_count() {
        let (rows, labels) = sign_data(50);
        let config = ForestConfig {
            n_trees: 17,
            features_per_tree: 1,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 2).unwrap();
        for row in &rows {
            assert_eq!(forest.votes(row).unwrap().iter().sum::<usize>(), 17);
        }
    }

    #[test]
    fn missing_values_route_without_failure() {
        // Feature 0 separates; feature 1 is missing for half the rows.
        let rows: Vec<Vec<Option<f64>>> = (0..40)
            .map(|i| {
                let x = i as f64 - 19.5;
                let aux = if i % 2 == 0 { Some(i as f64) } else { None };
                vec![Some(x), aux]
            })
            .collect();
        let labels: Vec<u32> = (0..40).map(|i| if i < 20 { 1 } else { 2 }).collect();
        let config = ForestConfig {
            n_trees: 20,
            features_per_tree: 2,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 5).unwrap();
        let p = forest.predict_row(&[Some(-3.0), None]).unwrap();
        assert_eq!(p, 1);
        let q = forest.predict_row(&[Some(3.0), None]).unwrap();
        assert_eq!(q, 2);
    }

    #[test]
    fn single_class_is_rejected() {
        let rows = rows_1d(&[1.0, 2.0, 3.0]);
        let err = RandomForest::train(&rows, &[4, 4, 4], &ForestConfig::default(), 0).unwrap_err();
        match err {
            Error::Training(msg) => assert!(msg.contains("majority")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (rows, labels) = sign_data(30);
        let config = ForestConfig {
            n_trees: 3,
            features_per_tree: 1,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 0).unwrap();
        assert!(forest.predict_row(&[Some(1.0), Some(2.0)]).is_err());
        let ragged = vec![vec![Some(1.0)], vec![Some(1.0), Some(2.0)]];
        assert!(RandomForest::train(&ragged, &[1, 2], &config, 0).is_err());
    }

    #[test]
    fn oversized_feature_request_is_rejected() {
        let (rows, labels) = sign_data(30);
        let config = ForestConfig {
            n_trees: 3,
            features_per_tree: 2,
            ..ForestConfig::default()
        };
        assert!(RandomForest::train(&rows, &labels, &config, 0).is_err());
    }

    #[test]
    fn per_split_sampling_is_deterministic() {
        let rows: Vec<Vec<Option<f64>>> = (0..60)
            .map(|i| vec![Some(i as f64), Some((i * 7 % 13) as f64), Some(-(i as f64))])
            .collect();
        let labels: Vec<u32> = (0..60).map(|i| if i < 30 { 1 } else { 2 }).collect();
        let config = ForestConfig {
            n_trees: 10,
            features_per_tree: 2,
            feature_sampling: FeatureSampling::PerSplit,
            ..ForestConfig::default()
        };
        let a = RandomForest::train(&rows, &labels, &config, 8).unwrap();
        let b = RandomForest::train(&rows, &labels, &config, 8).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let predictions = a.predict_batch(&rows).unwrap();
        let correct = predictions.iter().zip(&labels).filter(|(p, l)| p == l).count();
        assert!(correct >= 58);
    }

    #[test]
    fn perfect_separator_with_all_features_generalizes() {
        // Feature 1 separates perfectly; feature 0 is noise-ish but
        // deterministic. With every feature available to every tree, held-out
        // points classify perfectly.
        let rows: Vec<Vec<Option<f64>>> = (0..100)
            .map(|i| vec![Some((i * 37 % 101) as f64), Some(i as f64)])
            .collect();
        let labels: Vec<u32> = (0..100).map(|i| if i < 50 { 1 } else { 2 }).collect();
        let config = ForestConfig {
            n_trees: 30,
            features_per_tree: 2,
            ..ForestConfig::default()
        };
        let forest = RandomForest::train(&rows, &labels, &config, 4).unwrap();
        assert_eq!(forest.predict_row(&[Some(50.0), Some(-10.0)]).unwrap(), 1);
        assert_eq!(forest.predict_row(&[Some(50.0), Some(200.0)]).unwrap(), 2);
    }

    #[test]
    fn affine_rescaling_preserves_predictions_exactly() {
        // Integer-valued feature grid: an affine map x → 4x + 3 keeps
        // training values, midpoints, and query points exactly
        // representable, so the trees are structurally identical.
        let rows: Vec<Vec<Option<f64>>> = (0..80)
            .map(|i| vec![Some((i % 40) as f64), Some(((i * 13) % 17) as f64)])
            .collect();
        let labels: Vec<u32> = (0..80)
            .map(|i| if (i % 40) < 13 { 1 } else if (i % 40) < 26 { 2 } else { 3 })
            .collect();
        let transform = |r: &Vec<Option<f64>>| {
            vec![r[0].map(|v| 4.0 * v + 3.0), r[1]]
        };
        let rows_t: Vec<Vec<Option<f64>>> = rows.iter().map(transform).collect();
        let config = ForestConfig {
            n_trees: 20,
            features_per_tree: 2,
            ..ForestConfig::default()
        };
        let a = RandomForest::train(&rows, &labels, &config, 11).unwrap();
        let b = RandomForest::train(&rows_t, &labels, &config, 11).unwrap();
        // Held-out integer queries, same transform.
        for q in 0..40 {
            for aux in [0.0, 5.0, 16.0] {
                let plain = vec![Some(q as f64 + 0.5), Some(aux)];
                let scaled = transform(&plain);
                assert_eq!(
                    a.predict_row(&plain).unwrap(),
                    b.predict_row(&scaled).unwrap(),
                    "query {q} aux {aux}"
                );
            }
        }
    }

    #[test]
    fn monotone_rescaling_preserves_training_predictions() {
        // A cubic is monotone but nonlinear: midpoints shift, yet every
        // training row keeps its side of every split, so training-row
        // predictions are unchanged.
        let rows: Vec<Vec<Option<f64>>> = (0..60)
            .map(|i| vec![Some(i as f64 - 30.0), Some(((i * 7) % 11) as f64)])
            .collect();
        let labels: Vec<u32> = (0..60)
            .map(|i| if i < 20 { 1 } else if i < 40 { 2 } else { 3 })
            .collect();
        let transform = |r: &Vec<Option<f64>>| {
            vec![r[0].map(|v| v * v * v), r[1]]
        };
        let rows_t: Vec<Vec<Option<f64>>> = rows.iter().map(transform).collect();
        let config = ForestConfig {
            n_trees: 20,
            features_per_tree: 2,
            ..ForestConfig::default()
        };
        let a = RandomForest::train(&rows, &labels, &config, 13).unwrap();
        let b = RandomForest::train(&rows_t, &labels, &config, 13).unwrap();
        for (plain, scaled) in rows.iter().zip(&rows_t) {
            assert_eq!(
                a.predict_row(plain).unwrap(),
                b.predict_row(scaled).unwrap()
            );
        }
    }
}
