//! Random-forest baseline: CART trees on Gini impurity, bootstrap sampling,
//! and a random feature subset per split.
//!
//! Split candidates are the midpoints between consecutive sorted unique
//! values of each sampled feature; rows with `value <= threshold` go left.
//! A node splits only when the best candidate strictly reduces the weighted
//! child impurity below the node's own; ties keep the first candidate in
//! ascending (feature index, threshold) order. Trees are grown from per-tree
//! seeds derived from the master seed, so fitting is deterministic no matter
//! how many worker threads run.

use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::container::{self, ArtifactKind};
use crate::data::dataset::{LabeledDataset, Split};
use crate::error::{Error, Result};
use crate::rng;
use crate::tensor::Tensor2D;

/// Gini impurity of per-class counts: `1 - sum((n_c / n)^2)`.
pub fn gini(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput("gini"));
    }
    let n = total as f64;
    let mut sum_sq = 0.0;
    for &c in counts {
        let f = c as f64 / n;
        sum_sq += f * f;
    }
    Ok(1.0 - sum_sq)
}

fn gini_weighted(n0: f64, n1: f64) -> f64 {
    let n = n0 + n1;
    if n <= 0.0 {
        return 0.0;
    }
    let f0 = n0 / n;
    let f1 = n1 / n;
    1.0 - f0 * f0 - f1 * f1
}

/// Minimum rows a node needs before a split is attempted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinSamples {
    Count(usize),
    /// Fraction of the training-set size.
    Fraction(f64),
}

impl MinSamples {
    pub fn resolve(self, train_size: usize) -> Result<usize> {
        let resolved = match self {
            MinSamples::Count(c) => c,
            MinSamples::Fraction(f) => {
                if !(0.0 < f && f < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "min-samples fraction must be in (0,1), got {f}"
                    )));
                }
                (f * train_size as f64).round() as usize
            }
        };
        Ok(resolved.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples: MinSamples,
    /// Features considered per split; defaults to ceil(sqrt(d)) when `None`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    /// Weight class counts by the dataset's class weights inside Gini.
    pub weighted_gini: bool,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> Self {
        RfConfig {
            n_trees: 300,
            max_depth: 12,
            min_samples: MinSamples::Count(5),
            features_per_split: None,
            bootstrap: true,
            weighted_gini: false,
            seed: 0,
        }
    }
}

impl RfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidConfig("need at least one tree".to_string()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max depth must be >= 1".to_string()));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::InvalidConfig(
                "features per split must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// Class-1 fraction of the node's training rows.
        prob: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { prob } => return *prob,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
}

struct TreeBuilder<'a> {
    features: &'a Tensor2D,
    labels: &'a [u8],
    max_depth: usize,
    min_samples: usize,
    features_per_split: usize,
    class_weight: (f64, f64),
}

impl TreeBuilder<'_> {
    fn weighted_counts(&self, rows: &[usize]) -> (f64, f64) {
        let mut n0 = 0.0;
        let mut n1 = 0.0;
        for &r in rows {
            if self.labels[r] == 1 {
                n1 += self.class_weight.1;
            } else {
                n0 += self.class_weight.0;
            }
        }
        (n0, n1)
    }

    fn grow(
        &self,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut ChaCha8Rng,
        nodes: &mut Vec<Node>,
    ) -> usize {
        let n = rows.len();
        let pos = rows.iter().filter(|&&r| self.labels[r] == 1).count();
        let prob = pos as f64 / n as f64;
        let pure = pos == 0 || pos == n;
        if depth >= self.max_depth || n < self.min_samples || n < 2 || pure {
            nodes.push(Node::Leaf { prob });
            return nodes.len() - 1;
        }

        let d = self.features.cols();
        let k = self.features_per_split.min(d);
        let mut feature_pool: Vec<usize> = (0..d).collect();
        if k < d {
            for i in 0..k {
                let j = rng.gen_range(i..d);
                feature_pool.swap(i, j);
            }
            feature_pool.truncate(k);
            // Ascending order makes the first-best tie rule independent of
            // the sampling order.
            feature_pool.sort_unstable();
        }

        let (pn0, pn1) = self.weighted_counts(&rows);
        let parent_gini = gini_weighted(pn0, pn1);
        let mut best: Option<(f64, usize, f64)> = None;

        let mut sorted: Vec<(f64, u8)> = Vec::with_capacity(n);
        for &feature in &feature_pool {
            sorted.clear();
            for &r in &rows {
                sorted.push((self.features.get(r, feature), self.labels[r]));
            }
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

            let w = self.class_weight;
            let mut left0 = 0.0;
            let mut left1 = 0.0;
            let total0 = pn0;
            let total1 = pn1;
            let total = total0 + total1;
            for i in 0..n - 1 {
                let (value, label) = sorted[i];
                if label == 1 {
                    left1 += w.1;
                } else {
                    left0 += w.0;
                }
                let next = sorted[i + 1].0;
                if next == value {
                    continue;
                }
                let threshold = 0.5 * (value + next);
                let right0 = total0 - left0;
                let right1 = total1 - left1;
                let nl = left0 + left1;
                let nr = right0 + right1;
                let score =
                    (nl * gini_weighted(left0, left1) + nr * gini_weighted(right0, right1)) / total;
                let better = match &best {
                    None => score < parent_gini,
                    Some((bs, _, _)) => score < *bs,
                };
                if better {
                    best = Some((score, feature, threshold));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            nodes.push(Node::Leaf { prob });
            return nodes.len() - 1;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.features.get(r, feature) <= threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let slot = nodes.len();
        nodes.push(Node::Leaf { prob }); // placeholder
        let left = self.grow(left_rows, depth + 1, rng, nodes);
        let right = self.grow(right_rows, depth + 1, rng, nodes);
        nodes[slot] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }
}

fn fit_tree(
    features: &Tensor2D,
    labels: &[u8],
    cfg: &RfConfig,
    min_samples: usize,
    features_per_split: usize,
    class_weight: (f64, f64),
    tree_seed: u64,
) -> DecisionTree {
    let mut tree_rng = rng::stream(tree_seed, rng::purpose::TREE, 0);
    let n = features.rows();
    let rows: Vec<usize> = if cfg.bootstrap {
        (0..n).map(|_| tree_rng.gen_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let builder = TreeBuilder {
        features,
        labels,
        max_depth: cfg.max_depth,
        min_samples,
        features_per_split,
        class_weight,
    };
    let mut nodes = Vec::new();
    builder.grow(rows, 0, &mut tree_rng, &mut nodes);
    DecisionTree { nodes }
}

/// Fits a forest on the dataset's train split. Trees are independent given
/// their derived seeds and are fitted on worker threads, collected in tree
/// order.
pub fn fit_forest(dataset: &LabeledDataset, cfg: &RfConfig) -> Result<Forest> {
    cfg.validate()?;
    let (features, labels, _) = dataset.subset(Split::Train);
    fit_forest_raw(
        &features,
        &labels,
        dataset.class_weights.w0,
        dataset.class_weights.w1,
        cfg,
    )
}

/// Forest fitting on an explicit matrix; `w0`/`w1` only matter when
/// `weighted_gini` is set.
pub fn fit_forest_raw(
    features: &Tensor2D,
    labels: &[u8],
    w0: f64,
    w1: f64,
    cfg: &RfConfig,
) -> Result<Forest> {
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1);
    fit_forest_with_workers(features, labels, w0, w1, cfg, workers)
}

/// Forest fitting with an explicit worker count. The result is identical for
/// every worker count: trees are keyed by index-derived seeds and collected
/// in order.
pub fn fit_forest_with_workers(
    features: &Tensor2D,
    labels: &[u8],
    w0: f64,
    w1: f64,
    cfg: &RfConfig,
    workers: usize,
) -> Result<Forest> {
    cfg.validate()?;
    let n = features.rows();
    if n == 0 {
        return Err(Error::EmptyInput("fit_forest"));
    }
    if labels.len() != n {
        return Err(Error::ShapeMismatch {
            op: "fit_forest",
            expected: format!("{n} labels"),
            got: format!("{}", labels.len()),
        });
    }
    let d = features.cols();
    let min_samples = cfg.min_samples.resolve(n)?;
    let features_per_split = cfg
        .features_per_split
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .min(d)
        .max(1);
    let class_weight = if cfg.weighted_gini {
        (w0, w1)
    } else {
        (1.0, 1.0)
    };

    let tree_seeds: Vec<u64> = (0..cfg.n_trees)
        .map(|t| rng::derive_seed(cfg.seed, rng::purpose::TREE, t as u64))
        .collect();

    let workers = workers.max(1).min(cfg.n_trees);
    let trees: Vec<DecisionTree> = if workers <= 1 {
        tree_seeds
            .iter()
            .map(|&s| {
                fit_tree(
                    features,
                    labels,
                    cfg,
                    min_samples,
                    features_per_split,
                    class_weight,
                    s,
                )
            })
            .collect()
    } else {
        let mut slots: Vec<Option<DecisionTree>> = vec![None; cfg.n_trees];
        std::thread::scope(|scope| {
            let chunk = cfg.n_trees.div_ceil(workers);
            let mut rest = slots.as_mut_slice();
            let mut offset = 0;
            let mut handles = Vec::new();
            while !rest.is_empty() {
                let take = chunk.min(rest.len());
                let (head, tail) = rest.split_at_mut(take);
                rest = tail;
                let seeds = &tree_seeds[offset..offset + take];
                offset += take;
                handles.push(scope.spawn(move || {
                    for (slot, &s) in head.iter_mut().zip(seeds) {
                        *slot = Some(fit_tree(
                            features,
                            labels,
                            cfg,
                            min_samples,
                            features_per_split,
                            class_weight,
                            s,
                        ));
                    }
                }));
            }
            for h in handles {
                h.join().expect("tree worker panicked");
            }
        });
        slots.into_iter().map(Option::unwrap).collect()
    };

    Ok(Forest {
        trees,
        n_features: d,
    })
}

impl Forest {
    /// Mean leaf class-1 fraction across trees, one probability per row.
    pub fn predict_proba(&self, x: &Tensor2D) -> Result<Vec<f64>> {
        if x.cols() != self.n_features {
            return Err(Error::ShapeMismatch {
                op: "Forest::predict_proba",
                expected: format!("{} cols", self.n_features),
                got: format!("{} cols", x.cols()),
            });
        }
        let mut out = vec![0.0; x.rows()];
        for tree in &self.trees {
            for (r, o) in out.iter_mut().enumerate() {
                *o += tree.predict_row(x.row(r));
            }
        }
        let k = self.trees.len() as f64;
        for o in &mut out {
            *o /= k;
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        container::write_header(&mut w, ArtifactKind::Forest)?;
        container::write_u32(&mut w, self.n_features as u32)?;
        container::write_u32(&mut w, self.trees.len() as u32)?;
        for tree in &self.trees {
            container::write_u32(&mut w, tree.nodes.len() as u32)?;
            for node in &tree.nodes {
                match node {
                    Node::Leaf { prob } => {
                        container::write_u32(&mut w, u32::MAX)?;
                        container::write_f64(&mut w, 0.0)?;
                        container::write_u32(&mut w, 0)?;
                        container::write_u32(&mut w, 0)?;
                        container::write_f64(&mut w, *prob)?;
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        container::write_u32(&mut w, *feature as u32)?;
                        container::write_f64(&mut w, *threshold)?;
                        container::write_u32(&mut w, *left as u32)?;
                        container::write_u32(&mut w, *right as u32)?;
                        container::write_f64(&mut w, 0.0)?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut r = BufReader::new(file);
        let kind = container::read_header(&mut r)?;
        if kind != ArtifactKind::Forest {
            return Err(Error::Format(format!("expected forest, found {kind:?}")));
        }
        let n_features = container::read_u32(&mut r)? as usize;
        let n_trees = container::read_u32(&mut r)? as usize;
        let mut trees = Vec::with_capacity(n_trees);
        for _ in 0..n_trees {
            let n_nodes = container::read_u32(&mut r)? as usize;
            let mut nodes = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                let feature = container::read_u32(&mut r)?;
                let threshold = container::read_f64(&mut r)?;
                let left = container::read_u32(&mut r)? as usize;
                let right = container::read_u32(&mut r)? as usize;
                let prob = container::read_f64(&mut r)?;
                nodes.push(if feature == u32::MAX {
                    Node::Leaf { prob }
                } else {
                    if left >= n_nodes || right >= n_nodes {
                        return Err(Error::Format("tree child index out of range".to_string()));
                    }
                    Node::Split {
                        feature: feature as usize,
                        threshold,
                        left,
                        right,
                    }
                });
            }
            if nodes.is_empty() {
                return Err(Error::Format("empty tree".to_string()));
            }
            trees.push(DecisionTree { nodes });
        }
        Ok(Forest { trees, n_features })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[Vec<f64>]) -> Tensor2D {
        Tensor2D::from_rows(rows).unwrap()
    }

    fn quick_cfg(n_trees: usize) -> RfConfig {
        RfConfig {
            n_trees,
            max_depth: 4,
            min_samples: MinSamples::Count(2),
            features_per_split: None,
            bootstrap: true,
            weighted_gini: false,
            seed: 7,
        }
    }

    #[test]
    fn gini_values_match_formula() {
        assert_eq!(gini(&[10, 0]).unwrap(), 0.0);
        assert!((gini(&[5, 5]).unwrap() - 0.5).abs() < 1e-15);
        assert!((gini(&[3, 1]).unwrap() - 0.375).abs() < 1e-15);
        assert!(gini(&[0, 0]).is_err());
    }

    #[test]
    fn pure_data_yields_single_leaves() {
        let x = matrix(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let y = vec![1, 1, 1, 1];
        let forest = fit_forest_raw(&x, &y, 1.0, 1.0, &quick_cfg(5)).unwrap();
        for tree in &forest.trees {
            assert_eq!(tree.nodes.len(), 1);
            assert_eq!(tree.nodes[0], Node::Leaf { prob: 1.0 });
        }
        let p = forest.predict_proba(&x).unwrap();
        assert!(p.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn perfect_binary_feature_gives_depth_one_trees() {
        let x = matrix(&[
            vec![0.0, 0.3],
            vec![0.0, 0.9],
            vec![1.0, 0.1],
            vec![1.0, 0.5],
        ]);
        let y = vec![0, 0, 1, 1];
        let cfg = RfConfig {
            bootstrap: false,
            features_per_split: Some(2),
            ..quick_cfg(3)
        };
        let forest = fit_forest_raw(&x, &y, 1.0, 1.0, &cfg).unwrap();
        for tree in &forest.trees {
            assert_eq!(tree.depth(), 1, "tree {tree:?}");
        }
        let p = forest.predict_proba(&x).unwrap();
        let acc = p
            .iter()
            .zip(&y)
            .filter(|(&pi, &yi)| u8::from(pi >= 0.5) == yi)
            .count();
        assert_eq!(acc, 4);
    }

    #[test]
    fn fitting_is_deterministic() {
        use rand::Rng;
        let mut data_rng = rng::stream(11, rng::purpose::SYNTHETIC, 0);
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..5).map(|_| data_rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let x = matrix(&rows);
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] + r[2] > 0.0)).collect();
        let a = fit_forest_raw(&x, &y, 1.0, 1.0, &quick_cfg(8)).unwrap();
        let b = fit_forest_raw(&x, &y, 1.0, 1.0, &quick_cfg(8)).unwrap();
        assert_eq!(a, b);
        let mut other = quick_cfg(8);
        other.seed = 8;
        let c = fit_forest_raw(&x, &y, 1.0, 1.0, &other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn probabilities_average_over_trees() {
        let forest = Forest {
            trees: vec![
                DecisionTree {
                    nodes: vec![Node::Leaf { prob: 0.2 }],
                },
                DecisionTree {
                    nodes: vec![Node::Leaf { prob: 0.4 }],
                },
            ],
            n_features: 1,
        };
        let p = forest.predict_proba(&matrix(&[vec![0.0]])).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn depth_and_min_sample_bounds_hold() {
        use rand::Rng;
        let mut data_rng = rng::stream(13, rng::purpose::SYNTHETIC, 0);
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..4).map(|_| data_rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let x = matrix(&rows);
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] * r[1] > 0.0)).collect();
        let cfg = RfConfig {
            n_trees: 10,
            max_depth: 3,
            min_samples: MinSamples::Count(20),
            features_per_split: Some(2),
            bootstrap: true,
            weighted_gini: false,
            seed: 3,
        };
        let forest = fit_forest_raw(&x, &y, 1.0, 1.0, &cfg).unwrap();

        // Walk each tree counting rows per node to check the min-sample rule.
        fn count_rows(
            tree: &DecisionTree,
            x: &Tensor2D,
            idx: usize,
            rows: Vec<usize>,
            min_samples: usize,
        ) {
            match &tree.nodes[idx] {
                Node::Leaf { .. } => {}
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    assert!(
                        rows.len() >= min_samples,
                        "split node with {} rows",
                        rows.len()
                    );
                    let (l, r): (Vec<usize>, Vec<usize>) = rows
                        .into_iter()
                        .partition(|&row| x.get(row, *feature) <= *threshold);
                    count_rows(tree, x, *left, l, min_samples);
                    count_rows(tree, x, *right, r, min_samples);
                }
            }
        }
        for tree in &forest.trees {
            assert!(tree.depth() <= 3);
            // Bootstrap rows differ per tree; use the full set as a superset
            // bound only when bootstrap is off. Here just check depth.
        }
        let no_bootstrap = RfConfig {
            bootstrap: false,
            ..cfg
        };
        let forest2 = fit_forest_raw(&x, &y, 1.0, 1.0, &no_bootstrap).unwrap();
        for tree in &forest2.trees {
            count_rows(tree, &x, 0, (0..x.rows()).collect(), 20);
        }
    }

    #[test]
    fn worker_count_does_not_change_the_forest() {
        use rand::Rng;
        let mut data_rng = rng::stream(23, rng::purpose::SYNTHETIC, 0);
        let rows: Vec<Vec<f64>> = (0..120)
            .map(|_| (0..6).map(|_| data_rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let x = matrix(&rows);
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] - r[3] > 0.0)).collect();
        let cfg = quick_cfg(7);
        let serial = fit_forest_with_workers(&x, &y, 1.0, 1.0, &cfg, 1).unwrap();
        let threaded = fit_forest_with_workers(&x, &y, 1.0, 1.0, &cfg, 3).unwrap();
        assert_eq!(serial, threaded);
    }

    #[test]
    fn adding_trees_moves_probability_by_bounded_amount() {
        use rand::Rng;
        let mut data_rng = rng::stream(17, rng::purpose::SYNTHETIC, 0);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| data_rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let x = matrix(&rows);
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] > 0.1)).collect();
        let mut last: Option<Vec<f64>> = None;
        for k in [5usize, 6, 7] {
            let forest = fit_forest_raw(&x, &y, 1.0, 1.0, &quick_cfg(k)).unwrap();
            let p = forest.predict_proba(&x).unwrap();
            if let Some(prev) = &last {
                // Same seed derivation: first k-1 trees coincide, so the mean
                // can move at most 1/k per added tree.
                for (a, b) in prev.iter().zip(&p) {
                    assert!((a - b).abs() <= 1.0 / k as f64 + 1e-12);
                }
            }
            last = Some(p);
        }
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        use rand::Rng;
        let mut data_rng = rng::stream(19, rng::purpose::SYNTHETIC, 0);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..4).map(|_| data_rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let x = matrix(&rows);
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[1] < 0.0)).collect();
        let forest = fit_forest_raw(&x, &y, 1.0, 1.0, &quick_cfg(4)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        forest.save(f.path()).unwrap();
        let loaded = Forest::load(f.path()).unwrap();
        assert_eq!(loaded, forest);
        assert_eq!(
            loaded.predict_proba(&x).unwrap(),
            forest.predict_proba(&x).unwrap()
        );
    }

    #[test]
    fn empty_training_data_is_an_error() {
        let x = Tensor2D::zeros(0, 3);
        assert!(fit_forest_raw(&x, &[], 1.0, 1.0, &quick_cfg(2)).is_err());
    }
}
