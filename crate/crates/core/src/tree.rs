//! Weighted CART classification tree with Gini impurity.
//!
//! Rows route left when `x[feature] < threshold`. Leaves hold weighted class
//! counts and predict the weighted positive fraction, so a tree yields a
//! score in `[0, 1]`; the hard label is `score >= 0.5`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// How many candidate features each split examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubset {
    All,
    /// `ceil(sqrt(q))` of the `q` columns.
    Sqrt,
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(self, n_features: usize) -> usize {
        let m = match self {
            FeatureSubset::All => n_features,
            FeatureSubset::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            FeatureSubset::Count(m) => m,
        };
        m.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_split: usize,
    pub min_leaf: usize,
    pub features_per_split: FeatureSubset,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_split: 2,
            min_leaf: 1,
            features_per_split: FeatureSubset::All,
        }
    }
}

impl TreeParams {
    /// Depth-one tree over all features.
    pub fn stump() -> Self {
        Self {
            max_depth: Some(1),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        /// Node weight fraction times Gini decrease.
        impurity_decrease: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class_counts: [usize; 2],
        weighted_counts: [f64; 2],
        value: f64,
    },
}

impl TreeNode {
    fn route(&self, x: &[f64]) -> &TreeNode {
        let mut node = self;
        while let TreeNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } = node
        {
            node = if x[*feature] < *threshold {
                left
            } else {
                right
            };
        }
        node
    }
}

/// A split as seen from outside the tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitInfo {
    pub feature: usize,
    pub threshold: f64,
    pub impurity_decrease: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
    pub params: TreeParams,
    pub n_features: usize,
    pub importances: Vec<f64>,
}

impl TreeModel {
    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(self.score(x))
    }

    pub(crate) fn score(&self, x: &[f64]) -> f64 {
        match self.root.route(x) {
            TreeNode::Leaf { value, .. } => *value,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_score(x)? >= 0.5))
    }

    pub fn predict_matrix(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.rows().map(|r| self.predict_score(r)).collect()
    }

    pub fn depth(&self) -> usize {
        fn go(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(left).max(go(right)),
            }
        }
        go(&self.root)
    }

    pub fn n_leaves(&self) -> usize {
        fn go(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => go(left) + go(right),
            }
        }
        go(&self.root)
    }

    pub fn splits(&self) -> Vec<SplitInfo> {
        fn go(n: &TreeNode, depth: usize, out: &mut Vec<SplitInfo>) {
            if let TreeNode::Split {
                feature,
                threshold,
                impurity_decrease,
                left,
                right,
            } = n
            {
                out.push(SplitInfo {
                    feature: *feature,
                    threshold: *threshold,
                    impurity_decrease: *impurity_decrease,
                    depth,
                });
                go(left, depth + 1, out);
                go(right, depth + 1, out);
            }
        }
        let mut out = Vec::new();
        go(&self.root, 0, &mut out);
        out
    }

    /// Mean-decrease-in-impurity importances, normalized to sum 1 (all zero
    /// for a single-leaf tree).
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Gini impurity of weighted class totals, scaled by the node weight:
/// `w * (1 - p0^2 - p1^2)`.
fn weighted_gini(w0: f64, w1: f64) -> f64 {
    let w = w0 + w1;
    if w <= 0.0 {
        0.0
    } else {
        w - (w0 * w0 + w1 * w1) / w
    }
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    w: &'a [f64],
    params: TreeParams,
    total_weight: f64,
    mtry: usize,
    importances: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

impl Builder<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize, rng: &mut Rng) -> TreeNode {
        let mut counts = [0usize; 2];
        let mut wc = [0.0f64; 2];
        for &i in &rows {
            let c = self.y[i] as usize;
            counts[c] += 1;
            wc[c] += self.w[i];
        }
        let leaf = |counts: [usize; 2], wc: [f64; 2]| {
            let total = wc[0] + wc[1];
            let value = if total > 0.0 {
                wc[1] / total
            } else {
                counts[1] as f64 / (counts[0] + counts[1]).max(1) as f64
            };
            TreeNode::Leaf {
                class_counts: counts,
                weighted_counts: wc,
                value,
            }
        };

        let pure = wc[0] <= 0.0 || wc[1] <= 0.0;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || rows.len() < self.params.min_split {
            return leaf(counts, wc);
        }
        let Some(best) = self.best_split(&rows, wc, rng) else {
            return leaf(counts, wc);
        };

        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.x.get(i, best.feature) < best.threshold);
        let impurity_decrease = best.decrease / self.total_weight;
        self.importances[best.feature] += impurity_decrease;
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            impurity_decrease,
            left: Box::new(self.build(left, depth + 1, rng)),
            right: Box::new(self.build(right, depth + 1, rng)),
        }
    }

    /// Best split among `mtry` randomly chosen features; keeps visiting
    /// further features while none of the drawn ones admits a valid split.
    fn best_split(&self, rows: &[usize], wc: [f64; 2], rng: &mut Rng) -> Option<Candidate> {
        let p = self.x.n_cols();
        let mut order: Vec<usize> = (0..p).collect();
        if self.mtry < p {
            order.shuffle(rng);
        }
        let node_weight = wc[0] + wc[1];
        let parent = weighted_gini(wc[0], wc[1]);
        let tol = 1e-12 * node_weight;
        let mut best: Option<Candidate> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        for (visited, &f) in order.iter().enumerate() {
            if visited >= self.mtry && best.is_some() {
                break;
            }
            sorted.clear();
            sorted.extend(rows.iter().map(|&i| (self.x.get(i, f), i)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0.0f64; 2];
            let n = sorted.len();
            for k in 0..n - 1 {
                let (v, i) = sorted[k];
                left[self.y[i] as usize] += self.w[i];
                let next = sorted[k + 1].0;
                if v >= next {
                    continue;
                }
                let n_left = k + 1;
                if n_left < self.params.min_leaf || n - n_left < self.params.min_leaf {
                    continue;
                }
                let right = [wc[0] - left[0], wc[1] - left[1]];
                let decrease =
                    parent - weighted_gini(left[0], left[1]) - weighted_gini(right[0], right[1]);
                let mut threshold = 0.5 * (v + next);
                if threshold <= v {
                    threshold = next;
                }
                let cand = Candidate {
                    feature: f,
                    threshold,
                    decrease: decrease.max(0.0),
                };
                best = Some(match best {
                    None => cand,
                    Some(b) if cand.decrease > b.decrease + tol => cand,
                    Some(b)
                        if cand.decrease >= b.decrease - tol
                            && (cand.feature, cand.threshold) < (b.feature, b.threshold) =>
                    {
                        cand
                    }
                    Some(b) => b,
                });
            }
        }
        best
    }
}

/// Fits a tree by greedy recursive partitioning.
///
/// Each node picks the (feature, threshold) with the largest decrease in
/// weighted Gini impurity among candidate midpoints between consecutive
/// distinct values; near-equal candidates resolve to the lowest feature index,
/// then the lowest threshold. A node becomes a leaf when it is pure (by
/// weight), at `max_depth`, below `min_split` rows, or when no threshold
/// separates its rows.
pub fn fit_tree(
    x: &Matrix,
    y: &[u8],
    sample_weights: &[f64],
    params: &TreeParams,
    rng: &mut Rng,
) -> Result<TreeModel> {
    let n = x.n_rows();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if y.len() != n {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    if sample_weights.len() != n {
        return Err(Error::LengthMismatch(n, sample_weights.len()));
    }
    if let Some(i) = sample_weights
        .iter()
        .position(|w| !(w.is_finite() && *w >= 0.0))
    {
        return Err(Error::NegativeWeight(i));
    }
    if y.iter().any(|&l| l > 1) {
        return Err(Error::InvalidDataset("labels must be 0 or 1".into()));
    }
    let total_weight: f64 = sample_weights.iter().sum();
    if total_weight <= 0.0 {
        return Err(Error::EmptyInput);
    }
    let mut builder = Builder {
        x,
        y,
        w: sample_weights,
        params: *params,
        total_weight,
        mtry: params.features_per_split.resolve(x.n_cols()),
        importances: vec![0.0; x.n_cols()],
    };
    let root = builder.build((0..n).collect(), 0, rng);
    let mut importances = builder.importances;
    let sum: f64 = importances.iter().sum();
    if sum > 0.0 {
        importances.iter_mut().for_each(|v| *v /= sum);
    } else {
        importances.iter_mut().for_each(|v| *v = 0.0);
    }
    Ok(TreeModel {
        root,
        params: *params,
        n_features: x.n_cols(),
        importances,
    })
}

/// [`fit_tree`] with unit weights.
pub fn fit_unweighted(
    x: &Matrix,
    y: &[u8],
    params: &TreeParams,
    rng: &mut Rng,
) -> Result<TreeModel> {
    fit_tree(x, y, &vec![1.0; y.len()], params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn accuracy(t: &TreeModel, x: &Matrix, y: &[u8]) -> f64 {
        let hits = x
            .rows()
            .zip(y)
            .filter(|(r, &l)| t.predict_label(r).unwrap() == l)
            .count();
        hits as f64 / y.len() as f64
    }

    #[test]
    fn single_class_is_one_leaf() {
        let x = m(&[&[1.0], &[2.0], &[3.0]]);
        let t = fit_unweighted(&x, &[0, 0, 0], &TreeParams::default(), &mut seeded(0)).unwrap();
        assert_eq!(t.n_leaves(), 1);
        assert_eq!(t.predict_score(&[100.0]).unwrap(), 0.0);
        assert!(t.importances().iter().all(|&v| v == 0.0));

        let t = fit_unweighted(&x, &[1, 1, 1], &TreeParams::default(), &mut seeded(0)).unwrap();
        assert_eq!(t.predict_score(&[-5.0]).unwrap(), 1.0);
    }

    #[test]
    fn one_dimensional_split() {
        let x = m(&[&[1.0], &[2.0], &[8.0], &[9.0]]);
        let y = [0, 0, 1, 1];
        let t = fit_unweighted(&x, &y, &TreeParams::default(), &mut seeded(0)).unwrap();
        let splits = t.splits();
        assert_eq!(splits.len(), 1);
        assert!(splits[0].threshold > 2.0 && splits[0].threshold < 8.0);
        assert_eq!(splits[0].threshold, 5.0);
        assert_eq!(accuracy(&t, &x, &y), 1.0);
        assert_eq!(t.predict_score(&[1.5]).unwrap(), 0.0);
        assert_eq!(t.predict_score(&[8.5]).unwrap(), 1.0);
        assert_eq!(t.importances(), &[1.0]);
    }

    #[test]
    fn brute_force_threshold_interval() {
        // every threshold t in (2, 8) separates the classes; no other does
        let xs = [1.0, 2.0, 8.0, 9.0];
        let y = [0u8, 0, 1, 1];
        let mut perfect = Vec::new();
        for step in 0..=100 {
            let t = step as f64 / 10.0;
            let ok = xs.iter().zip(&y).all(|(&v, &l)| (v >= t) == (l == 1));
            if ok {
                perfect.push(t);
            }
        }
        assert!(perfect.iter().all(|&t| t > 2.0 && t <= 8.0));
        let fitted = fit_unweighted(
            &m(&[&[1.0], &[2.0], &[8.0], &[9.0]]),
            &y,
            &TreeParams::default(),
            &mut seeded(1),
        )
        .unwrap()
        .splits()[0]
            .threshold;
        assert!(perfect.contains(&fitted));
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = m(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]]);
        let y = [0, 1, 1, 0];
        let t = fit_unweighted(&x, &y, &TreeParams::default(), &mut seeded(0)).unwrap();
        assert_eq!(accuracy(&t, &x, &y), 1.0);
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn only_feature_zero_split() {
        let x = m(&[&[0.0, 5.0], &[1.0, 5.0], &[2.0, 5.0], &[3.0, 5.0]]);
        let t = fit_unweighted(&x, &[0, 1, 0, 1], &TreeParams::default(), &mut seeded(0)).unwrap();
        assert!(t.splits().iter().all(|s| s.feature == 0));
        assert_eq!(t.importances(), &[1.0, 0.0]);
    }

    #[test]
    fn errors() {
        let x = m(&[&[1.0]]);
        let p = TreeParams::default();
        assert!(matches!(
            fit_tree(&x, &[0], &[-1.0], &p, &mut seeded(0)),
            Err(Error::NegativeWeight(0))
        ));
        let empty = Matrix::new(vec![], 0, 1).unwrap();
        assert!(matches!(
            fit_tree(&empty, &[], &[], &p, &mut seeded(0)),
            Err(Error::EmptyInput)
        ));
        let t = fit_unweighted(&x, &[1], &p, &mut seeded(0)).unwrap();
        assert!(matches!(
            t.predict_score(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn max_depth_and_min_split_respected() {
        let x = m(&[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[6.0]]);
        let y = [0, 1, 0, 1, 0, 1];
        let p = TreeParams {
            max_depth: Some(2),
            ..TreeParams::default()
        };
        assert!(fit_unweighted(&x, &y, &p, &mut seeded(0)).unwrap().depth() <= 2);
        let p = TreeParams {
            min_split: 7,
            ..TreeParams::default()
        };
        assert_eq!(
            fit_unweighted(&x, &y, &p, &mut seeded(0))
                .unwrap()
                .n_leaves(),
            1
        );
        let p = TreeParams {
            min_leaf: 3,
            ..TreeParams::default()
        };
        let t = fit_unweighted(&x, &y, &p, &mut seeded(0)).unwrap();
        fn leaf_sizes(n: &TreeNode, out: &mut Vec<usize>) {
            match n {
                TreeNode::Leaf { class_counts, .. } => out.push(class_counts[0] + class_counts[1]),
                TreeNode::Split { left, right, .. } => {
                    leaf_sizes(left, out);
                    leaf_sizes(right, out);
                }
            }
        }
        let mut sizes = Vec::new();
        leaf_sizes(&t.root, &mut sizes);
        assert!(sizes.iter().all(|&s| s >= 3));
    }

    #[test]
    fn weights_shift_leaf_values() {
        let x = m(&[&[1.0], &[1.0], &[1.0]]);
        let t = fit_tree(
            &x,
            &[0, 1, 1],
            &[2.0, 1.0, 1.0],
            &TreeParams::default(),
            &mut seeded(0),
        )
        .unwrap();
        assert_eq!(t.predict_score(&[1.0]).unwrap(), 0.5);
        assert_eq!(t.predict_label(&[1.0]).unwrap(), 1);
    }

    #[test]
    fn json_round_trip() {
        let x = m(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]]);
        let t = fit_unweighted(&x, &[0, 1, 1, 0], &TreeParams::default(), &mut seeded(0)).unwrap();
        let json = t.to_json().unwrap();
        assert!(json.contains("\"node\":\"split\""));
        assert_eq!(TreeModel::from_json(&json).unwrap(), t);
    }
}
