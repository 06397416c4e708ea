//! Balance-aware tree ensembles.
//!
//! | kind                   | member training set                          | base learner     |
//! |------------------------|----------------------------------------------|------------------|
//! | `BalancedRandomForest` | bootstrap, then under-sampled to balance     | tree, √q features |
//! | `BalancedBagging`      | bootstrap, then under-sampled to balance     | tree, all features |
//! | `RusBoost`             | weighted balanced under-sample every round   | AdaBoost stumps  |
//! | `EasyEnsemble`         | one balanced under-sample per AdaBoost chain | AdaBoost stumps  |
//!
//! "RUSBoost" is the usual name of random-under-sampling boosting; it is
//! reported as "B-Boosting" alongside the other three labels.
//!
//! Forest and bagging scores are the plain mean of member tree scores.
//! Boosted chains score `(Σ α·h(x) / Σ α + 1) / 2` with `h ∈ {-1, +1}`;
//! EasyEnsemble averages its chains. Labels are `score >= 0.5`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, seeded, Rng};
use crate::sampling::{
    bootstrap, class_counts, random_undersample, weighted_undersample, IndexSample,
};
use crate::tree::{fit_tree, FeatureSubset, TreeModel, TreeParams};

/// Stage weight used when a stump classifies every training row correctly.
pub const ALPHA_CAP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    EasyEnsemble,
    RusBoost,
    BalancedBagging,
    BalancedRandomForest,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::EasyEnsemble,
        ClassifierKind::RusBoost,
        ClassifierKind::BalancedBagging,
        ClassifierKind::BalancedRandomForest,
    ];

    /// Display label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            ClassifierKind::EasyEnsemble => "E-Ensemble",
            ClassifierKind::RusBoost => "B-Boosting",
            ClassifierKind::BalancedBagging => "B-Bagging",
            ClassifierKind::BalancedRandomForest => "B-RandomForest",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ClassifierKind::EasyEnsemble => "easy",
            ClassifierKind::RusBoost => "rusboost",
            ClassifierKind::BalancedBagging => "bagging",
            ClassifierKind::BalancedRandomForest => "brf",
        }
    }

    pub fn is_boosted(self) -> bool {
        matches!(
            self,
            ClassifierKind::EasyEnsemble | ClassifierKind::RusBoost
        )
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = match s.to_ascii_lowercase().as_str() {
            "brf" | "b-randomforest" | "balanced_random_forest" => {
                ClassifierKind::BalancedRandomForest
            }
            "easy" | "e-ensemble" | "easy_ensemble" => ClassifierKind::EasyEnsemble,
            "rusboost" | "rsboost" | "b-boosting" | "rus_boost" => ClassifierKind::RusBoost,
            "bagging" | "b-bagging" | "balanced_bagging" => ClassifierKind::BalancedBagging,
            other => {
                return Err(Error::ConfigInvalid(format!(
                    "unknown classifier `{other}`"
                )))
            }
        };
        Ok(k)
    }
}

/// Ensemble size and base-tree settings.
///
/// `n_estimators` counts trees for the forest and bagging, boosting rounds
/// for RUSBoost and balanced subsets for EasyEnsemble (whose chains run
/// `boost_rounds` rounds each).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub n_estimators: usize,
    pub boost_rounds: usize,
    pub tree: TreeParams,
}

impl Hyperparams {
    pub fn defaults(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::BalancedRandomForest => Self {
                n_estimators: 100,
                boost_rounds: 0,
                tree: TreeParams {
                    features_per_split: FeatureSubset::Sqrt,
                    ..TreeParams::default()
                },
            },
            ClassifierKind::BalancedBagging => Self {
                n_estimators: 10,
                boost_rounds: 0,
                tree: TreeParams::default(),
            },
            ClassifierKind::RusBoost => Self {
                n_estimators: 50,
                boost_rounds: 0,
                tree: TreeParams::stump(),
            },
            ClassifierKind::EasyEnsemble => Self {
                n_estimators: 10,
                boost_rounds: 10,
                tree: TreeParams::stump(),
            },
        }
    }

    pub fn with_estimators(mut self, n: usize) -> Self {
        self.n_estimators = n;
        self
    }

    pub fn with_rounds(mut self, n: usize) -> Self {
        self.boost_rounds = n;
        self
    }

    fn validate(&self, kind: ClassifierKind) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::ConfigInvalid(
                "n_estimators must be at least 1".into(),
            ));
        }
        if kind == ClassifierKind::EasyEnsemble && self.boost_rounds == 0 {
            return Err(Error::ConfigInvalid(
                "boost_rounds must be at least 1".into(),
            ));
        }
        if self.tree.min_split < 2 || self.tree.min_leaf < 1 {
            return Err(Error::ConfigInvalid(
                "min_split >= 2 and min_leaf >= 1 required".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub tree: TreeModel,
    /// Stage weight; 1 for forest and bagging members.
    pub alpha: f64,
    /// Class counts `[neg, pos]` of the rows the tree was fit on.
    pub sample_class_counts: [usize; 2],
    /// AdaBoost chain the member belongs to (EasyEnsemble), else 0.
    pub chain: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub kind: ClassifierKind,
    pub params: Hyperparams,
    pub seed: u64,
    pub n_features: usize,
    pub members: Vec<Member>,
    /// Members per AdaBoost chain, in order (boosted kinds only).
    pub chain_lengths: Vec<usize>,
    pub importances: Vec<f64>,
}

impl EnsembleModel {
    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(match self.kind {
            ClassifierKind::BalancedRandomForest | ClassifierKind::BalancedBagging => {
                let sum: f64 = self.members.iter().map(|m| m.tree.score(x)).sum();
                sum / self.members.len() as f64
            }
            ClassifierKind::RusBoost | ClassifierKind::EasyEnsemble => {
                let mut start = 0;
                let mut total = 0.0;
                for &len in &self.chain_lengths {
                    total += boosted_score(&self.members[start..start + len], x);
                    start += len;
                }
                total / self.chain_lengths.len() as f64
            }
        })
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_score(x)? >= 0.5))
    }

    pub fn predict_scores(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.rows().map(|r| self.predict_score(r)).collect()
    }

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

fn boosted_score(chain: &[Member], x: &[f64]) -> f64 {
    let alpha_sum: f64 = chain.iter().map(|m| m.alpha).sum();
    if alpha_sum <= 0.0 {
        return 0.5;
    }
    let margin: f64 = chain
        .iter()
        .map(|m| m.alpha * signed(m.tree.score(x) >= 0.5))
        .sum();
    (margin / alpha_sum + 1.0) / 2.0
}

fn signed(positive: bool) -> f64 {
    if positive {
        1.0
    } else {
        -1.0
    }
}

/// α-weighted mean of member importances, renormalized to sum 1.
pub fn ensemble_importances(members: &[Member], n_features: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n_features];
    for m in members {
        for (a, v) in acc.iter_mut().zip(m.tree.importances()) {
            *a += m.alpha * v;
        }
    }
    let sum: f64 = acc.iter().sum();
    if sum > 0.0 {
        acc.iter_mut().for_each(|v| *v /= sum);
    } else {
        acc.iter_mut().for_each(|v| *v = 0.0);
    }
    acc
}

fn check_inputs(x: &Matrix, y: &[u8]) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch(x.n_rows(), y.len()));
    }
    if x.n_rows() < 2 {
        return Err(Error::EmptyInput);
    }
    let [neg, pos] = class_counts(y);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClassDataset);
    }
    Ok(())
}

/// Bootstrap of all rows, then random under-sampling inside the bootstrap.
/// Returned indices point into `y` and may repeat. A bootstrap that misses a
/// class is redrawn.
pub fn balanced_bootstrap(y: &[u8], rng: &mut Rng) -> Result<IndexSample> {
    const MAX_DRAWS: usize = 1000;
    for _ in 0..MAX_DRAWS {
        let boot = bootstrap(y.len(), rng);
        let boot_labels: Vec<u8> = boot.indices.iter().map(|&i| y[i]).collect();
        match random_undersample(&boot_labels, rng) {
            Ok(s) => {
                return Ok(IndexSample {
                    indices: s.indices.iter().map(|&k| boot.indices[k]).collect(),
                    weights: None,
                })
            }
            Err(Error::SingleClassDataset) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingleClassDataset)
}

fn fit_bagged(
    kind: ClassifierKind,
    x: &Matrix,
    y: &[u8],
    params: &Hyperparams,
    seed: u64,
) -> Result<EnsembleModel> {
    check_inputs(x, y)?;
    params.validate(kind)?;
    let members = (0..params.n_estimators)
        .into_par_iter()
        .map(|d| {
            let mut rng = seeded(derive_seed(seed, d as u64));
            let sample = balanced_bootstrap(y, &mut rng)?;
            let xs = x.select_rows(&sample.indices);
            let ys: Vec<u8> = sample.indices.iter().map(|&i| y[i]).collect();
            let tree = fit_tree(&xs, &ys, &vec![1.0; ys.len()], &params.tree, &mut rng)?;
            Ok(Member {
                tree,
                alpha: 1.0,
                sample_class_counts: class_counts(&ys),
                chain: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let importances = ensemble_importances(&members, x.n_cols());
    Ok(EnsembleModel {
        kind,
        params: *params,
        seed,
        n_features: x.n_cols(),
        members,
        chain_lengths: Vec::new(),
        importances,
    })
}

/// Balanced Random Forest: each tree sees a bootstrap under-sampled to class
/// balance and considers `features_per_split` columns per split (√q by default).
pub fn fit_balanced_random_forest(
    x: &Matrix,
    y: &[u8],
    params: &Hyperparams,
    seed: u64,
) -> Result<EnsembleModel> {
    fit_bagged(ClassifierKind::BalancedRandomForest, x, y, params, seed)
}

/// Bagging of full trees on balanced bootstraps.
pub fn fit_balanced_bagging(
    x: &Matrix,
    y: &[u8],
    params: &Hyperparams,
    seed: u64,
) -> Result<EnsembleModel> {
    fit_bagged(ClassifierKind::BalancedBagging, x, y, params, seed)
}

/// One completed (or rejected-and-stopped) AdaBoost round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// Weighted training error on the full set under the pre-round weights.
    pub error: f64,
    pub alpha: f64,
    /// Normalized weights after the update.
    pub weights_after: Vec<f64>,
    pub sample_class_counts: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostChain {
    pub members: Vec<Member>,
    pub rounds: Vec<RoundRecord>,
}

/// Discrete AdaBoost with depth-one trees.
///
/// Each round fits a stump (on the whole set, or on a weighted balanced
/// under-sample when `resample_each_round` is set), measures its weighted
/// error ε on the whole set, and sets `α = ½·ln((1 − ε)/ε)`. Weights become
/// `w·exp(−α·y·h)` with labels in {−1, +1}, then are renormalized.
///
/// A stump with ε = 0 enters with α = [`ALPHA_CAP`] and ends the chain. A
/// stump with ε ≥ 0.5 is discarded; with resampling one fresh draw is tried,
/// otherwise the chain stops. If the very first round is rejected, that stump
/// is kept with α = 0 so the chain is never empty (it then scores 0.5).
pub fn fit_adaboost(
    x: &Matrix,
    y: &[u8],
    weights_init: &[f64],
    rounds: usize,
    rng: &mut Rng,
    resample_each_round: bool,
) -> Result<BoostChain> {
    check_inputs(x, y)?;
    if weights_init.len() != y.len() {
        return Err(Error::LengthMismatch(y.len(), weights_init.len()));
    }
    if rounds == 0 {
        return Err(Error::ConfigInvalid("rounds must be at least 1".into()));
    }
    if let Some(i) = weights_init
        .iter()
        .position(|w| !(w.is_finite() && *w >= 0.0))
    {
        return Err(Error::NegativeWeight(i));
    }
    let mut w = weights_init.to_vec();
    normalize(&mut w)?;
    let stump = TreeParams::stump();
    let truth: Vec<f64> = y.iter().map(|&l| signed(l == 1)).collect();

    let mut members = Vec::new();
    let mut records = Vec::new();
    let mut rejected: Option<Member> = None;
    'rounds: for _ in 0..rounds {
        let attempts = if resample_each_round { 2 } else { 1 };
        for _ in 0..attempts {
            let (tree, counts) = if resample_each_round {
                let sample = weighted_undersample(y, &w, rng)?;
                let xs = x.select_rows(&sample.indices);
                let ys: Vec<u8> = sample.indices.iter().map(|&i| y[i]).collect();
                let ws = sample.weights.expect("weighted sample carries weights");
                let tree = fit_tree(&xs, &ys, &ws, &stump, rng)?;
                (tree, class_counts(&ys))
            } else {
                (fit_tree(x, y, &w, &stump, rng)?, class_counts(y))
            };
            let pred: Vec<f64> = x.rows().map(|r| signed(tree.score(r) >= 0.5)).collect();
            let error: f64 = w
                .iter()
                .zip(pred.iter().zip(&truth))
                .filter(|(_, (p, t))| p != t)
                .map(|(wi, _)| wi)
                .sum();
            let member = Member {
                tree,
                alpha: 0.0,
                sample_class_counts: counts,
                chain: 0,
            };
            if error >= 0.5 {
                rejected.get_or_insert(member);
                continue;
            }
            if error <= 0.0 {
                members.push(Member {
                    alpha: ALPHA_CAP,
                    ..member
                });
                records.push(RoundRecord {
                    error,
                    alpha: ALPHA_CAP,
                    weights_after: w.clone(),
                    sample_class_counts: counts,
                });
                break 'rounds;
            }
            let alpha = adaboost_alpha(error);
            for ((wi, p), t) in w.iter_mut().zip(&pred).zip(&truth) {
                *wi *= (-alpha * p * t).exp();
            }
            normalize(&mut w)?;
            members.push(Member { alpha, ..member });
            records.push(RoundRecord {
                error,
                alpha,
                weights_after: w.clone(),
                sample_class_counts: counts,
            });
            continue 'rounds;
        }
        break;
    }
    if members.is_empty() {
        members.push(rejected.expect("a rejected round leaves its stump"));
    }
    Ok(BoostChain {
        members,
        rounds: records,
    })
}

/// Stage weight `½·ln((1 − ε)/ε)`, capped at [`ALPHA_CAP`] for ε = 0.
pub fn adaboost_alpha(error: f64) -> f64 {
    if error <= 0.0 {
        ALPHA_CAP
    } else {
        0.5 * ((1.0 - error) / error).ln()
    }
}

fn normalize(w: &mut [f64]) -> Result<()> {
    let sum: f64 = w.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return Err(Error::ConfigInvalid(
            "sample weights must have a positive finite sum".into(),
        ));
    }
    w.iter_mut().for_each(|v| *v /= sum);
    Ok(())
}

/// RUSBoost: AdaBoost where every round's stump is fit on a class-balanced
/// under-sample drawn by current weight; error and weight updates use the
/// whole training set.
pub fn fit_rusboost(
    x: &Matrix,
    y: &[u8],
    params: &Hyperparams,
    seed: u64,
) -> Result<EnsembleModel> {
    check_inputs(x, y)?;
    params.validate(ClassifierKind::RusBoost)?;
    let mut rng = seeded(derive_seed(seed, 0));
    let chain = fit_adaboost(
        x,
        y,
        &vec![1.0; y.len()],
        params.n_estimators,
        &mut rng,
        true,
    )?;
    let members = chain.members;
    Ok(EnsembleModel {
        kind: ClassifierKind::RusBoost,
        params: *params,
        seed,
        n_features: x.n_cols(),
        chain_lengths: vec![members.len()],
        importances: ensemble_importances(&members, x.n_cols()),
        members,
    })
}

/// EasyEnsemble: `n_estimators` AdaBoost chains, each on its own random
/// balanced under-sample of the training set.
pub fn fit_easy_ensemble(
    x: &Matrix,
    y: &[u8],
    params: &Hyperparams,
    seed: u64,
) -> Result<EnsembleModel> {
    check_inputs(x, y)?;
    params.validate(ClassifierKind::EasyEnsemble)?;
    let chains = (0..params.n_estimators)
        .into_par_iter()
        .map(|s| {
            let mut rng = seeded(derive_seed(seed, s as u64));
            let sample = random_undersample(y, &mut rng)?;
            let xs = x.select_rows(&sample.indices);
            let ys: Vec<u8> = sample.indices.iter().map(|&i| y[i]).collect();
            let chain = fit_adaboost(
                &xs,
                &ys,
                &vec![1.0; ys.len()],
                params.boost_rounds,
                &mut rng,
                false,
            )?;
            Ok(chain
                .members
                .into_iter()
                .map(|m| Member { chain: s, ..m })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let chain_lengths = chains.iter().map(Vec::len).collect();
    let members: Vec<Member> = chains.into_iter().flatten().collect();
    Ok(EnsembleModel {
        kind: ClassifierKind::EasyEnsemble,
        params: *params,
        seed,
        n_features: x.n_cols(),
        chain_lengths,
        importances: ensemble_importances(&members, x.n_cols()),
        members,
    })
}

pub fn fit(
    kind: ClassifierKind,
    x: &Matrix,
    y: &[u8],
    params: &Hyperparams,
    seed: u64,
) -> Result<EnsembleModel> {
    match kind {
        ClassifierKind::BalancedRandomForest => fit_balanced_random_forest(x, y, params, seed),
        ClassifierKind::BalancedBagging => fit_balanced_bagging(x, y, params, seed),
        ClassifierKind::RusBoost => fit_rusboost(x, y, params, seed),
        ClassifierKind::EasyEnsemble => fit_easy_ensemble(x, y, params, seed),
    }
}
