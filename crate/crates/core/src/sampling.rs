//! Random under-sampling, bootstrap draws and stratified fold assignment.

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Row ordinals into a parent matrix, optionally with per-row weights.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSample {
    pub indices: Vec<usize>,
    pub weights: Option<Vec<f64>>,
}

impl IndexSample {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Class counts of the sampled rows under `labels`.
    pub fn class_counts(&self, labels: &[u8]) -> [usize; 2] {
        let mut counts = [0; 2];
        for &i in &self.indices {
            counts[labels[i] as usize] += 1;
        }
        counts
    }
}

pub fn class_counts(labels: &[u8]) -> [usize; 2] {
    let mut counts = [0; 2];
    for &l in labels {
        counts[l as usize] += 1;
    }
    counts
}

fn class_members(labels: &[u8]) -> [Vec<usize>; 2] {
    let mut members = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        members[l as usize].push(i);
    }
    members
}

/// Keeps every minority row and a uniform sample (without replacement) of
/// majority rows of the same size. Indices are returned in ascending order.
pub fn random_undersample(labels: &[u8], rng: &mut Rng) -> Result<IndexSample> {
    let [neg, pos] = class_members(labels);
    if neg.is_empty() || pos.is_empty() {
        return Err(Error::SingleClassDataset);
    }
    let (minority, majority) = if pos.len() <= neg.len() {
        (pos, neg)
    } else {
        (neg, pos)
    };
    let mut indices = minority;
    indices.extend(
        index::sample(rng, majority.len(), indices.len())
            .into_iter()
            .map(|k| majority[k]),
    );
    indices.sort_unstable();
    Ok(IndexSample {
        indices,
        weights: None,
    })
}

/// Class-balanced under-sample where rows inside each class are drawn without
/// replacement with probability proportional to `weights`
/// (Efraimidis–Spirakis keys). The returned sample carries the drawn weights.
pub fn weighted_undersample(labels: &[u8], weights: &[f64], rng: &mut Rng) -> Result<IndexSample> {
    if labels.len() != weights.len() {
        return Err(Error::LengthMismatch(labels.len(), weights.len()));
    }
    let members = class_members(labels);
    let m = members[0].len().min(members[1].len());
    if m == 0 {
        return Err(Error::SingleClassDataset);
    }
    let mut indices = Vec::with_capacity(2 * m);
    for class in members {
        if class.len() == m {
            indices.extend(class);
            continue;
        }
        let mut keyed: Vec<(f64, usize)> = class
            .into_iter()
            .map(|i| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let key = if weights[i] > 0.0 {
                    u.ln() / weights[i]
                } else {
                    f64::NEG_INFINITY
                };
                (key, i)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        indices.extend(keyed.into_iter().take(m).map(|(_, i)| i));
    }
    indices.sort_unstable();
    let drawn = indices.iter().map(|&i| weights[i]).collect();
    Ok(IndexSample {
        indices,
        weights: Some(drawn),
    })
}

/// `n` indices drawn uniformly with replacement.
pub fn bootstrap(n: usize, rng: &mut Rng) -> IndexSample {
    IndexSample {
        indices: (0..n).map(|_| rng.random_range(0..n)).collect(),
        weights: None,
    }
}

/// Assignment of rows to `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// `counts[fold][class]`.
    pub fn class_counts(&self, labels: &[u8]) -> Vec<[usize; 2]> {
        let mut counts = vec![[0; 2]; self.k];
        for (&f, &l) in self.assignment.iter().zip(labels) {
            counts[f][l as usize] += 1;
        }
        counts
    }
}

/// Shuffles each class and deals its rows round-robin over the folds, so
/// per-class fold counts differ by at most one. Remainders land in the
/// lowest-numbered folds.
pub fn stratified_kfold(labels: &[u8], k: usize, rng: &mut Rng) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::ConfigInvalid(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    let mut assignment = vec![0; labels.len()];
    for (class, mut members) in class_members(labels).into_iter().enumerate() {
        if members.len() < k {
            return Err(Error::TooFewClassMembers {
                class: class as u8,
                count: members.len(),
                folds: k,
            });
        }
        members.shuffle(rng);
        for (pos, row) in members.into_iter().enumerate() {
            assignment[row] = pos % k;
        }
    }
    Ok(FoldPlan { k, assignment })
}
