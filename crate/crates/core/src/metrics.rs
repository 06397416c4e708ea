//! Confusion matrices, figures of merit, ROC curves and AUC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Rows by true class, each scaled to sum 1.
    pub fn normalized(&self) -> Result<NormalizedConfusion> {
        let pos = self.tp + self.fn_;
        let neg = self.tn + self.fp;
        if pos == 0 || neg == 0 {
            return Err(Error::ZeroRow);
        }
        Ok(NormalizedConfusion {
            tn: self.tn as f64 / neg as f64,
            fp: self.fp as f64 / neg as f64,
            fn_: self.fn_ as f64 / pos as f64,
            tp: self.tp as f64 / pos as f64,
        })
    }
}

/// Row-normalized 2×2 matrix: the negative row is `[tn, fp]`, the positive
/// row is `[fn, tp]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormalizedConfusion {
    pub tn: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub tp: f64,
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == 1, p == 1) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub recall: f64,
    pub specificity: f64,
    pub precision_macro: f64,
    pub f1_macro: f64,
    pub precision_positive: f64,
    pub f1_positive: f64,
    /// Metrics whose denominator was zero and were set to 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
}

fn ratio(num: f64, den: f64, name: &str, undefined: &mut Vec<String>) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        undefined.push(name.to_string());
        0.0
    }
}

fn f1(precision: f64, recall: f64, name: &str, undefined: &mut Vec<String>) -> f64 {
    ratio(
        2.0 * precision * recall,
        precision + recall,
        name,
        undefined,
    )
}

/// Accuracy, recall (TPR), specificity (TNR), positive-class and macro
/// precision/F1, and balanced accuracy `(recall + specificity) / 2`.
/// A zero denominator yields 0 and is listed in `undefined`.
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsRecord> {
    if cm.total() == 0 {
        return Err(Error::EmptyConfusion);
    }
    let (tp, fp, fn_, tn) = (cm.tp as f64, cm.fp as f64, cm.fn_ as f64, cm.tn as f64);
    let mut undefined = Vec::new();
    let u = &mut undefined;
    let accuracy = (tp + tn) / (tp + tn + fp + fn_);
    let recall = ratio(tp, tp + fn_, "recall", u);
    let specificity = ratio(tn, tn + fp, "specificity", u);
    let precision_positive = ratio(tp, tp + fp, "precision_positive", u);
    let precision_negative = ratio(tn, tn + fn_, "precision_negative", u);
    let f1_positive = f1(precision_positive, recall, "f1_positive", u);
    let f1_negative = f1(precision_negative, specificity, "f1_negative", u);
    Ok(MetricsRecord {
        accuracy,
        balanced_accuracy: (recall + specificity) / 2.0,
        recall,
        specificity,
        precision_macro: (precision_positive + precision_negative) / 2.0,
        f1_macro: (f1_positive + f1_negative) / 2.0,
        precision_positive,
        f1_positive,
        undefined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Rows scoring at or above this value are called positive. The first
    /// point uses `+inf`.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "threshold,fpr,tpr")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
        }
        Ok(())
    }
}

fn check_scored(y_true: &[u8], scores: &[f64]) -> Result<(f64, f64)> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch(y_true.len(), scores.len()));
    }
    let pos = y_true.iter().filter(|&&l| l == 1).count();
    let neg = y_true.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClassDataset);
    }
    Ok((pos as f64, neg as f64))
}

/// ROC curve over all distinct score thresholds, highest first. Tied scores
/// form a single step. The area is the trapezoidal sum over the points.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<RocCurve> {
    let (pos, neg) = check_scored(y_true, scores)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut auc = 0.0;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if y_true[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        let prev = *points.last().expect("starts with origin");
        let p = RocPoint {
            fpr: fp as f64 / neg,
            tpr: tp as f64 / pos,
            threshold: s,
        };
        auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
        points.push(p);
    }
    Ok(RocCurve { points, auc })
}

/// Mann–Whitney AUC by enumerating every (positive, negative) pair: the
/// fraction ranked correctly, ties counting ½. Quadratic; a reference for
/// [`roc_curve`].
pub fn auc_pairwise(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = check_scored(y_true, scores)?;
    let mut wins = 0.0;
    for (i, &li) in y_true.iter().enumerate() {
        if li != 1 {
            continue;
        }
        for (j, &lj) in y_true.iter().enumerate() {
            if lj != 0 {
                continue;
            }
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (pos * neg))
}

/// Row-normalizes each matrix by true class, then averages element-wise.
pub fn average_confusions(cms: &[ConfusionMatrix]) -> Result<NormalizedConfusion> {
    if cms.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut acc = NormalizedConfusion::default();
    for cm in cms {
        let n = cm.normalized()?;
        acc.tn += n.tn;
        acc.fp += n.fp;
        acc.fn_ += n.fn_;
        acc.tp += n.tp;
    }
    let k = cms.len() as f64;
    Ok(NormalizedConfusion {
        tn: acc.tn / k,
        fp: acc.fp / k,
        fn_: acc.fn_ / k,
        tp: acc.tp / k,
    })
}

/// Field-wise arithmetic mean of metric records.
pub fn mean_metrics(records: &[MetricsRecord]) -> Result<MetricsRecord> {
    if records.is_empty() {
        return Err(Error::EmptyList);
    }
    let k = records.len() as f64;
    let mean = |f: fn(&MetricsRecord) -> f64| records.iter().map(f).sum::<f64>() / k;
    let mut undefined: Vec<String> = records.iter().flat_map(|r| r.undefined.clone()).collect();
    undefined.sort();
    undefined.dedup();
    Ok(MetricsRecord {
        accuracy: mean(|r| r.accuracy),
        balanced_accuracy: mean(|r| r.balanced_accuracy),
        recall: mean(|r| r.recall),
        specificity: mean(|r| r.specificity),
        precision_macro: mean(|r| r.precision_macro),
        f1_macro: mean(|r| r.f1_macro),
        precision_positive: mean(|r| r.precision_positive),
        f1_positive: mean(|r| r.f1_positive),
        undefined,
    })
}
