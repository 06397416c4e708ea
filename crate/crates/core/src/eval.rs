//! Stratified K-fold evaluation of the ensembles, plus a synthetic cohort
//! generator and the on-disk report files.
//!
//! Every fold metric is averaged with equal fold weight. Seeds for folds,
//! imputation and each classifier come from [`derive_seed`] on the
//! experiment seed and a stream name, so adding or removing a classifier
//! leaves the others' results untouched.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Cell, Dataset, FeatureKind, FeatureSpec};
use crate::ensemble::{self, ClassifierKind, Hyperparams};
use crate::error::{Error, Result};
use crate::metrics::{
    average_confusions, compute_metrics, confusion, mean_metrics, roc_curve, ConfusionMatrix,
    MetricsRecord, NormalizedConfusion, RocCurve,
};
use crate::preprocess::{ColumnOrigin, EncodedMatrix, FeatureFill, Preprocessor};
use crate::rng::{derive_seed, seeded, tag};
use crate::sampling::{stratified_kfold, FoldPlan};

pub const DEFAULT_FOLDS: usize = 6;
pub const DEFAULT_THRESHOLD: f64 = 0.30;
pub const DEFAULT_TOP_K: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub classifiers: Vec<ClassifierKind>,
    pub folds: usize,
    pub seed: u64,
    /// Fit one imputation plan and encoder on the whole dataset instead of
    /// one per training fold.
    pub paper_mode: bool,
    pub missingness_threshold: f64,
    pub hyperparams: BTreeMap<ClassifierKind, Hyperparams>,
    pub top_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            classifiers: ClassifierKind::ALL.to_vec(),
            folds: DEFAULT_FOLDS,
            seed: 0,
            paper_mode: false,
            missingness_threshold: DEFAULT_THRESHOLD,
            hyperparams: ClassifierKind::ALL
                .iter()
                .map(|&k| (k, Hyperparams::defaults(k)))
                .collect(),
            top_k: DEFAULT_TOP_K,
            dataset: None,
        }
    }
}

impl ExperimentConfig {
    pub fn with_classifiers(mut self, kinds: &[ClassifierKind]) -> Self {
        self.classifiers = kinds.to_vec();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn params(&self, kind: ClassifierKind) -> Hyperparams {
        self.hyperparams
            .get(&kind)
            .copied()
            .unwrap_or_else(|| Hyperparams::defaults(kind))
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::ConfigInvalid(format!(
                "folds must be >= 2, got {}",
                self.folds
            )));
        }
        if !(0.0..=1.0).contains(&self.missingness_threshold) {
            return Err(Error::ConfigInvalid(format!(
                "missingness threshold {} outside [0, 1]",
                self.missingness_threshold
            )));
        }
        if self.classifiers.is_empty() {
            return Err(Error::ConfigInvalid("no classifiers selected".into()));
        }
        let mut seen = self.classifiers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.classifiers.len() {
            return Err(Error::ConfigInvalid("classifier listed twice".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationSummary {
    /// `"fold"` or `"global"`.
    pub scope: String,
    /// 1-based fold number for fold-scoped plans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
    pub dropped: Vec<String>,
    pub fills: Vec<FeatureFill>,
    pub balanced_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldInfo {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub train_class_counts: [usize; 2],
    pub test_class_counts: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsRecord,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub kind: ClassifierKind,
    pub label: String,
    pub folds: Vec<FoldResult>,
    /// Unweighted mean over folds.
    pub mean: MetricsRecord,
    pub mean_auc: f64,
    /// AUC of all test-fold scores pooled into one curve.
    pub pooled_auc: f64,
    pub confusion_avg: NormalizedConfusion,
    /// Fold-averaged importances per source feature, in dataset column order.
    pub importance: Vec<FeatureScore>,
    #[serde(skip)]
    pub fold_rocs: Vec<RocCurve>,
    #[serde(skip)]
    pub pooled_roc: Option<RocCurve>,
    #[serde(skip)]
    pub fold_importances: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ExperimentConfig,
    pub n_rows: usize,
    pub n_features: usize,
    pub class_counts: [usize; 2],
    pub folds: Vec<FoldInfo>,
    pub imputation: Vec<ImputationSummary>,
    pub classifiers: Vec<ClassifierReport>,
}

impl EvalReport {
    pub fn classifier(&self, kind: ClassifierKind) -> Option<&ClassifierReport> {
        self.classifiers.iter().find(|c| c.kind == kind)
    }
}

/// Sums encoded-column importances back onto their source features
/// (one-hot groups add up). Output follows `source_names`.
pub fn attribute_to_sources(
    importances: &[f64],
    origin: &[ColumnOrigin],
    source_names: &[String],
) -> Vec<f64> {
    let position: BTreeMap<&str, usize> = source_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut out = vec![0.0; source_names.len()];
    for (v, o) in importances.iter().zip(origin) {
        if let Some(&i) = position.get(o.feature.as_str()) {
            out[i] += v;
        }
    }
    out
}

/// Features sorted by fold-averaged importance (descending, ties by name),
/// truncated to `top_k`.
pub fn rank_importances(report: &ClassifierReport, top_k: usize) -> Result<Vec<FeatureScore>> {
    if report.importance.is_empty() || report.folds.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut ranked = report.importance.clone();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.feature.cmp(&b.feature))
    });
    ranked.truncate(top_k);
    Ok(ranked)
}

struct FoldData {
    train: EncodedMatrix,
    test: EncodedMatrix,
    summary: Option<ImputationSummary>,
}

fn summarize(pre: &Preprocessor, scope: &str, fold: Option<usize>) -> ImputationSummary {
    ImputationSummary {
        scope: scope.to_string(),
        fold,
        dropped: pre.plan.dropped_names(),
        fills: pre.plan.fills.clone(),
        balanced_rows: pre.plan.balanced_rows,
    }
}

/// Fold result, ROC, source importances, test labels and test scores.
type ClassifierFold = (FoldResult, RocCurve, Vec<f64>, Vec<u8>, Vec<f64>);

struct FoldOutcome {
    info: FoldInfo,
    summary: Option<ImputationSummary>,
    per_classifier: Vec<ClassifierFold>,
}

/// Runs K-fold cross-validation of every configured classifier on `ds`.
pub fn run_experiment(config: &ExperimentConfig, ds: &Dataset) -> Result<EvalReport> {
    config.validate()?;
    let plan = stratified_kfold(
        ds.labels(),
        config.folds,
        &mut seeded(derive_seed(config.seed, tag("folds"))),
    )?;
    let impute_seed = derive_seed(config.seed, tag("impute"));
    let global = if config.paper_mode {
        let pre = Preprocessor::fit(ds, config.missingness_threshold, impute_seed)?;
        let encoded = pre.transform(ds)?;
        Some((summarize(&pre, "global", None), encoded))
    } else {
        None
    };
    let source_names: Vec<String> = ds.schema().iter().map(|s| s.name.clone()).collect();

    let outcomes = (0..config.folds)
        .into_par_iter()
        .map(|k| {
            run_fold(
                config,
                ds,
                &plan,
                k,
                global.as_ref().map(|g| &g.1),
                &source_names,
            )
        })
        .collect::<Result<Vec<FoldOutcome>>>()?;

    let mut imputation = Vec::new();
    if let Some((summary, _)) = &global {
        imputation.push(summary.clone());
    }
    imputation.extend(outcomes.iter().filter_map(|o| o.summary.clone()));

    let mut classifiers = Vec::with_capacity(config.classifiers.len());
    for (c, &kind) in config.classifiers.iter().enumerate() {
        let mut folds = Vec::new();
        let mut rocs = Vec::new();
        let mut fold_importances = Vec::new();
        let mut pooled_labels = Vec::new();
        let mut pooled_scores = Vec::new();
        for o in &outcomes {
            let (res, roc, imp, labels, scores) = &o.per_classifier[c];
            folds.push(res.clone());
            rocs.push(roc.clone());
            fold_importances.push(imp.clone());
            pooled_labels.extend_from_slice(labels);
            pooled_scores.extend_from_slice(scores);
        }
        let records: Vec<MetricsRecord> = folds.iter().map(|f| f.metrics.clone()).collect();
        let cms: Vec<ConfusionMatrix> = folds.iter().map(|f| f.confusion).collect();
        let pooled = roc_curve(&pooled_labels, &pooled_scores)?;
        let k = folds.len() as f64;
        let importance = source_names
            .iter()
            .enumerate()
            .map(|(i, name)| FeatureScore {
                feature: name.clone(),
                score: fold_importances.iter().map(|v| v[i]).sum::<f64>() / k,
            })
            .collect();
        classifiers.push(ClassifierReport {
            kind,
            label: kind.label().to_string(),
            mean: mean_metrics(&records)?,
            mean_auc: folds.iter().map(|f| f.auc).sum::<f64>() / k,
            pooled_auc: pooled.auc,
            confusion_avg: average_confusions(&cms)?,
            importance,
            folds,
            fold_rocs: rocs,
            pooled_roc: Some(pooled),
            fold_importances,
        });
    }

    Ok(EvalReport {
        config: config.clone(),
        n_rows: ds.n_rows(),
        n_features: ds.n_features(),
        class_counts: ds.class_counts(),
        folds: outcomes.into_iter().map(|o| o.info).collect(),
        imputation,
        classifiers,
    })
}

fn run_fold(
    config: &ExperimentConfig,
    ds: &Dataset,
    plan: &FoldPlan,
    k: usize,
    global: Option<&EncodedMatrix>,
    source_names: &[String],
) -> Result<FoldOutcome> {
    let train_idx = plan.train_indices(k);
    let test_idx = plan.test_indices(k);
    let data = match global {
        Some(encoded) => FoldData {
            train: encoded.select_rows(&train_idx),
            test: encoded.select_rows(&test_idx),
            summary: None,
        },
        None => {
            let train_ds = ds.select_rows(&train_idx);
            let seed = derive_seed(derive_seed(config.seed, tag("impute")), k as u64);
            let pre = Preprocessor::fit(&train_ds, config.missingness_threshold, seed)?;
            FoldData {
                train: pre.transform(&train_ds)?,
                test: pre.transform(&ds.select_rows(&test_idx))?,
                summary: Some(summarize(&pre, "fold", Some(k + 1))),
            }
        }
    };
    if data.train.n_cols() == 0 {
        return Err(Error::ConfigInvalid(format!(
            "fold {}: no features survive preprocessing",
            k + 1
        )));
    }

    let mut per_classifier = Vec::with_capacity(config.classifiers.len());
    for &kind in &config.classifiers {
        let seed = derive_seed(derive_seed(config.seed, tag(kind.short_name())), k as u64);
        let model = ensemble::fit(
            kind,
            &data.train.x,
            &data.train.labels,
            &config.params(kind),
            seed,
        )?;
        let scores = model.predict_scores(&data.test.x)?;
        let predicted: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();
        let cm = confusion(&data.test.labels, &predicted)?;
        let roc = roc_curve(&data.test.labels, &scores)?;
        let imp =
            attribute_to_sources(model.importances(), &data.train.column_origin, source_names);
        per_classifier.push((
            FoldResult {
                fold: k + 1,
                confusion: cm,
                metrics: compute_metrics(&cm)?,
                auc: roc.auc,
            },
            roc,
            imp,
            data.test.labels.clone(),
            scores,
        ));
    }
    let counts = |l: &[u8]| crate::sampling::class_counts(l);
    Ok(FoldOutcome {
        info: FoldInfo {
            fold: k + 1,
            n_train: train_idx.len(),
            n_test: test_idx.len(),
            train_class_counts: counts(&data.train.labels),
            test_class_counts: counts(&data.test.labels),
        },
        summary: data.summary,
        per_classifier,
    })
}

/// Shape of a synthetic cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    /// Numeric columns whose class means differ by `class_separation`.
    pub p_informative: usize,
    /// Numeric columns with identical class distributions.
    pub p_noise: usize,
    pub p_categorical: usize,
    pub n_categories: usize,
    pub positive_rate: f64,
    pub class_separation: f64,
    pub missing_rate: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 2000,
            p_informative: 10,
            p_noise: 10,
            p_categorical: 2,
            n_categories: 3,
            positive_rate: 0.05,
            class_separation: 2.0,
            missing_rate: 0.1,
            seed: 7,
        }
    }
}

impl SynthSpec {
    pub fn n_positive(&self) -> usize {
        (self.n as f64 * self.positive_rate).round() as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::SpecInvalid(m.to_string()));
        if self.n < 4 {
            return bad("n must be at least 4");
        }
        if !(self.positive_rate > 0.0 && self.positive_rate < 1.0) {
            return bad("positive_rate must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return bad("missing_rate must lie in [0, 1)");
        }
        if !self.class_separation.is_finite() {
            return bad("class_separation must be finite");
        }
        if self.p_informative + self.p_noise + self.p_categorical == 0 {
            return bad("at least one feature is required");
        }
        if self.p_categorical > 0 && self.n_categories < 2 {
            return bad("categorical features need at least 2 categories");
        }
        let pos = self.n_positive();
        if pos == 0 || pos == self.n {
            return bad("positive_rate leaves a class empty");
        }
        Ok(())
    }
}

/// Draws a cohort: class-conditional unit Gaussians (mean shift
/// `class_separation` on informative columns), categorical columns whose
/// category odds tilt with the class, and cells dropped completely at
/// random with probability `missing_rate`. Exactly
/// `round(n * positive_rate)` rows are positive.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let mut labels = vec![0u8; spec.n];
    for i in index::sample(&mut rng, spec.n, spec.n_positive()) {
        labels[i] = 1;
    }

    let mut schema = Vec::new();
    let mut push = |name: String, kind| {
        let index = schema.len();
        schema.push(FeatureSpec { name, kind, index });
    };
    for j in 0..spec.p_informative {
        push(format!("inf_{j:02}"), FeatureKind::Numeric);
    }
    for j in 0..spec.p_noise {
        push(format!("noise_{j:02}"), FeatureKind::Numeric);
    }
    for j in 0..spec.p_categorical {
        push(format!("cat_{j:02}"), FeatureKind::Categorical);
    }

    let cat_probs = |label: u8| -> Vec<f64> {
        // logits tilt linearly across categories for positives
        let k = spec.n_categories;
        let logits: Vec<f64> = (0..k)
            .map(|c| {
                let centred = c as f64 - (k - 1) as f64 / 2.0;
                label as f64 * spec.class_separation * centred / k as f64
            })
            .collect();
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        logits.iter().map(|l| l.exp() / z).collect()
    };
    let probs = [cat_probs(0), cat_probs(1)];

    let mut rows = Vec::with_capacity(spec.n);
    for &label in &labels {
        let mut row = Vec::with_capacity(schema.len());
        for j in 0..spec.p_informative + spec.p_noise {
            let z: f64 = StandardNormal.sample(&mut rng);
            let shift = if j < spec.p_informative {
                spec.class_separation * label as f64
            } else {
                0.0
            };
            row.push(Cell::Numeric(z + shift));
        }
        for _ in 0..spec.p_categorical {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = spec.n_categories - 1;
            for (c, p) in probs[label as usize].iter().enumerate() {
                acc += p;
                if u < acc {
                    chosen = c;
                    break;
                }
            }
            row.push(Cell::Category(format!("c{chosen}")));
        }
        for cell in row.iter_mut() {
            if spec.missing_rate > 0.0 && rng.random::<f64>() < spec.missing_rate {
                *cell = Cell::Missing;
            }
        }
        rows.push(row);
    }
    Dataset::new("dropout", schema, rows, labels)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn roc_rows(out: &mut Vec<u8>, label: &str, roc: &RocCurve) {
    for p in &roc.points {
        let _ = writeln!(out, "{label},{},{},{}", p.threshold, p.fpr, p.tpr);
    }
}

/// Writes `metrics.json`, `confusion_avg.csv`, `roc_fold{k}.csv`,
/// `roc_pooled.csv`, `importance.csv` and `config_echo.json` into `dir`.
pub fn write_outputs(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut metrics = serde_json::to_vec_pretty(report)?;
    metrics.push(b'\n');
    write_file(&dir.join("metrics.json"), &metrics)?;

    let mut cm = b"classifier,actual,predicted_negative,predicted_positive\n".to_vec();
    for c in &report.classifiers {
        let n = &c.confusion_avg;
        let _ = writeln!(cm, "{},negative,{},{}", c.label, n.tn, n.fp);
        let _ = writeln!(cm, "{},positive,{},{}", c.label, n.fn_, n.tp);
    }
    write_file(&dir.join("confusion_avg.csv"), &cm)?;

    for k in 0..report.folds.len() {
        let mut out = b"classifier,threshold,fpr,tpr\n".to_vec();
        for c in &report.classifiers {
            roc_rows(&mut out, &c.label, &c.fold_rocs[k]);
        }
        write_file(&dir.join(format!("roc_fold{}.csv", k + 1)), &out)?;
    }
    let mut pooled = b"classifier,threshold,fpr,tpr\n".to_vec();
    for c in &report.classifiers {
        if let Some(roc) = &c.pooled_roc {
            roc_rows(&mut pooled, &c.label, roc);
        }
    }
    write_file(&dir.join("roc_pooled.csv"), &pooled)?;

    let mut imp = b"classifier,rank,feature,score\n".to_vec();
    for c in &report.classifiers {
        for (rank, f) in rank_importances(c, usize::MAX)?.iter().enumerate() {
            let _ = writeln!(
                imp,
                "{},{},{},{}",
                c.label,
                rank + 1,
                csv_field(&f.feature),
                f.score
            );
        }
    }
    write_file(&dir.join("importance.csv"), &imp)?;

    #[derive(Serialize)]
    struct Echo<'a> {
        version: &'a str,
        started_at: String,
        config: &'a ExperimentConfig,
    }
    let echo = Echo {
        version: env!("CARGO_PKG_VERSION"),
        started_at: chrono::Utc::now().to_rfc3339(),
        config: &report.config,
    };
    let mut bytes = serde_json::to_vec_pretty(&echo)?;
    bytes.push(b'\n');
    write_file(&dir.join("config_echo.json"), &bytes)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Plain-text table with one row per classifier: accuracy, balanced
/// accuracy, recall, macro precision and macro F1 (fold means).
pub fn format_table(report: &EvalReport) -> String {
    let header = [
        "Classifier",
        "Accuracy",
        "Balanced Accuracy",
        "Recall",
        "Precision",
        "F1-Score",
    ];
    let rows: Vec<[String; 6]> = report
        .classifiers
        .iter()
        .map(|c| {
            let m = &c.mean;
            [
                c.label.clone(),
                format!("{:.3}", m.accuracy),
                format!("{:.3}", m.balanced_accuracy),
                format!("{:.3}", m.recall),
                format!("{:.3}", m.precision_macro),
                format!("{:.3}", m.f1_macro),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..6)
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header.to_vec());
    out.push_str(&format!(
        "|{}|\n",
        widths
            .iter()
            .map(|w| "-".repeat(w + 2))
            .collect::<Vec<_>>()
            .join("|")
    ));
    for r in &rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(kinds: &[ClassifierKind]) -> ExperimentConfig {
        let mut c = ExperimentConfig::default()
            .with_classifiers(kinds)
            .with_seed(3);
        for k in ClassifierKind::ALL {
            let p = Hyperparams::defaults(k);
            let p = match k {
                ClassifierKind::BalancedRandomForest => p.with_estimators(10),
                ClassifierKind::RusBoost => p.with_estimators(10),
                ClassifierKind::EasyEnsemble => p.with_estimators(3).with_rounds(5),
                ClassifierKind::BalancedBagging => p.with_estimators(3),
            };
            c.hyperparams.insert(k, p);
        }
        c
    }

    #[test]
    fn synthetic_positive_count_and_missing() {
        let spec = SynthSpec::default();
        let ds = generate_synthetic(&spec).unwrap();
        assert_eq!(ds.class_counts()[1], 100);
        assert!(ds.total_missing() > 0);
        let none = generate_synthetic(&SynthSpec {
            missing_rate: 0.0,
            ..spec.clone()
        })
        .unwrap();
        assert_eq!(none.total_missing(), 0);
        assert!(generate_synthetic(&SynthSpec {
            n: 3,
            ..spec.clone()
        })
        .is_err());
        assert!(generate_synthetic(&SynthSpec {
            positive_rate: 1.0,
            ..spec
        })
        .is_err());
    }

    #[test]
    fn fold_sizes_for_sixty_balanced_rows() {
        let ds = generate_synthetic(&SynthSpec {
            n: 60,
            positive_rate: 0.5,
            missing_rate: 0.0,
            p_categorical: 0,
            ..SynthSpec::default()
        })
        .unwrap();
        let report = run_experiment(&small_config(&ClassifierKind::ALL), &ds).unwrap();
        assert_eq!(report.folds.len(), 6);
        assert!(report
            .folds
            .iter()
            .all(|f| f.n_train == 50 && f.n_test == 10));
        for c in &report.classifiers {
            assert_eq!(c.folds.len(), 6);
        }
    }

    #[test]
    fn mean_metrics_are_fold_means() {
        let ds = generate_synthetic(&SynthSpec {
            n: 300,
            positive_rate: 0.2,
            ..SynthSpec::default()
        })
        .unwrap();
        let report =
            run_experiment(&small_config(&[ClassifierKind::BalancedRandomForest]), &ds).unwrap();
        let c = &report.classifiers[0];
        let mean = c
            .folds
            .iter()
            .map(|f| f.metrics.balanced_accuracy)
            .sum::<f64>()
            / 6.0;
        assert!((c.mean.balanced_accuracy - mean).abs() < 1e-12);
        for v in &c.fold_importances {
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn paper_mode_matches_fold_mode_without_missing_cells() {
        let ds = generate_synthetic(&SynthSpec {
            n: 240,
            positive_rate: 0.25,
            missing_rate: 0.0,
            ..SynthSpec::default()
        })
        .unwrap();
        let cfg = small_config(&[
            ClassifierKind::BalancedRandomForest,
            ClassifierKind::RusBoost,
        ]);
        let a = run_experiment(&cfg, &ds).unwrap();
        let b = run_experiment(
            &ExperimentConfig {
                paper_mode: true,
                ..cfg
            },
            &ds,
        )
        .unwrap();
        assert_eq!(a.classifiers, b.classifiers);
        assert_ne!(a.imputation, b.imputation);
    }

    #[test]
    fn group_sum_attribution() {
        let origin = vec![
            ColumnOrigin {
                feature: "a".into(),
                source_index: 0,
                category: None,
            },
            ColumnOrigin {
                feature: "g".into(),
                source_index: 1,
                category: Some("x".into()),
            },
            ColumnOrigin {
                feature: "g".into(),
                source_index: 1,
                category: Some("y".into()),
            },
        ];
        let names = vec!["a".to_string(), "g".to_string(), "dropped".to_string()];
        let out = attribute_to_sources(&[0.7, 0.1, 0.2], &origin, &names);
        assert!((out[1] - 0.3).abs() < 1e-15);
        assert_eq!(out[2], 0.0);
    }

    #[test]
    fn ranking_truncates_and_orders() {
        let report = ClassifierReport {
            kind: ClassifierKind::BalancedRandomForest,
            label: "B-RandomForest".into(),
            folds: vec![FoldResult {
                fold: 1,
                confusion: ConfusionMatrix {
                    tp: 1,
                    fp: 0,
                    fn_: 0,
                    tn: 1,
                },
                metrics: compute_metrics(&ConfusionMatrix {
                    tp: 1,
                    fp: 0,
                    fn_: 0,
                    tn: 1,
                })
                .unwrap(),
                auc: 1.0,
            }],
            mean: compute_metrics(&ConfusionMatrix {
                tp: 1,
                fp: 0,
                fn_: 0,
                tn: 1,
            })
            .unwrap(),
            mean_auc: 1.0,
            pooled_auc: 1.0,
            confusion_avg: NormalizedConfusion::default(),
            importance: ["b", "a", "c"]
                .iter()
                .zip([0.25, 0.25, 0.5])
                .map(|(f, s)| FeatureScore {
                    feature: f.to_string(),
                    score: s,
                })
                .collect(),
            fold_rocs: vec![],
            pooled_roc: None,
            fold_importances: vec![],
        };
        let all = rank_importances(&report, 20).unwrap();
        let names: Vec<_> = all.iter().map(|f| f.feature.as_str()).collect();
        assert_eq!(names, ["c", "a", "b"]);
        assert_eq!(rank_importances(&report, 1).unwrap().len(), 1);
        let empty = ClassifierReport {
            importance: vec![],
            ..report
        };
        assert!(matches!(
            rank_importances(&empty, 3),
            Err(Error::EmptyReport)
        ));
    }

    #[test]
    fn only_informative_feature_ranks_first() {
        let ds = generate_synthetic(&SynthSpec {
            n: 400,
            p_informative: 1,
            p_noise: 4,
            p_categorical: 0,
            positive_rate: 0.2,
            class_separation: 3.0,
            missing_rate: 0.0,
            ..SynthSpec::default()
        })
        .unwrap();
        let report = run_experiment(&small_config(&[ClassifierKind::RusBoost]), &ds).unwrap();
        let ranked = rank_importances(&report.classifiers[0], 20).unwrap();
        assert_eq!(ranked.len(), 5);
        assert_eq!(ranked[0].feature, "inf_00");
        assert!(ranked[0].score > 0.5, "{}", ranked[0].score);
    }

    #[test]
    fn config_validation() {
        let ds = generate_synthetic(&SynthSpec {
            n: 100,
            ..SynthSpec::default()
        })
        .unwrap();
        let bad = ExperimentConfig {
            folds: 1,
            ..ExperimentConfig::default()
        };
        assert!(matches!(
            run_experiment(&bad, &ds),
            Err(Error::ConfigInvalid(_))
        ));
        // 5 positives cannot fill 6 folds
        assert!(matches!(
            run_experiment(&ExperimentConfig::default(), &ds),
            Err(Error::TooFewClassMembers { class: 1, .. })
        ));
    }

    #[test]
    fn table_has_expected_header() {
        let ds = generate_synthetic(&SynthSpec {
            n: 240,
            positive_rate: 0.25,
            ..SynthSpec::default()
        })
        .unwrap();
        let report = run_experiment(&small_config(&ClassifierKind::ALL), &ds).unwrap();
        let table = format_table(&report);
        let first = table.lines().next().unwrap();
        let cols: Vec<&str> = first.trim_matches('|').split('|').map(str::trim).collect();
        assert_eq!(
            cols,
            [
                "Classifier",
                "Accuracy",
                "Balanced Accuracy",
                "Recall",
                "Precision",
                "F1-Score"
            ]
        );
        assert_eq!(table.lines().count(), 6);
    }
}
