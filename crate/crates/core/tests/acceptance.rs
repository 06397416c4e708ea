//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.
//!
//!     cargo test -p balens --test acceptance

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

use balens::data::{Cell, Dataset, FeatureKind, FeatureSpec};
use balens::ensemble::{self, adaboost_alpha, ClassifierKind, Hyperparams};
use balens::eval::{
    generate_synthetic, rank_importances, run_experiment, ExperimentConfig, SynthSpec,
};
use balens::matrix::Matrix;
use balens::metrics::{compute_metrics, roc_curve, ConfusionMatrix};
use balens::preprocess::filter_by_missingness;
use balens::rng::{seeded, Rng};
use balens::sampling::{random_undersample, stratified_kfold, weighted_undersample};
use balens::tree::{fit_unweighted, TreeParams};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    check(took < budget, || {
        format!("took {took:.2?}, budget {budget:?}")
    })
}

// Oracles

/// Mann-Whitney statistic by counting pairs, ties worth one half.
fn pair_count_auc(y: &[u8], s: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                if s[i] > s[j] {
                    wins += 1.0;
                } else if s[i] == s[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn gini(counts: [f64; 2]) -> f64 {
    let n = counts[0] + counts[1];
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[1] / n;
    2.0 * p * (1.0 - p)
}

/// Recomputes the weighted Gini decrease of splitting `rows` at
/// `x[feature] < threshold` from scratch.
fn gini_decrease(x: &Matrix, y: &[u8], rows: &[usize], feature: usize, threshold: f64) -> f64 {
    let mut parent = [0.0; 2];
    let mut left = [0.0; 2];
    let mut right = [0.0; 2];
    for &i in rows {
        parent[y[i] as usize] += 1.0;
        if x.get(i, feature) < threshold {
            left[y[i] as usize] += 1.0;
        } else {
            right[y[i] as usize] += 1.0;
        }
    }
    let n = rows.len() as f64;
    let nl = left[0] + left[1];
    let nr = right[0] + right[1];
    gini(parent) - (nl / n) * gini(left) - (nr / n) * gini(right)
}

fn random_matrix(rng: &mut Rng, n: usize, p: usize) -> Matrix {
    let data = (0..n * p).map(|_| rng.random::<f64>()).collect();
    Matrix::new(data, n, p).unwrap()
}

fn random_labels_both(rng: &mut Rng, n: usize) -> Vec<u8> {
    loop {
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.3))).collect();
        if y.contains(&0) && y.contains(&1) {
            return y;
        }
    }
}

fn benchmark_spec() -> SynthSpec {
    SynthSpec {
        n: 2000,
        positive_rate: 0.05,
        class_separation: 2.0,
        p_informative: 10,
        p_noise: 10,
        p_categorical: 0,
        missing_rate: 0.1,
        seed: 7,
        ..SynthSpec::default()
    }
}

// Criteria

fn metric_oracle() -> Outcome {
    let started = Instant::now();
    let cm = ConfusionMatrix {
        tp: 3,
        fp: 1,
        fn_: 2,
        tn: 4,
    };
    let m = compute_metrics(&cm).map_err(|e| e.to_string())?;
    let expected = [
        ("recall", m.recall, 3.0 / 5.0),
        ("specificity", m.specificity, 4.0 / 5.0),
        ("balanced_accuracy", m.balanced_accuracy, 0.7),
        ("accuracy", m.accuracy, 7.0 / 10.0),
        ("precision_positive", m.precision_positive, 3.0 / 4.0),
    ];
    for (name, got, want) in expected {
        check((got - want).abs() <= 1e-12, || {
            format!("{name} = {got}, want {want}")
        })?;
    }
    within(Duration::from_secs(1), started)?;
    Ok("5 metrics exact to 1e-12".into())
}

fn auc_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = seeded(2);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.random_range(2..=1000);
        let y = random_labels_both(&mut rng, n);
        // every other instance uses a coarse grid so scores tie heavily
        let s: Vec<f64> = if case % 2 == 0 {
            (0..n)
                .map(|_| rng.random_range(0..8) as f64 / 8.0)
                .collect()
        } else {
            (0..n).map(|_| rng.random::<f64>()).collect()
        };
        let auc = roc_curve(&y, &s).map_err(|e| e.to_string())?.auc;
        let oracle = pair_count_auc(&y, &s);
        worst = worst.max((auc - oracle).abs());
        check(worst <= 1e-9, || {
            format!("case {case}: trapezoid {auc} vs pairs {oracle}")
        })?;
    }
    within(Duration::from_secs(30), started)?;
    Ok(format!("200 instances, max gap {worst:.1e}"))
}

fn balanced_accuracy_identity() -> Outcome {
    let mut rng = seeded(3);
    for _ in 0..1000 {
        let cm = ConfusionMatrix {
            tp: rng.random_range(0..500),
            fn_: rng.random_range(0..500),
            fp: rng.random_range(0..500),
            tn: rng.random_range(0..500),
        };
        if cm.tp + cm.fn_ == 0 || cm.fp + cm.tn == 0 {
            continue;
        }
        let m = compute_metrics(&cm).map_err(|e| e.to_string())?;
        let recall = cm.tp as f64 / (cm.tp + cm.fn_) as f64;
        let specificity = cm.tn as f64 / (cm.tn + cm.fp) as f64;
        check(m.balanced_accuracy == (recall + specificity) / 2.0, || {
            format!("{cm:?}")
        })?;
        check(
            m.balanced_accuracy == (m.recall + m.specificity) / 2.0,
            || format!("{cm:?}"),
        )?;
    }
    // balanced test sets: accuracy and balanced accuracy coincide
    for _ in 0..200 {
        let half = rng.random_range(1..300u64);
        let tp = rng.random_range(0..=half);
        let tn = rng.random_range(0..=half);
        let cm = ConfusionMatrix {
            tp,
            fn_: half - tp,
            tn,
            fp: half - tn,
        };
        let m = compute_metrics(&cm).map_err(|e| e.to_string())?;
        check((m.accuracy - m.balanced_accuracy).abs() <= 1e-12, || {
            format!("{cm:?}")
        })?;
    }
    Ok("1000 matrices exact, 200 balanced sets within 1e-12".into())
}

fn balance_invariants() -> Outcome {
    let mut checked = 0usize;
    for run in 0..100u64 {
        let mut rng = seeded(1000 + run);
        let n = rng.random_range(20..120);
        let y = random_labels_both(&mut rng, n);
        let x = random_matrix(&mut rng, n, 4);

        let s = random_undersample(&y, &mut rng).map_err(|e| e.to_string())?;
        let c = s.class_counts(&y);
        check(c[0] == c[1], || {
            format!("run {run}: random_undersample {c:?}")
        })?;
        checked += 1;

        // the samplers behind forest/bagging members and RUSBoost rounds
        let boot = ensemble::balanced_bootstrap(&y, &mut rng).map_err(|e| e.to_string())?;
        let c = boot.class_counts(&y);
        check(c[0] == c[1], || {
            format!("run {run}: balanced_bootstrap {c:?}")
        })?;
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
        let ws = weighted_undersample(&y, &w, &mut rng).map_err(|e| e.to_string())?;
        let c = ws.class_counts(&y);
        check(c[0] == c[1], || {
            format!("run {run}: weighted_undersample {c:?}")
        })?;
        checked += 2;

        let sizes = [
            (ClassifierKind::BalancedRandomForest, 5),
            (ClassifierKind::BalancedBagging, 3),
            (ClassifierKind::RusBoost, 10),
        ];
        for (kind, n_est) in sizes {
            let params = Hyperparams::defaults(kind).with_estimators(n_est);
            let model = ensemble::fit(kind, &x, &y, &params, run).map_err(|e| e.to_string())?;
            for m in &model.members {
                let c = m.sample_class_counts;
                check(c[0] == c[1] && c[0] > 0, || {
                    format!("run {run}: {kind} member {c:?}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} subsamples balanced"))
}

fn stratification() -> Outcome {
    let mut rng = seeded(5);
    for case in 0..500 {
        let k = rng.random_range(2..=10);
        let n_pos = rng.random_range(k..k + 40);
        let n_neg = rng.random_range(k..k + 200);
        let mut y: Vec<u8> = [vec![1u8; n_pos], vec![0u8; n_neg]].concat();
        y.shuffle(&mut rng);
        let plan = stratified_kfold(&y, k, &mut rng).map_err(|e| e.to_string())?;
        let mut seen = vec![0usize; y.len()];
        let mut per_fold = vec![[0usize; 2]; k];
        for (f, counts) in per_fold.iter_mut().enumerate() {
            for i in plan.test_indices(f) {
                seen[i] += 1;
                counts[y[i] as usize] += 1;
            }
        }
        check(seen.iter().all(|&c| c == 1), || {
            format!("case {case}: folds do not partition")
        })?;
        for class in 0..2 {
            let counts: Vec<usize> = per_fold.iter().map(|c| c[class]).collect();
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            check(spread <= 1, || {
                format!("case {case}: class {class} counts {counts:?}")
            })?;
        }
    }
    Ok("500 instances".into())
}

fn tree_correctness() -> Outcome {
    let mut rng = seeded(6);
    let mut n_splits = 0;
    for case in 0..100 {
        let n = rng.random_range(2..=200);
        let p = rng.random_range(1..=10);
        // continuous features: distinct rows, so any labelling is consistent
        let x = random_matrix(&mut rng, n, p);
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.4))).collect();
        let tree =
            fit_unweighted(&x, &y, &TreeParams::default(), &mut rng).map_err(|e| e.to_string())?;
        let correct = x
            .rows()
            .zip(&y)
            .filter(|(r, &l)| tree.predict_label(r).unwrap() == l)
            .count();
        check(correct == n, || {
            format!("case {case}: training accuracy {correct}/{n}")
        })?;
        n_splits += check_splits_decrease(&tree.root, &x, &y, (0..n).collect())
            .map_err(|e| format!("case {case}: {e}"))?;
    }

    let x = Matrix::from_rows(&[
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ])
    .unwrap();
    let y = [0, 1, 1, 0];
    let params = TreeParams {
        max_depth: Some(2),
        ..TreeParams::default()
    };
    let tree = fit_unweighted(&x, &y, &params, &mut rng).map_err(|e| e.to_string())?;
    let fits = x
        .rows()
        .zip(&y)
        .all(|(r, &l)| tree.predict_label(r).unwrap() == l);
    check(fits && tree.depth() == 2, || {
        format!("XOR: fits={fits}, depth={}", tree.depth())
    })?;
    Ok(format!(
        "100 datasets at accuracy 1.0, {n_splits} splits all decrease Gini, XOR exact"
    ))
}

fn check_splits_decrease(
    node: &balens::tree::TreeNode,
    x: &Matrix,
    y: &[u8],
    rows: Vec<usize>,
) -> Result<usize, String> {
    match node {
        balens::tree::TreeNode::Leaf { .. } => Ok(0),
        balens::tree::TreeNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } => {
            let d = gini_decrease(x, y, &rows, *feature, *threshold);
            check(d > 0.0, || {
                format!("split on {feature} < {threshold} decreases Gini by {d}")
            })?;
            let (l, r): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| x.get(i, *feature) < *threshold);
            Ok(1 + check_splits_decrease(left, x, y, l)? + check_splits_decrease(right, x, y, r)?)
        }
    }
}

fn adaboost_identity() -> Outcome {
    let mut rng = seeded(7);
    let mut rounds = 0;
    for case in 0..50 {
        let n = rng.random_range(30..200);
        let x = random_matrix(&mut rng, n, 5);
        let y = random_labels_both(&mut rng, n);
        for resample in [false, true] {
            let chain = ensemble::fit_adaboost(&x, &y, &vec![1.0; n], 10, &mut rng, resample)
                .map_err(|e| e.to_string())?;
            for (m, r) in chain.members.iter().zip(&chain.rounds) {
                if r.error <= 0.0 {
                    continue;
                }
                let err: f64 = x
                    .rows()
                    .zip(&y)
                    .zip(&r.weights_after)
                    .filter(|((row, &l), _)| m.tree.predict_label(row).unwrap() != l)
                    .map(|(_, w)| w)
                    .sum();
                check((err - 0.5).abs() <= 1e-9, || {
                    format!("case {case}: updated error {err}")
                })?;
                rounds += 1;
            }
        }
    }
    let alpha = adaboost_alpha(0.25);
    let half_ln3 = 0.5 * 3f64.ln();
    check((alpha - half_ln3).abs() <= 1e-12, || {
        format!("alpha(0.25) = {alpha}")
    })?;
    Ok(format!("{rounds} rounds at 0.5, alpha(0.25) = ln(3)/2"))
}

fn forest_degeneracy() -> Outcome {
    let mut rng = seeded(8);
    let x = random_matrix(&mut rng, 150, 6);
    let y = random_labels_both(&mut rng, 150);
    let probe = random_matrix(&mut rng, 200, 6);

    let kind = ClassifierKind::BalancedRandomForest;
    let single = ensemble::fit(
        kind,
        &x,
        &y,
        &Hyperparams::defaults(kind).with_estimators(1),
        11,
    )
    .map_err(|e| e.to_string())?;
    for r in probe.rows() {
        let f = single.predict_score(r).unwrap();
        let t = single.members[0].tree.predict_score(r).unwrap();
        check(f == t, || format!("D=1 forest {f} vs tree {t}"))?;
    }

    let forest = ensemble::fit(
        kind,
        &x,
        &y,
        &Hyperparams::defaults(kind).with_estimators(25),
        12,
    )
    .map_err(|e| e.to_string())?;
    for r in probe.rows() {
        let f = forest.predict_score(r).unwrap();
        let mean = forest
            .members
            .iter()
            .map(|m| m.tree.predict_score(r).unwrap())
            .sum::<f64>()
            / 25.0;
        check((f - mean).abs() <= 1e-12, || {
            format!("forest {f} vs member mean {mean}")
        })?;
    }
    Ok("D=1 identical, D=25 equals member mean".into())
}

struct Benchmark {
    report: balens::eval::EvalReport,
    took: Duration,
}

fn run_benchmark() -> Result<Benchmark, String> {
    let started = Instant::now();
    let ds = generate_synthetic(&benchmark_spec()).map_err(|e| e.to_string())?;
    let report = run_experiment(&ExperimentConfig::default(), &ds).map_err(|e| e.to_string())?;
    Ok(Benchmark {
        report,
        took: started.elapsed(),
    })
}

fn synthetic_benchmark(b: &Benchmark) -> Outcome {
    let brf = b
        .report
        .classifier(ClassifierKind::BalancedRandomForest)
        .ok_or("no forest")?;
    check(brf.mean.balanced_accuracy >= 0.85, || {
        format!(
            "B-RandomForest balanced accuracy {:.4}",
            brf.mean.balanced_accuracy
        )
    })?;
    check(brf.mean_auc >= 0.90, || {
        format!("B-RandomForest AUC {:.4}", brf.mean_auc)
    })?;
    let mut parts = Vec::new();
    for c in &b.report.classifiers {
        check(c.mean.balanced_accuracy >= 0.75, || {
            format!(
                "{} balanced accuracy {:.4}",
                c.label, c.mean.balanced_accuracy
            )
        })?;
        parts.push(format!(
            "{} {:.3}/{:.3}",
            c.label, c.mean.balanced_accuracy, c.mean_auc
        ));
    }
    check(b.took < Duration::from_secs(120), || {
        format!("took {:.1?}", b.took)
    })?;
    Ok(format!("BA/AUC: {} in {:.1?}", parts.join(", "), b.took))
}

fn null_experiment() -> Outcome {
    let spec = SynthSpec {
        class_separation: 0.0,
        ..benchmark_spec()
    };
    let ds = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let report = run_experiment(&ExperimentConfig::default(), &ds).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for c in &report.classifiers {
        check((0.45..=0.55).contains(&c.mean_auc), || {
            format!("{} mean AUC {:.4}", c.label, c.mean_auc)
        })?;
        parts.push(format!("{} {:.3}", c.label, c.mean_auc));
    }
    Ok(format!("mean AUC: {}", parts.join(", ")))
}

fn importance_sanity(b: &Benchmark) -> Outcome {
    let mut parts = Vec::new();
    for c in &b.report.classifiers {
        let top = rank_importances(c, 10).map_err(|e| e.to_string())?;
        let hits = top.iter().filter(|f| f.feature.starts_with("inf_")).count();
        check(hits >= 8, || {
            format!("{}: {hits}/10 informative in top 10", c.label)
        })?;
        parts.push(format!("{} {hits}/10", c.label));
    }
    Ok(parts.join(", "))
}

fn balens(args: &[&str], dir: &Path) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_balens"))
        .args(args)
        .current_dir(dir)
        .env_remove("BALENS_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    check(out.status.success(), || {
        format!(
            "balens {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(stdout)
}

fn cli_cohort() -> Result<tempfile::TempDir, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    balens(
        &[
            "synth",
            "--n",
            "600",
            "--positive-rate",
            "0.1",
            "--seed",
            "3",
            "--out",
            ".",
        ],
        dir.path(),
    )?;
    Ok(dir)
}

fn determinism() -> Outcome {
    let dir = cli_cohort()?;
    let mut outputs = Vec::new();
    for (run, threads) in [("a", "1"), ("b", "4"), ("c", "4")] {
        balens(
            &[
                "evaluate",
                "--input",
                "cohort.csv",
                "--categorical",
                "cat_00,cat_01",
                "--seed",
                "42",
                "--threads",
                threads,
                "--out",
                run,
            ],
            dir.path(),
        )?;
        let read = |f: &str| std::fs::read(dir.path().join(run).join(f)).map_err(|e| e.to_string());
        outputs.push((read("metrics.json")?, read("importance.csv")?));
    }
    check(outputs.windows(2).all(|w| w[0] == w[1]), || {
        "outputs differ between runs".into()
    })?;
    Ok("metrics.json and importance.csv identical across 1 and 4 threads".into())
}

fn preprocessing_boundary() -> Outcome {
    for n in [10usize, 20, 100, 1000] {
        let at = n * 3 / 10;
        let schema = vec![
            FeatureSpec {
                name: "at_limit".into(),
                kind: FeatureKind::Numeric,
                index: 0,
            },
            FeatureSpec {
                name: "over_limit".into(),
                kind: FeatureKind::Numeric,
                index: 1,
            },
        ];
        let rows = (0..n)
            .map(|i| {
                let cell = |missing: bool| {
                    if missing {
                        Cell::Missing
                    } else {
                        Cell::Numeric(i as f64)
                    }
                };
                vec![cell(i < at), cell(i <= at)]
            })
            .collect();
        let labels = (0..n).map(|i| (i % 2) as u8).collect();
        let ds = Dataset::new("y", schema, rows, labels).map_err(|e| e.to_string())?;
        let (kept, dropped) = filter_by_missingness(&ds, 0.30).map_err(|e| e.to_string())?;
        let names: Vec<&str> = kept.schema().iter().map(|s| s.name.as_str()).collect();
        check(names == ["at_limit"] && dropped == [1], || {
            format!("n={n}: kept {names:?}")
        })?;
    }

    // Poison the test fold's present cells; that fold's plan must not move.
    let spec = SynthSpec {
        n: 360,
        p_categorical: 2,
        positive_rate: 0.2,
        missing_rate: 0.15,
        ..SynthSpec::default()
    };
    let ds = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let config = ExperimentConfig {
        hyperparams: BTreeMap::from([(
            ClassifierKind::BalancedBagging,
            Hyperparams::defaults(ClassifierKind::BalancedBagging).with_estimators(1),
        )]),
        ..ExperimentConfig::default()
    }
    .with_classifiers(&[ClassifierKind::BalancedBagging])
    .with_seed(9);
    let clean = run_experiment(&config, &ds).map_err(|e| e.to_string())?;
    let plan = stratified_kfold(
        ds.labels(),
        config.folds,
        &mut seeded(balens::rng::derive_seed(
            config.seed,
            balens::rng::tag("folds"),
        )),
    )
    .map_err(|e| e.to_string())?;
    for k in 0..config.folds {
        let test: std::collections::HashSet<usize> = plan.test_indices(k).into_iter().collect();
        let rows = ds
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .map(|c| match c {
                        Cell::Numeric(_) if test.contains(&i) => Cell::Numeric(1e12),
                        Cell::Category(_) if test.contains(&i) => Cell::Category("POISON".into()),
                        other => other.clone(),
                    })
                    .collect()
            })
            .collect();
        let poisoned = Dataset::new(
            ds.target(),
            ds.schema().to_vec(),
            rows,
            ds.labels().to_vec(),
        )
        .map_err(|e| e.to_string())?;
        let report = run_experiment(&config, &poisoned).map_err(|e| e.to_string())?;
        check(report.folds[k] == clean.folds[k], || {
            format!("fold {}: split changed", k + 1)
        })?;
        check(report.imputation[k] == clean.imputation[k], || {
            format!("fold {}: imputation plan read test cells", k + 1)
        })?;
        let json = serde_json::to_string(&report.imputation[k]).unwrap();
        check(
            !json.contains("POISON") && !json.contains("1000000000000"),
            || format!("fold {}: sentinel leaked into plan", k + 1),
        )?;
    }
    Ok("30.0% kept, 30% + 1 cell dropped; 6 fold plans unmoved by poisoned test cells".into())
}

fn report_shape() -> Outcome {
    let dir = cli_cohort()?;
    let stdout = balens(
        &[
            "evaluate",
            "--input",
            "cohort.csv",
            "--categorical",
            "cat_00,cat_01",
            "--out",
            "eval",
        ],
        dir.path(),
    )?;
    let mut lines = stdout.lines().filter(|l| l.starts_with('|'));
    let header: Vec<String> = lines
        .next()
        .ok_or("no table printed")?
        .split('|')
        .map(|c| c.trim().to_string())
        .filter(|c| !c.is_empty())
        .collect();
    let want = [
        "Classifier",
        "Accuracy",
        "Balanced Accuracy",
        "Recall",
        "Precision",
        "F1-Score",
    ];
    check(header == want, || format!("header {header:?}"))?;
    let labels: Vec<String> = lines
        .skip(1)
        .map(|l| l.split('|').nth(1).unwrap_or("").trim().to_string())
        .collect();
    let want_labels = ["E-Ensemble", "B-Boosting", "B-Bagging", "B-RandomForest"];
    check(labels == want_labels, || format!("rows {labels:?}"))?;
    Ok("6 columns, 4 classifier rows".into())
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id: u32, name: &'static str, outcome: Outcome| {
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("criterion {id:>2} {tag} {name}: {detail}");
        results.push((id, name, outcome));
    };

    record(1, "metric oracle", metric_oracle());
    record(2, "AUC equivalence", auc_equivalence());
    record(
        3,
        "balanced accuracy identity",
        balanced_accuracy_identity(),
    );
    record(4, "balance invariants", balance_invariants());
    record(5, "stratification", stratification());
    record(6, "tree correctness", tree_correctness());
    record(7, "AdaBoost identity", adaboost_identity());
    record(8, "forest degeneracy", forest_degeneracy());
    match run_benchmark() {
        Ok(b) => {
            record(9, "synthetic benchmark", synthetic_benchmark(&b));
            record(10, "null experiment", null_experiment());
            record(11, "importance sanity", importance_sanity(&b));
        }
        Err(e) => {
            record(9, "synthetic benchmark", Err(e.clone()));
            record(10, "null experiment", null_experiment());
            record(11, "importance sanity", Err(e));
        }
    }
    record(12, "determinism", determinism());
    record(13, "preprocessing boundary", preprocessing_boundary());
    record(14, "report shape", report_shape());

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
