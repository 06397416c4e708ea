//! Fit a Balanced Random Forest on a held-out split and score it.

use balens::ensemble::{fit_balanced_random_forest, ClassifierKind, Hyperparams};
use balens::eval::{generate_synthetic, SynthSpec};
use balens::metrics::{compute_metrics, confusion, roc_curve};
use balens::preprocess::Preprocessor;

fn main() -> balens::Result<()> {
    let ds = generate_synthetic(&SynthSpec {
        n: 3000,
        class_separation: 1.0,
        ..SynthSpec::default()
    })?;
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) =
        (0..ds.n_rows()).partition(|i| i % 3 != 0);
    let train = ds.select_rows(&train_idx);
    let test = ds.select_rows(&test_idx);

    let pre = Preprocessor::fit(&train, 0.3, 0)?;
    let (tr, te) = (pre.transform(&train)?, pre.transform(&test)?);

    let params = Hyperparams::defaults(ClassifierKind::BalancedRandomForest);
    let forest = fit_balanced_random_forest(&tr.x, &tr.labels, &params, 42)?;
    let scores = forest.predict_scores(&te.x)?;
    let pred: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();
    let m = compute_metrics(&confusion(&te.labels, &pred)?)?;
    println!(
        "{} trees: balanced accuracy {:.3}, recall {:.3}, specificity {:.3}, AUC {:.3}",
        forest.members.len(),
        m.balanced_accuracy,
        m.recall,
        m.specificity,
        roc_curve(&te.labels, &scores)?.auc
    );
    let depths: Vec<usize> = forest.members.iter().map(|t| t.tree.depth()).collect();
    println!(
        "tree depths range {}..{}",
        depths.iter().min().unwrap(),
        depths.iter().max().unwrap()
    );
    Ok(())
}
