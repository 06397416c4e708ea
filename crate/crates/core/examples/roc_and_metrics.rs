//! Confusion-matrix metrics, ROC curves with ties, and averaged confusions.

use balens::metrics::{
    auc_pairwise, average_confusions, compute_metrics, roc_curve, ConfusionMatrix,
};

fn main() -> balens::Result<()> {
    let cm = ConfusionMatrix {
        tp: 3,
        fp: 1,
        fn_: 2,
        tn: 4,
    };
    let m = compute_metrics(&cm)?;
    println!("{cm:?}");
    println!(
        "accuracy {:.2} balanced {:.2} recall {:.2} specificity {:.2} precision+ {:.2} macro F1 {:.3}",
        m.accuracy, m.balanced_accuracy, m.recall, m.specificity, m.precision_positive, m.f1_macro
    );

    let y = [1, 1, 0, 1, 0, 0, 1, 0];
    let s = [0.9, 0.8, 0.8, 0.6, 0.4, 0.4, 0.4, 0.1];
    let roc = roc_curve(&y, &s)?;
    for p in &roc.points {
        println!(
            "  threshold {:>5} fpr {:.2} tpr {:.2}",
            p.threshold, p.fpr, p.tpr
        );
    }
    println!(
        "AUC trapezoid {:.4}, pair counting {:.4}",
        roc.auc,
        auc_pairwise(&y, &s)?
    );

    let other = ConfusionMatrix {
        tp: 10,
        fp: 30,
        fn_: 0,
        tn: 60,
    };
    let avg = average_confusions(&[cm, other])?;
    println!(
        "row-normalized average: tn {:.3} fp {:.3} / fn {:.3} tp {:.3}",
        avg.tn, avg.fp, avg.fn_, avg.tp
    );
    Ok(())
}
