//! Balanced Bagging against a plain CART tree on imbalanced data.

use balens::ensemble::{fit_balanced_bagging, ClassifierKind, Hyperparams};
use balens::eval::{generate_synthetic, SynthSpec};
use balens::metrics::{compute_metrics, confusion};
use balens::preprocess::Preprocessor;
use balens::rng::seeded;
use balens::tree::{fit_unweighted, TreeParams};

fn main() -> balens::Result<()> {
    let spec = SynthSpec {
        n: 4000,
        positive_rate: 0.03,
        class_separation: 1.0,
        ..SynthSpec::default()
    };
    let ds = generate_synthetic(&spec)?;
    let (a, b): (Vec<usize>, Vec<usize>) = (0..ds.n_rows()).partition(|i| i % 2 == 0);
    let pre = Preprocessor::fit(&ds.select_rows(&a), 0.3, 0)?;
    let tr = pre.transform(&ds.select_rows(&a))?;
    let te = pre.transform(&ds.select_rows(&b))?;

    let cart = fit_unweighted(&tr.x, &tr.labels, &TreeParams::default(), &mut seeded(0))?;
    let bag = fit_balanced_bagging(
        &tr.x,
        &tr.labels,
        &Hyperparams::defaults(ClassifierKind::BalancedBagging),
        0,
    )?;

    let cart_pred: Vec<u8> =
        te.x.rows()
            .map(|r| cart.predict_label(r))
            .collect::<balens::Result<_>>()?;
    let bag_pred: Vec<u8> =
        te.x.rows()
            .map(|r| bag.predict_label(r))
            .collect::<balens::Result<_>>()?;
    for (name, pred) in [("single tree", cart_pred), ("B-Bagging", bag_pred)] {
        let m = compute_metrics(&confusion(&te.labels, &pred)?)?;
        println!(
            "{name:<12} accuracy {:.3}  balanced accuracy {:.3}  recall {:.3}",
            m.accuracy, m.balanced_accuracy, m.recall
        );
    }
    Ok(())
}
