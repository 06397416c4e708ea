//! RUSBoost and EasyEnsemble, plus the AdaBoost round records underneath.

use balens::ensemble::{
    fit_adaboost, fit_easy_ensemble, fit_rusboost, ClassifierKind, Hyperparams,
};
use balens::eval::{generate_synthetic, SynthSpec};
use balens::metrics::roc_curve;
use balens::preprocess::Preprocessor;
use balens::rng::seeded;

fn main() -> balens::Result<()> {
    let ds = generate_synthetic(&SynthSpec {
        n: 1500,
        class_separation: 1.2,
        ..SynthSpec::default()
    })?;
    let enc = Preprocessor::fit(&ds, 0.3, 0)?.transform(&ds)?;

    let chain = fit_adaboost(
        &enc.x,
        &enc.labels,
        &vec![1.0; enc.n_rows()],
        8,
        &mut seeded(1),
        true,
    )?;
    for (i, r) in chain.rounds.iter().enumerate() {
        println!(
            "round {i}: error {:.4}, alpha {:.4}, sample {:?}",
            r.error, r.alpha, r.sample_class_counts
        );
    }

    let rus = fit_rusboost(
        &enc.x,
        &enc.labels,
        &Hyperparams::defaults(ClassifierKind::RusBoost),
        7,
    )?;
    let easy = fit_easy_ensemble(
        &enc.x,
        &enc.labels,
        &Hyperparams::defaults(ClassifierKind::EasyEnsemble),
        7,
    )?;
    for model in [&rus, &easy] {
        let auc = roc_curve(&enc.labels, &model.predict_scores(&enc.x)?)?.auc;
        println!(
            "{}: {} stumps in chains {:?}, training AUC {auc:.3}",
            model.kind,
            model.members.len(),
            model.chain_lengths
        );
    }
    Ok(())
}
