//! Cross-validated importance ranking mapped back to source columns.

use balens::ensemble::ClassifierKind;
use balens::eval::{
    generate_synthetic, rank_importances, run_experiment, ExperimentConfig, SynthSpec,
};

fn main() -> balens::Result<()> {
    let spec = SynthSpec {
        p_informative: 5,
        p_noise: 15,
        class_separation: 1.5,
        ..SynthSpec::default()
    };
    let ds = generate_synthetic(&spec)?;
    let config =
        ExperimentConfig::default().with_classifiers(&[ClassifierKind::BalancedRandomForest]);
    let report = run_experiment(&config, &ds)?;
    let brf = &report.classifiers[0];
    println!("{}: top features by mean decrease in impurity", brf.label);
    for (rank, f) in rank_importances(brf, 10)?.iter().enumerate() {
        let bar = "#".repeat((f.score * 200.0).round() as usize);
        println!("{:>2}. {:<8} {:.4} {bar}", rank + 1, f.feature, f.score);
    }
    Ok(())
}
