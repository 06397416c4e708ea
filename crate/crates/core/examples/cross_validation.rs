//! Full stratified 6-fold comparison of the four ensembles, with output files.
//!
//!     cargo run --release --example cross_validation -- eval_out

use balens::eval::{
    format_table, generate_synthetic, run_experiment, write_outputs, ExperimentConfig, SynthSpec,
};

fn main() -> balens::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "eval_out".into());
    let ds = generate_synthetic(&SynthSpec {
        class_separation: 0.8,
        ..SynthSpec::default()
    })?;
    let config = ExperimentConfig::default().with_seed(2024);
    let report = run_experiment(&config, &ds)?;
    print!("{}", format_table(&report));
    for f in &report.folds {
        println!(
            "fold {}: train {:?} test {:?}",
            f.fold, f.train_class_counts, f.test_class_counts
        );
    }
    write_outputs(&report, std::path::Path::new(&out))?;
    println!("wrote {out}/");
    Ok(())
}
