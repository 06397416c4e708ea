//! Missingness filter, balanced-subsample imputation and one-hot encoding.

use balens::eval::{generate_synthetic, SynthSpec};
use balens::preprocess::{fit_plan, FillValue, Preprocessor};

fn main() -> balens::Result<()> {
    let ds = generate_synthetic(&SynthSpec {
        n: 600,
        missing_rate: 0.2,
        ..SynthSpec::default()
    })?;
    println!("{} missing cells before imputation", ds.total_missing());

    // a threshold below the missing rate drops most columns
    let strict = fit_plan(&ds, 0.18, 1)?;
    println!("threshold 0.18 drops {:?}", strict.dropped_names());

    let pre = Preprocessor::fit(&ds, 0.30, 1)?;
    println!(
        "balanced subsample for fill values: {} rows",
        pre.plan.balanced_rows
    );
    for fill in pre.plan.fills.iter().take(4) {
        match &fill.fill {
            FillValue::Median(v) => println!("  feature {} median {v:.3}", fill.feature),
            FillValue::Mode(c) => println!("  feature {} mode {c}", fill.feature),
        }
    }
    let encoded = pre.transform(&ds)?;
    println!("encoded matrix {} x {}", encoded.n_rows(), encoded.n_cols());
    println!("columns: {}", encoded.column_names().join(", "));
    Ok(())
}
