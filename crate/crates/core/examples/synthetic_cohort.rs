//! Draw a synthetic cohort, write it as CSV and read it back.
//!
//!     cargo run --example synthetic_cohort -- out/cohort.csv

use balens::data::{load_csv, save_csv, CsvOptions};
use balens::eval::{generate_synthetic, SynthSpec};

fn main() -> balens::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "cohort.csv".into());
    let spec = SynthSpec {
        n: 1000,
        positive_rate: 0.08,
        ..SynthSpec::default()
    };
    let ds = generate_synthetic(&spec)?;
    save_csv(&ds, &path)?;

    let opts = CsvOptions::new("dropout").categorical(["cat_00", "cat_01"]);
    let back = load_csv(&path, &opts)?;
    let [neg, pos] = back.class_counts();
    println!(
        "{path}: {} rows, {} features, {pos} positive / {neg} negative",
        back.n_rows(),
        back.n_features()
    );
    for f in 0..back.n_features() {
        let spec = &back.schema()[f];
        println!(
            "  {:<8} {:?} missing {:.1}%",
            spec.name,
            spec.kind,
            100.0 * back.missing_fraction(f)?
        );
    }
    assert_eq!(back, ds);
    Ok(())
}
