//! Save a fitted ensemble as JSON and reload it.

use balens::ensemble::{fit, ClassifierKind, EnsembleModel, Hyperparams};
use balens::eval::{generate_synthetic, SynthSpec};
use balens::preprocess::Preprocessor;

fn main() -> balens::Result<()> {
    let ds = generate_synthetic(&SynthSpec {
        n: 800,
        ..SynthSpec::default()
    })?;
    let enc = Preprocessor::fit(&ds, 0.3, 0)?.transform(&ds)?;
    let kind = ClassifierKind::EasyEnsemble;
    let model = fit(kind, &enc.x, &enc.labels, &Hyperparams::defaults(kind), 5)?;

    let path = std::env::temp_dir().join("balens_model.json");
    std::fs::write(&path, model.to_json()?).expect("write model");
    let text = std::fs::read_to_string(&path).expect("read model");
    let back = EnsembleModel::from_json(&text)?;
    assert_eq!(back.predict_scores(&enc.x)?, model.predict_scores(&enc.x)?);
    println!(
        "{} model, {} bytes at {}, predictions identical after reload",
        back.kind,
        text.len(),
        path.display()
    );
    Ok(())
}
