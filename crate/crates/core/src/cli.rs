//! The `balens` command line: `synth`, `preprocess`, `evaluate`, `report`.
//!
//! Every subcommand accepts `--config <file.json>` whose keys are the long
//! flag names (kebab-case); flags given on the command line win. The seed
//! falls back to the `BALENS_SEED` environment variable, then to 0.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{load_csv, save_csv, CsvOptions, Dataset};
use crate::ensemble::ClassifierKind;
use crate::error::Error;
use crate::eval::{self, ExperimentConfig, SynthSpec};
use crate::preprocess::Preprocessor;
use crate::report;

pub const SEED_ENV: &str = "BALENS_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "balens",
    version,
    about = "Balance-aware tree ensembles for imbalanced binary classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic cohort to <out>/cohort.csv
    Synth(SynthArgs),
    /// Filter, impute and one-hot encode a cohort CSV
    Preprocess(PreprocessArgs),
    /// Stratified K-fold evaluation of the ensembles
    Evaluate(EvaluateArgs),
    /// Render roc.svg and top_features.txt from an evaluate output directory
    Report(ReportArgs),
}

macro_rules! merge_fields {
    ($cli:expr, $file:expr; $($opt:ident),* ; $($flag:ident),* ; $($list:ident),*) => {{
        let mut cli = $cli;
        let file = $file;
        $( cli.$opt = cli.$opt.or(file.$opt); )*
        $( cli.$flag = cli.$flag || file.$flag; )*
        $( if cli.$list.is_empty() { cli.$list = file.$list; } )*
        cli
    }};
}

#[derive(Debug, Default, Args, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct SynthArgs {
    /// JSON file supplying any of these flags
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Number of rows
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    positive_rate: Option<f64>,
    /// Mean gap between classes on informative columns
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    informative: Option<usize>,
    #[arg(long)]
    noise: Option<usize>,
    #[arg(long)]
    categorical: Option<usize>,
    #[arg(long)]
    categories: Option<usize>,
    #[arg(long)]
    missing_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Options shared by commands that read a cohort CSV.
#[derive(Debug, Default, Args, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct InputArgs {
    /// Cohort CSV
    #[arg(long)]
    input: Option<PathBuf>,
    /// Target column (default: dropout)
    #[arg(long)]
    target: Option<String>,
    /// Comma-separated categorical column names
    #[arg(long, value_delimiter = ',')]
    categorical: Vec<String>,
    /// Treat columns with non-numeric tokens as categorical
    #[arg(long)]
    infer_categorical: bool,
    /// Comma-separated tokens that mark a missing cell (default: "",NA,NaN)
    #[arg(long, value_delimiter = ',')]
    missing_tokens: Vec<String>,
    /// Target token of the positive class (default: 1)
    #[arg(long)]
    positive_token: Option<String>,
    /// Target token of the negative class (default: 0)
    #[arg(long)]
    negative_token: Option<String>,
}

impl InputArgs {
    fn merge(self, file: Self) -> Self {
        merge_fields!(self, file; input, target, positive_token, negative_token; infer_categorical; categorical, missing_tokens)
    }

    fn load(&self) -> Result<Dataset, CliError> {
        let input = self
            .input
            .as_ref()
            .ok_or_else(|| CliError::Usage("--input is required".into()))?;
        let mut opts = CsvOptions::new(self.target.clone().unwrap_or_else(|| "dropout".into()))
            .categorical(self.categorical.iter().cloned())
            .infer_categorical(self.infer_categorical)
            .label_tokens(
                self.positive_token.clone().unwrap_or_else(|| "1".into()),
                self.negative_token.clone().unwrap_or_else(|| "0".into()),
            );
        if !self.missing_tokens.is_empty() {
            opts.missing_tokens = self.missing_tokens.iter().cloned().collect::<BTreeSet<_>>();
        }
        Ok(load_csv(input, &opts)?)
    }
}

#[derive(Debug, Default, Args, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct PreprocessArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    /// Drop features with more than this fraction missing (default: 0.30)
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct EvaluateArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    /// Comma-separated subset of brf, easy, rusboost, bagging (default: all)
    #[arg(long, value_delimiter = ',')]
    classifier: Vec<String>,
    /// Number of folds (default: 6)
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// One imputation plan on the whole dataset instead of per training fold
    #[arg(long)]
    paper_mode: bool,
    /// Drop features with more than this fraction missing (default: 0.30)
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    brf_trees: Option<usize>,
    #[arg(long)]
    bagging_estimators: Option<usize>,
    #[arg(long)]
    rusboost_rounds: Option<usize>,
    #[arg(long)]
    easy_subsets: Option<usize>,
    #[arg(long)]
    easy_rounds: Option<usize>,
    /// Maximum depth of forest and bagging trees (default: unlimited)
    #[arg(long)]
    max_depth: Option<usize>,
    /// Features listed per classifier in reports (default: 20)
    #[arg(long)]
    top_k: Option<usize>,
    /// Worker threads (default: available cores); results do not depend on it
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct ReportArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Directory written by `evaluate`
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn read_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Runtime(Error::io(path, e)))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

fn resolve_seed(cli: Option<u64>, file: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = cli.or(file) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(Error::io(dir, e)))
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let file: SynthArgs = read_config(args.config.as_deref())?;
    let seed = resolve_seed(args.seed, file.seed)?;
    let a = merge_fields!(args, file; n, positive_rate, separation, informative, noise, categorical, categories, missing_rate, out; ; );
    let d = SynthSpec::default();
    let spec = SynthSpec {
        n: a.n
            .ok_or_else(|| CliError::Usage("--n is required".into()))?,
        p_informative: a.informative.unwrap_or(d.p_informative),
        p_noise: a.noise.unwrap_or(d.p_noise),
        p_categorical: a.categorical.unwrap_or(d.p_categorical),
        n_categories: a.categories.unwrap_or(d.n_categories),
        positive_rate: a.positive_rate.unwrap_or(d.positive_rate),
        class_separation: a.separation.unwrap_or(d.class_separation),
        missing_rate: a.missing_rate.unwrap_or(d.missing_rate),
        seed,
    };
    let ds = eval::generate_synthetic(&spec).map_err(|e| match e {
        Error::SpecInvalid(m) => CliError::Usage(m),
        other => CliError::Runtime(other),
    })?;
    let out = a.out.unwrap_or_else(|| PathBuf::from("."));
    create_dir(&out)?;
    save_csv(&ds, out.join("cohort.csv"))?;
    let [neg, pos] = ds.class_counts();
    println!(
        "wrote {}: n={} p={} positives={} negatives={} positive_rate={:.4}",
        out.join("cohort.csv").display(),
        ds.n_rows(),
        ds.n_features(),
        pos,
        neg,
        pos as f64 / ds.n_rows() as f64
    );
    let cats: Vec<&str> = ds
        .schema()
        .iter()
        .filter(|s| s.kind == crate::data::FeatureKind::Categorical)
        .map(|s| s.name.as_str())
        .collect();
    if !cats.is_empty() {
        println!("categorical columns: {}", cats.join(","));
    }
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<(), CliError> {
    let file: PreprocessArgs = read_config(args.config.as_deref())?;
    let seed = resolve_seed(args.seed, file.seed)?;
    let input = args.input.merge(file.input);
    let threshold = args
        .threshold
        .or(file.threshold)
        .unwrap_or(eval::DEFAULT_THRESHOLD);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("."));
    let ds = input.load()?;
    let pre = Preprocessor::fit(&ds, threshold, seed)?;
    let encoded = pre.transform(&ds)?;
    create_dir(&out)?;
    let csv_path = out.join("encoded.csv");
    let f = fs::File::create(&csv_path).map_err(|e| CliError::Runtime(Error::io(&csv_path, e)))?;
    encoded.write_csv(ds.target(), std::io::BufWriter::new(f))?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        threshold: f64,
        balance_seed: u64,
        balanced_rows: usize,
        dropped_features: Vec<String>,
        fill_values: &'a [crate::preprocess::FeatureFill],
        column_origin: &'a [crate::preprocess::ColumnOrigin],
    }
    let sidecar = Sidecar {
        threshold,
        balance_seed: pre.plan.balance_seed,
        balanced_rows: pre.plan.balanced_rows,
        dropped_features: pre.plan.dropped_names(),
        fill_values: &pre.plan.fills,
        column_origin: &encoded.column_origin,
    };
    let json_path = out.join("preprocess.json");
    let mut bytes = serde_json::to_vec_pretty(&sidecar).map_err(Error::from)?;
    bytes.push(b'\n');
    fs::write(&json_path, bytes).map_err(|e| CliError::Runtime(Error::io(&json_path, e)))?;
    println!(
        "encoded {} rows x {} columns ({} features dropped) into {}",
        encoded.n_rows(),
        encoded.n_cols(),
        pre.plan.dropped.len(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let file: EvaluateArgs = read_config(args.config.as_deref())?;
    let seed = resolve_seed(args.seed, file.seed)?;
    let input = args.input;
    let a = merge_fields!(
        EvaluateArgs { input: InputArgs::default(), ..args },
        EvaluateArgs { input: InputArgs::default(), ..file };
        folds, threshold, brf_trees, bagging_estimators, rusboost_rounds, easy_subsets, easy_rounds, max_depth, top_k, threads, out;
        paper_mode;
        classifier
    );
    let input = input.merge(file.input);

    let mut config = ExperimentConfig::default().with_seed(seed);
    if !a.classifier.is_empty() {
        config.classifiers = a
            .classifier
            .iter()
            .map(|s| s.parse::<ClassifierKind>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    config.folds = a.folds.unwrap_or(eval::DEFAULT_FOLDS);
    config.paper_mode = a.paper_mode;
    config.missingness_threshold = a.threshold.unwrap_or(eval::DEFAULT_THRESHOLD);
    config.top_k = a.top_k.unwrap_or(eval::DEFAULT_TOP_K);
    config.dataset = input.input.as_ref().map(|p| p.display().to_string());
    for (kind, params) in config.hyperparams.iter_mut() {
        let n = match kind {
            ClassifierKind::BalancedRandomForest => a.brf_trees,
            ClassifierKind::BalancedBagging => a.bagging_estimators,
            ClassifierKind::RusBoost => a.rusboost_rounds,
            ClassifierKind::EasyEnsemble => a.easy_subsets,
        };
        if let Some(n) = n {
            params.n_estimators = n;
        }
        if *kind == ClassifierKind::EasyEnsemble {
            if let Some(r) = a.easy_rounds {
                params.boost_rounds = r;
            }
        }
        if !kind.is_boosted() && a.max_depth.is_some() {
            params.tree.max_depth = a.max_depth;
        }
    }
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let out = a.out.unwrap_or_else(|| PathBuf::from("eval_out"));

    let ds = input.load()?;
    let run = || -> Result<eval::EvalReport, Error> {
        let report = eval::run_experiment(&config, &ds)?;
        eval::write_outputs(&report, &out)?;
        Ok(report)
    };
    let report = match a.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    print!("{}", eval::format_table(&report));
    for c in &report.classifiers {
        println!(
            "{}: mean AUC {:.3} (pooled {:.3}), specificity {:.3}",
            c.label, c.mean_auc, c.pooled_auc, c.mean.specificity
        );
    }
    println!("outputs written to {}", out.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let file: ReportArgs = read_config(args.config.as_deref())?;
    let a = merge_fields!(args, file; dir, top_k; ; );
    let dir = a
        .dir
        .ok_or_else(|| CliError::Usage("--dir is required".into()))?;
    report::write_report(&dir, a.top_k.unwrap_or(eval::DEFAULT_TOP_K))?;
    println!(
        "wrote {} and {}",
        dir.join("roc.svg").display(),
        dir.join("top_features.txt").display()
    );
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
