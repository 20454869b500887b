//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spamsmote::{Algorithm, DatasetFormat, TrainConfig};

#[derive(Debug, Clone, Parser)]
#[command(name = "spamsmote", version, about = "Spam detection on imbalanced forum text with optional SMOTE oversampling")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for splitting, SMOTE, tree feature sampling and projections.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Stop-word file (one word per line, `#` comments). Defaults to the built-in English list.
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    /// Tokens shorter than this many characters are dropped.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_token_len: u64,
    /// Dataset format. Inferred from the file extension when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Output path. Its meaning depends on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for DatasetFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => DatasetFormat::Csv,
            FormatArg::Jsonl => DatasetFormat::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Train one classifier and write a model bundle (default `model.json`).
    Train(TrainArgs),
    /// Label new texts with a trained bundle.
    Predict(PredictArgs),
    /// Score a bundle against a labeled dataset.
    Evaluate(EvaluateArgs),
    /// SMOTE-balance a sparse matrix file (requires --out).
    Oversample(OversampleArgs),
    /// Compare every algorithm with and without SMOTE (writes `<out>.json`, `.txt`, `.csv`).
    Report(ReportArgs),
    /// Emit a 2-D projection of the training matrix as CSV, optionally SVG.
    Scatter(ScatterArgs),
    /// Generate a synthetic two-vocabulary spam corpus.
    Fixture(FixtureArgs),
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("split must lie strictly between 0 and 1, got {s}"))
    }
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("rate must lie in [0, 1], got {s}"))
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Labeled dataset (CSV with `text` and `label` columns, or JSONL).
    #[arg(long)]
    pub data: PathBuf,
    /// Separate held-out file. When given, all of --data is used for training.
    #[arg(long)]
    pub test_data: Option<PathBuf>,
    /// Fraction of --data used for training in the stratified split.
    #[arg(long, default_value = "0.8", value_parser = parse_fraction)]
    pub split: f64,
    /// Keep records whose text is empty.
    #[arg(long)]
    pub allow_empty: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SmoteArgs {
    /// Number of nearest minority neighbors considered by SMOTE.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
}

#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    #[arg(long, default_value_t = 0.1)]
    pub lr_learning_rate: f64,
    #[arg(long, default_value_t = 300)]
    pub lr_epochs: usize,
    /// L2 penalty for logistic regression.
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub svm_c: f64,
    #[arg(long, default_value_t = 300)]
    pub svm_epochs: usize,
    /// Laplace smoothing for naive Bayes.
    #[arg(long, default_value_t = 1.0)]
    pub nb_alpha: f64,
    /// Maximum tree depth; 0 means unbounded.
    #[arg(long, default_value_t = 10)]
    pub tree_max_depth: usize,
    #[arg(long, default_value_t = 2)]
    pub tree_min_samples_split: usize,
    /// Features examined per split; all when omitted.
    #[arg(long)]
    pub tree_max_features: Option<usize>,
}

impl HyperArgs {
    pub fn config(&self, algorithm: Algorithm, seed: u64) -> TrainConfig {
        TrainConfig {
            algorithm,
            seed,
            lr_learning_rate: self.lr_learning_rate,
            lr_epochs: self.lr_epochs,
            l2: self.l2,
            svm_c: self.svm_c,
            svm_epochs: self.svm_epochs,
            nb_alpha: self.nb_alpha,
            tree_max_depth: (self.tree_max_depth > 0).then_some(self.tree_max_depth),
            tree_min_samples_split: self.tree_min_samples_split,
            tree_max_features: self.tree_max_features,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[arg(long, value_enum, default_value = "off")]
    pub smote: Switch,
    #[command(flatten)]
    pub smote_args: SmoteArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Free-form timestamp recorded in the bundle. Omitted by default so bundles stay reproducible.
    #[arg(long)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Text to classify; repeatable.
    #[arg(long, conflicts_with = "input")]
    pub text: Vec<String>,
    /// File with one text per line; `-` or omitted reads standard input.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled dataset; every record is scored.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub allow_empty: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OversampleArgs {
    /// Sparse matrix file (`rows cols nnz` header, then `row col value` lines).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Label file, one 0/1 per row. Defaults to `<matrix>.labels`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub smote_args: SmoteArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated algorithms to compare.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "nb,logistic,svm,tree")]
    pub algos: Vec<Algorithm>,
    #[command(flatten)]
    pub smote_args: SmoteArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "off")]
    pub smote: Switch,
    #[command(flatten)]
    pub smote_args: SmoteArgs,
    /// Also write an SVG scatter plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FixtureArgs {
    #[arg(long, default_value_t = 251)]
    pub non_spam: usize,
    #[arg(long, default_value_t = 41)]
    pub spam: usize,
    /// Chance that a word comes from the other class's vocabulary.
    #[arg(long, default_value = "0.2", value_parser = parse_rate)]
    pub cross_rate: f64,
    /// Chance that a word comes from the neutral vocabulary.
    #[arg(long, default_value = "0.3", value_parser = parse_rate)]
    pub shared_rate: f64,
    #[arg(long, default_value = "0.25", value_parser = parse_rate)]
    pub html_rate: f64,
    #[arg(long, default_value = "doc")]
    pub id_prefix: String,
}
