//! Command implementations. Each returns its result value as well as writing
//! files and printing to the supplied writer, so they can be driven from
//! tests without spawning a process.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use spamsmote::evaluate::evaluate_labels;
use spamsmote::fixture::{corpus_to_csv, generate_corpus, FixtureConfig};
use spamsmote::ingest::{parse_corpus, LoadOptions};
use spamsmote::matrix_io::{bytes_digest, read_matrix, write_labels, write_matrix};
use spamsmote::pipeline::{featurize, Featurized};
use spamsmote::resample::SmoteTarget;
use spamsmote::{
    balance_training_set, compare, split, train, ComparisonReport, Corpus, DatasetFormat, FeatureMatrix, Label,
    MetricsReport, Preprocessor, ResampleReport, SmoteConfig, StopWordList, TokenSequence,
};

use crate::args::{
    Cli, Command, DataArgs, EvaluateArgs, FixtureArgs, GlobalArgs, OversampleArgs, PredictArgs, ReportArgs,
    ScatterArgs, SmoteArgs, TrainArgs,
};
use crate::bundle::{ModelBundle, PreprocessRecord, Provenance, FORMAT_VERSION};
use crate::error::{CliError, Stage, StageExt};
use crate::scatter::{project, ProjectionScatter};

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Train(a) => cmd_train(g, a, stdout).map(|_| ()),
        Command::Predict(a) => cmd_predict(g, a, stdout).map(|_| ()),
        Command::Evaluate(a) => cmd_evaluate(g, a, stdout).map(|_| ()),
        Command::Oversample(a) => cmd_oversample(g, a, stdout).map(|_| ()),
        Command::Report(a) => cmd_report(g, a, stdout).map(|_| ()),
        Command::Scatter(a) => cmd_scatter(g, a, stdout).map(|_| ()),
        Command::Fixture(a) => cmd_fixture(g, a, stdout).map(|_| ()),
    }
}

fn preprocessor(g: &GlobalArgs) -> Result<Preprocessor, CliError> {
    let stops = match &g.stopwords {
        Some(path) => StopWordList::from_file(path)
            .map_err(|e| anyhow!("reading stop words from {}: {e}", path.display()))
            .stage(Stage::Preprocess)?,
        None => StopWordList::builtin(),
    };
    Ok(Preprocessor::new(stops, g.min_token_len as usize))
}

fn format_for(g: &GlobalArgs, path: &Path) -> DatasetFormat {
    g.format.map(Into::into).unwrap_or_else(|| DatasetFormat::from_path(path))
}

/// Raw bytes and parsed corpus.
fn load(g: &GlobalArgs, path: &Path, allow_empty: bool) -> Result<(Vec<u8>, Corpus), CliError> {
    let bytes = fs::read(path)
        .map_err(|e| anyhow!("reading {}: {e}", path.display()))
        .stage(Stage::Ingest)?;
    let corpus = parse_corpus(&bytes, format_for(g, path), LoadOptions { allow_empty })
        .map_err(|e| anyhow!("{}: {e}", path.display()))
        .stage(Stage::Ingest)?;
    Ok((bytes, corpus))
}

struct Prepared {
    preprocessor: Preprocessor,
    features: Featurized,
    dataset_digest: String,
    test_dataset_digest: Option<String>,
    train_fraction: Option<f64>,
    test_ids: Vec<String>,
}

/// Load, split (or read the separate test file), preprocess and vectorize.
fn prepare(g: &GlobalArgs, d: &DataArgs) -> Result<Prepared, CliError> {
    let preprocessor = preprocessor(g)?;
    let (bytes, corpus) = load(g, &d.data, d.allow_empty)?;
    let dataset_digest = bytes_digest(&bytes);
    let (train_corpus, test_corpus, test_dataset_digest, train_fraction) = match &d.test_data {
        Some(path) => {
            let (test_bytes, test) = load(g, path, d.allow_empty)?;
            (corpus, test, Some(bytes_digest(&test_bytes)), None)
        }
        None => {
            let s = split(&corpus, d.split, g.seed).stage(Stage::Ingest)?;
            (s.train, s.test, None, Some(d.split))
        }
    };
    let features = featurize(&preprocessor, &train_corpus, &test_corpus).stage(Stage::Vectorize)?;
    Ok(Prepared {
        preprocessor,
        features,
        dataset_digest,
        test_dataset_digest,
        train_fraction,
        test_ids: test_corpus.ids(),
    })
}

fn smote_config(g: &GlobalArgs, s: &SmoteArgs) -> SmoteConfig {
    SmoteConfig {
        k: s.k as usize,
        seed: g.seed,
        target: SmoteTarget::Equalize,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| anyhow!("writing {}: {e}", path.display()))
        .stage(Stage::Output)
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).stage(Stage::Output)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).stage(Stage::Output)?;
    s.push('\n');
    Ok(s)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub bundle: ModelBundle,
    pub bundle_path: PathBuf,
    pub metrics: MetricsReport,
    pub resample: Option<ResampleReport>,
}

pub fn cmd_train(g: &GlobalArgs, a: &TrainArgs, stdout: &mut dyn Write) -> Result<TrainOutcome, CliError> {
    let config = a.hyper.config(a.algo, g.seed);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let p = prepare(g, &a.data)?;
    let (smote, train_matrix, resample) = if a.smote.is_on() {
        let sc = smote_config(g, &a.smote_args);
        let (balanced, report) = balance_training_set(&p.features.train, &sc).stage(Stage::Resample)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        (Some(sc), balanced, Some(report))
    } else {
        (None, p.features.train.clone(), None)
    };
    let classifier = train(&train_matrix, &config).stage(Stage::Classify)?;
    let predicted = classifier.predict_batch(&p.features.test).stage(Stage::Evaluate)?;
    let metrics = evaluate_labels(&predicted, p.features.test.labels()).stage(Stage::Evaluate)?;

    let bundle = ModelBundle {
        format_version: FORMAT_VERSION,
        preprocess: PreprocessRecord::from_preprocessor(&p.preprocessor),
        tfidf: p.features.model.clone(),
        classifier,
        provenance: Provenance {
            seed: g.seed,
            train_config: config,
            smote,
            dataset_digest: p.dataset_digest,
            test_dataset_digest: p.test_dataset_digest,
            train_fraction: p.train_fraction,
            train_size: train_matrix.len(),
            timestamp: a.timestamp.clone(),
        },
    };
    let bundle_path = g.out.clone().unwrap_or_else(|| PathBuf::from("model.json"));
    bundle.save(&bundle_path).stage(Stage::Bundle)?;
    emit(stdout, &to_json(&metrics)?)?;
    Ok(TrainOutcome {
        bundle,
        bundle_path,
        metrics,
        resample,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: Option<f64>,
}

impl Prediction {
    pub fn line(&self) -> String {
        match self.score {
            Some(s) => format!("{}\t{s:?}", self.label),
            None => self.label.to_string(),
        }
    }
}

/// Classify raw texts with a loaded bundle.
pub fn predict_texts(bundle: &ModelBundle, texts: &[String]) -> Result<Vec<Prediction>, CliError> {
    let pre = bundle.preprocess.preprocessor().stage(Stage::Bundle)?;
    texts
        .iter()
        .map(|t| {
            let v = bundle.tfidf.transform(&TokenSequence::new("", pre.tokens(t)));
            let label = bundle.classifier.predict(&v).stage(Stage::Classify)?;
            let score = bundle.classifier.decision_score(&v).stage(Stage::Classify)?;
            Ok(Prediction { label, score })
        })
        .collect()
}

fn read_lines(input: Option<&Path>) -> Result<Vec<String>, CliError> {
    let mut text = String::new();
    match input {
        Some(p) if p != Path::new("-") => {
            text = fs::read_to_string(p)
                .map_err(|e| anyhow!("reading {}: {e}", p.display()))
                .stage(Stage::Input)?
        }
        _ => {
            io::stdin().lock().read_to_string(&mut text).stage(Stage::Input)?;
        }
    }
    text.as_bytes()
        .lines()
        .collect::<Result<Vec<_>, _>>()
        .stage(Stage::Input)
}

pub fn cmd_predict(g: &GlobalArgs, a: &PredictArgs, stdout: &mut dyn Write) -> Result<Vec<Prediction>, CliError> {
    let bundle = ModelBundle::load(&a.model).stage(Stage::Bundle)?;
    let texts = if a.text.is_empty() {
        read_lines(a.input.as_deref())?
    } else {
        a.text.clone()
    };
    let predictions = predict_texts(&bundle, &texts)?;
    let mut out = String::new();
    for p in &predictions {
        out.push_str(&p.line());
        out.push('\n');
    }
    match &g.out {
        Some(path) => write_file(path, &out)?,
        None => emit(stdout, &out)?,
    }
    Ok(predictions)
}

pub fn cmd_evaluate(g: &GlobalArgs, a: &EvaluateArgs, stdout: &mut dyn Write) -> Result<MetricsReport, CliError> {
    let bundle = ModelBundle::load(&a.model).stage(Stage::Bundle)?;
    let (_, corpus) = load(g, &a.data, a.allow_empty)?;
    let texts: Vec<String> = corpus.documents().iter().map(|d| d.text.clone()).collect();
    let predicted: Vec<Label> = predict_texts(&bundle, &texts)?.into_iter().map(|p| p.label).collect();
    let metrics = evaluate_labels(&predicted, &corpus.labels()).stage(Stage::Evaluate)?;
    let json = to_json(&metrics)?;
    match &g.out {
        Some(path) => write_file(path, &json)?,
        None => emit(stdout, &json)?,
    }
    Ok(metrics)
}

/// Writes the balanced matrix to `--out` and its labels to `<out>.labels`;
/// prints the resample report.
pub fn cmd_oversample(
    g: &GlobalArgs,
    a: &OversampleArgs,
    stdout: &mut dyn Write,
) -> Result<(FeatureMatrix, ResampleReport), CliError> {
    let out = g
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("oversample needs --out for the balanced matrix".into()))?;
    let labels_path = a.labels.clone().unwrap_or_else(|| with_suffix(&a.matrix, ".labels"));
    let read = |p: &Path| {
        fs::read_to_string(p)
            .map_err(|e| anyhow!("reading {}: {e}", p.display()))
            .stage(Stage::Input)
    };
    let matrix = read_matrix(&read(&a.matrix)?, &read(&labels_path)?).stage(Stage::Input)?;
    let (balanced, report) = balance_training_set(&matrix, &smote_config(g, &a.smote_args)).stage(Stage::Resample)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_file(&out, &write_matrix(&balanced))?;
    write_file(&with_suffix(&out, ".labels"), &write_labels(balanced.labels()))?;
    emit(stdout, &to_json(&report)?)?;
    Ok((balanced, report))
}

/// Writes `<out>.json`, `<out>.txt` and `<out>.csv` (default prefix
/// `report`) and prints the table.
pub fn cmd_report(g: &GlobalArgs, a: &ReportArgs, stdout: &mut dyn Write) -> Result<ComparisonReport, CliError> {
    if a.algos.is_empty() {
        return Err(CliError::Usage("--algos needs at least one algorithm".into()));
    }
    let mut configs = BTreeMap::new();
    for &alg in &a.algos {
        let c = a.hyper.config(alg, g.seed);
        c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        configs.insert(alg, c);
    }
    let p = prepare(g, &a.data)?;
    let mut report = compare(
        &p.features.train,
        &p.features.test,
        &a.algos,
        &smote_config(g, &a.smote_args),
        &configs,
    )
    .stage(Stage::Evaluate)?;
    report.metadata.dataset_digest = Some(p.dataset_digest);
    report.metadata.test_ids = Some(p.test_ids);

    let prefix = g.out.clone().unwrap_or_else(|| PathBuf::from("report"));
    let table = report.to_table();
    write_file(&with_suffix(&prefix, ".json"), &to_json(&report)?)?;
    write_file(&with_suffix(&prefix, ".txt"), &table)?;
    write_file(&with_suffix(&prefix, ".csv"), &report.to_csv())?;
    emit(stdout, &table)?;
    Ok(report)
}

/// CSV goes to `--out` or standard output.
pub fn cmd_scatter(g: &GlobalArgs, a: &ScatterArgs, stdout: &mut dyn Write) -> Result<ProjectionScatter, CliError> {
    let p = prepare(g, &a.data)?;
    let original = p.features.train.len();
    let matrix = if a.smote.is_on() {
        let (balanced, report) =
            balance_training_set(&p.features.train, &smote_config(g, &a.smote_args)).stage(Stage::Resample)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        balanced
    } else {
        p.features.train
    };
    let scatter = project(&matrix, original, g.seed);
    let csv = scatter.to_csv();
    match &g.out {
        Some(path) => write_file(path, &csv)?,
        None => emit(stdout, &csv)?,
    }
    if let Some(svg) = &a.svg {
        write_file(svg, &scatter.to_svg())?;
    }
    Ok(scatter)
}

/// Writes the corpus as CSV, or JSONL with `--format jsonl`.
pub fn cmd_fixture(g: &GlobalArgs, a: &FixtureArgs, stdout: &mut dyn Write) -> Result<Corpus, CliError> {
    if a.cross_rate + a.shared_rate > 1.0 {
        return Err(CliError::Usage("cross-rate + shared-rate must not exceed 1".into()));
    }
    if a.non_spam == 0 || a.spam == 0 {
        return Err(CliError::Usage("both classes need at least one document".into()));
    }
    let corpus = generate_corpus(&FixtureConfig {
        non_spam: a.non_spam,
        spam: a.spam,
        seed: g.seed,
        cross_rate: a.cross_rate,
        shared_rate: a.shared_rate,
        html_rate: a.html_rate,
        id_prefix: a.id_prefix.clone(),
        ..FixtureConfig::default()
    });
    let text = match g.format {
        Some(crate::args::FormatArg::Jsonl) => {
            let mut s = String::new();
            for d in corpus.documents() {
                let line = serde_json::json!({ "id": d.id, "text": d.text, "label": d.label.as_u8() });
                s.push_str(&line.to_string());
                s.push('\n');
            }
            s
        }
        _ => corpus_to_csv(&corpus),
    };
    match &g.out {
        Some(path) => write_file(path, &text)?,
        None => emit(stdout, &text)?,
    }
    Ok(corpus)
}
