//! Loading labeled text datasets and producing seeded stratified splits.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{ClassCounts, Label};
use crate::rng::{SeededRng, SPLIT_STREAM};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset is empty")]
    EmptyFile,
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: label must be 0 or 1, got `{value}`")]
    BadLabel { row: usize, value: String },
    #[error("row {row}: empty text")]
    EmptyText { row: usize },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    FractionOutOfRange(f64),
    #[error("corpus too small to split: {0}")]
    TooSmall(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Csv,
    Jsonl,
}

impl DatasetFormat {
    /// Guess from a file extension; `.jsonl`/`.json`/`.ndjson` are JSONL, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => DatasetFormat::Jsonl,
            _ => DatasetFormat::Csv,
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DatasetFormat::Csv),
            "jsonl" => Ok(DatasetFormat::Jsonl),
            other => Err(format!("unknown dataset format `{other}` (expected csv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Accept records whose text is the empty string.
    pub allow_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub id: String,
    pub text: String,
    pub label: Label,
}

impl LabeledDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        LabeledDocument {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// An ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<LabeledDocument>,
    class_counts: ClassCounts,
}

impl Corpus {
    pub fn new(documents: Vec<LabeledDocument>) -> Result<Self, IngestError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(IngestError::DuplicateId(doc.id.clone()));
            }
        }
        let class_counts = ClassCounts::from_labels(documents.iter().map(|d| &d.label));
        Ok(Corpus {
            documents,
            class_counts,
        })
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    pub fn class_counts(&self) -> ClassCounts {
        self.class_counts
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.id.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Corpus,
    pub test: Corpus,
    pub seed: u64,
    pub train_fraction: f64,
}

impl DatasetSplit {
    pub fn manifest(&self) -> SplitManifest {
        SplitManifest {
            seed: self.seed,
            train_fraction: self.train_fraction,
            train_ids: self.train.ids(),
            test_ids: self.test.ids(),
        }
    }
}

/// JSON-exportable record of which ids landed on which side of a split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub train_fraction: f64,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

pub fn load_corpus(
    path: &Path,
    format: DatasetFormat,
    options: LoadOptions,
) -> Result<Corpus, IngestError> {
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&bytes, format, options)
}

pub fn parse_corpus(
    bytes: &[u8],
    format: DatasetFormat,
    options: LoadOptions,
) -> Result<Corpus, IngestError> {
    let records = match format {
        DatasetFormat::Csv => parse_csv(bytes)?,
        DatasetFormat::Jsonl => parse_jsonl(bytes)?,
    };
    if records.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    let mut documents = Vec::with_capacity(records.len());
    for (index, record) in records.into_iter().enumerate() {
        if record.text.is_empty() && !options.allow_empty {
            return Err(IngestError::EmptyText { row: record.row });
        }
        let id = record.id.unwrap_or_else(|| format!("row-{index}"));
        documents.push(LabeledDocument::new(id, record.text, record.label));
    }
    Corpus::new(documents)
}

struct RawRecord {
    row: usize,
    id: Option<String>,
    text: String,
    label: Label,
}

fn parse_label(row: usize, value: &str) -> Result<Label, IngestError> {
    match value.trim() {
        "0" => Ok(Label::NonSpam),
        "1" => Ok(Label::Spam),
        other => Err(IngestError::BadLabel {
            row,
            value: other.to_string(),
        }),
    }
}

fn parse_csv(bytes: &[u8]) -> Result<Vec<RawRecord>, IngestError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(IngestError::EmptyFile);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Malformed {
            row: 0,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let text_col = column("text").ok_or(IngestError::MissingColumn("text"))?;
    let label_col = column("label").ok_or(IngestError::MissingColumn("label"))?;
    let id_col = column("id");

    let mut out = Vec::new();
    for (i, result) in reader.records().enumerate() {
        let row = i + 1;
        let record = result.map_err(|e| IngestError::Malformed {
            row,
            message: e.to_string(),
        })?;
        let field = |col: usize| record.get(col).unwrap_or_default();
        out.push(RawRecord {
            row,
            id: id_col.map(|c| field(c).to_string()),
            text: field(text_col).to_string(),
            label: parse_label(row, field(label_col))?,
        });
    }
    Ok(out)
}

fn parse_jsonl(bytes: &[u8]) -> Result<Vec<RawRecord>, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::Malformed {
        row: 0,
        message: format!("invalid UTF-8: {e}"),
    })?;
    let mut out = Vec::new();
    let mut saw_id = None;
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| IngestError::Malformed { row, message };
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        let object = value
            .as_object()
            .ok_or_else(|| malformed("expected a JSON object".into()))?;
        let text = match object.get("text") {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(_) => return Err(malformed("`text` must be a string".into())),
            None => return Err(malformed("missing `text`".into())),
        };
        let label = match object.get("label") {
            Some(serde_json::Value::Number(n)) => parse_label(row, &n.to_string())?,
            Some(serde_json::Value::String(s)) => parse_label(row, s)?,
            Some(other) => {
                return Err(IngestError::BadLabel {
                    row,
                    value: other.to_string(),
                })
            }
            None => return Err(malformed("missing `label`".into())),
        };
        let id = match object.get("id") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            Some(serde_json::Value::Number(n)) => Some(n.to_string()),
            Some(_) => return Err(malformed("`id` must be a string or number".into())),
        };
        // Mixing explicit and generated ids would make "row-N" collide silently.
        match saw_id {
            None => saw_id = Some(id.is_some()),
            Some(expected) if expected != id.is_some() => {
                return Err(malformed(
                    "`id` must be present on every record or on none".into(),
                ))
            }
            Some(_) => {}
        }
        out.push(RawRecord {
            row,
            id,
            text,
            label,
        });
    }
    Ok(out)
}

/// Number of training documents per class for a stratified split.
///
/// Each class starts at `round(fraction * class_total)`; the class whose
/// rounding error points the right way is then nudged by one towards a total
/// of `round(fraction * corpus_size)`. Every class keeps at least one
/// document on each side and stays within one of its own rounded share, so
/// the total target is best effort for tiny classes.
pub fn stratified_train_counts(
    counts: ClassCounts,
    train_fraction: f64,
) -> Result<ClassCounts, IngestError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(IngestError::FractionOutOfRange(train_fraction));
    }
    let total = counts.total();
    if total < 2 {
        return Err(IngestError::TooSmall(format!(
            "need at least 2 documents, got {total}"
        )));
    }
    let present: Vec<Label> = Label::ALL
        .into_iter()
        .filter(|&l| counts.get(l) > 0)
        .collect();
    for &label in &present {
        if counts.get(label) < 2 {
            return Err(IngestError::TooSmall(format!(
                "class {label} has a single document and cannot appear in both partitions"
            )));
        }
    }

    let exact = |l: Label| train_fraction * counts.get(l) as f64;
    let mut train = [0usize; 2];
    for &label in &present {
        let n = counts.get(label);
        train[label.index()] = (exact(label).round() as usize).clamp(1, n - 1);
    }
    let target = (train_fraction * total as f64).round() as usize;

    // Each class may move at most once, in the direction of the global target.
    let mut adjusted = [false; 2];
    loop {
        let current: usize = train.iter().sum();
        if current == target {
            break;
        }
        let grow = current < target;
        let candidate = present
            .iter()
            .copied()
            .filter(|&l| !adjusted[l.index()])
            .filter(|&l| {
                let t = train[l.index()] as f64;
                let next = if grow { t + 1.0 } else { t - 1.0 };
                next >= 1.0
                    && next < counts.get(l) as f64
                    && (next - exact(l).round()).abs() <= 1.0
            })
            .max_by(|&a, &b| {
                // Largest shortfall first when growing, largest surplus when shrinking.
                let err = |l: Label| {
                    let e = exact(l) - train[l.index()] as f64;
                    if grow {
                        e
                    } else {
                        -e
                    }
                };
                err(a).total_cmp(&err(b)).then(b.cmp(&a))
            });
        match candidate {
            Some(label) => {
                let t = &mut train[label.index()];
                if grow {
                    *t += 1;
                } else {
                    *t -= 1;
                }
                adjusted[label.index()] = true;
            }
            None => break,
        }
    }
    Ok(ClassCounts {
        non_spam: train[0],
        spam: train[1],
    })
}

/// Seeded stratified train/test split.
///
/// Each class's document positions are shuffled with the split stream of
/// `seed` (non-spam first, then spam), and the first `n` positions go to
/// training. Both partitions keep the original corpus order.
pub fn split(corpus: &Corpus, train_fraction: f64, seed: u64) -> Result<DatasetSplit, IngestError> {
    let train_counts = stratified_train_counts(corpus.class_counts(), train_fraction)?;
    let mut rng = SeededRng::stream(seed, SPLIT_STREAM);
    let mut in_train = vec![false; corpus.len()];
    for label in Label::ALL {
        let mut positions: Vec<usize> = corpus
            .documents
            .iter()
            .enumerate()
            .filter(|(_, d)| d.label == label)
            .map(|(i, _)| i)
            .collect();
        rng.shuffle(&mut positions);
        for &p in positions.iter().take(train_counts.get(label)) {
            in_train[p] = true;
        }
    }
    let (train, test): (Vec<_>, Vec<_>) = corpus
        .documents
        .iter()
        .cloned()
        .zip(in_train)
        .partition(|(_, t)| *t);
    Ok(DatasetSplit {
        train: Corpus::new(train.into_iter().map(|(d, _)| d).collect())?,
        test: Corpus::new(test.into_iter().map(|(d, _)| d).collect())?,
        seed,
        train_fraction,
    })
}
