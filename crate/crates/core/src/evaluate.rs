//! Confusion matrices, spam-positive metrics, and with/without-SMOTE
//! comparison reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{train, Algorithm, ClassifyError, TrainConfig};
use crate::label::Label;
use crate::resample::{balance_training_set, ResampleError, ResampleReport, SmoteConfig};
use crate::sparse::FeatureMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum EvaluateError {
    #[error("{predicted} predictions but {actual} actual labels")]
    LengthMismatch { predicted: usize, actual: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("train and test matrices differ in dimension ({train} vs {test})")]
    DimensionMismatch { train: usize, test: usize },
    #[error("{algorithm}: {source}")]
    Classify {
        algorithm: Algorithm,
        #[source]
        source: ClassifyError,
    },
    #[error(transparent)]
    Resample(#[from] ResampleError),
}

/// Counts with spam (label 1) as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(predicted: &[Label], actual: &[Label]) -> Result<ConfusionMatrix, EvaluateError> {
    if predicted.len() != actual.len() {
        return Err(EvaluateError::LengthMismatch {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(EvaluateError::Empty);
    }
    let mut m = ConfusionMatrix::default();
    for (p, a) in predicted.iter().zip(actual) {
        match (p, a) {
            (Label::Spam, Label::Spam) => m.tp += 1,
            (Label::Spam, Label::NonSpam) => m.fp += 1,
            (Label::NonSpam, Label::Spam) => m.fn_ += 1,
            (Label::NonSpam, Label::NonSpam) => m.tn += 1,
        }
    }
    Ok(m)
}

/// Accuracy, precision, recall and F1. A metric whose denominator is zero is
/// `None` (serialized as `null`) and rendered as 0.0 in tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub matrix: ConfusionMatrix,
    pub positive_class: Label,
}

impl MetricsReport {
    pub fn precision_or_zero(&self) -> f64 {
        self.precision.unwrap_or(0.0)
    }

    pub fn recall_or_zero(&self) -> f64 {
        self.recall.unwrap_or(0.0)
    }

    pub fn f1_or_zero(&self) -> f64 {
        self.f1.unwrap_or(0.0)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(matrix: ConfusionMatrix) -> Result<MetricsReport, EvaluateError> {
    let total = matrix.total();
    if total == 0 {
        return Err(EvaluateError::Empty);
    }
    let precision = ratio(matrix.tp, matrix.tp + matrix.fp);
    let recall = ratio(matrix.tp, matrix.tp + matrix.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(MetricsReport {
        accuracy: (matrix.tp + matrix.tn) as f64 / total as f64,
        precision,
        recall,
        f1,
        matrix,
        positive_class: Label::Spam,
    })
}

pub fn evaluate_labels(predicted: &[Label], actual: &[Label]) -> Result<MetricsReport, EvaluateError> {
    metrics(confusion(predicted, actual)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmComparison {
    pub algorithm: Algorithm,
    pub with_smote: MetricsReport,
    pub without_smote: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub smote: SmoteConfig,
    pub train_configs: BTreeMap<Algorithm, TrainConfig>,
    pub train_size: usize,
    pub test_size: usize,
    pub resample: ResampleReport,
    pub dataset_digest: Option<String>,
    pub test_ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub metadata: RunMetadata,
    pub results: Vec<AlgorithmComparison>,
}

/// Train every algorithm on the raw training matrix and on its SMOTE-balanced
/// version, and evaluate both on the same, untouched test matrix.
pub fn compare(
    train_matrix: &FeatureMatrix,
    test_matrix: &FeatureMatrix,
    algorithms: &[Algorithm],
    smote_config: &SmoteConfig,
    train_configs: &BTreeMap<Algorithm, TrainConfig>,
) -> Result<ComparisonReport, EvaluateError> {
    if train_matrix.dim() != test_matrix.dim() {
        return Err(EvaluateError::DimensionMismatch {
            train: train_matrix.dim(),
            test: test_matrix.dim(),
        });
    }
    let (balanced, resample) = balance_training_set(train_matrix, smote_config)?;
    let mut used_configs = BTreeMap::new();
    let mut results = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        let config = train_configs
            .get(&algorithm)
            .cloned()
            .unwrap_or_else(|| TrainConfig::new(algorithm));
        let classify_err = |source| EvaluateError::Classify { algorithm, source };
        let arm = |train_on: &FeatureMatrix| -> Result<MetricsReport, EvaluateError> {
            let model = train(train_on, &config).map_err(classify_err)?;
            let predicted = model.predict_batch(test_matrix).map_err(classify_err)?;
            evaluate_labels(&predicted, test_matrix.labels())
        };
        let without_smote = arm(train_matrix)?;
        let with_smote = arm(&balanced)?;
        results.push(AlgorithmComparison {
            algorithm,
            with_smote,
            without_smote,
        });
        used_configs.insert(algorithm, config);
    }
    Ok(ComparisonReport {
        metadata: RunMetadata {
            seed: smote_config.seed,
            smote: *smote_config,
            train_configs: used_configs,
            train_size: train_matrix.len(),
            test_size: test_matrix.len(),
            resample,
            dataset_digest: None,
            test_ids: None,
        },
        results,
    })
}

fn fmt_metric(value: f64) -> String {
    let two = format!("{value:.2}");
    // Keep a third decimal only where two would hide it, e.g. 0.936.
    let three = format!("{value:.3}");
    if three.ends_with('0') {
        two
    } else {
        three
    }
}

impl ComparisonReport {
    /// Plain-text table with one row per metric and a with/without column
    /// pair per algorithm. Undefined metrics print as 0.0.
    pub fn to_table(&self) -> String {
        let mut header1 = vec![String::new()];
        let mut header2 = vec!["Metric".to_string()];
        for r in &self.results {
            header1.push(r.algorithm.display_name().to_string());
            header1.push(String::new());
            header2.push("With SMOTE".to_string());
            header2.push("Without SMOTE".to_string());
        }
        type Getter = fn(&MetricsReport) -> f64;
        let rows: [(&str, Getter); 4] = [
            ("Accuracy", |m| m.accuracy),
            ("Precision", MetricsReport::precision_or_zero),
            ("Recall", MetricsReport::recall_or_zero),
            ("F1 Score", MetricsReport::f1_or_zero),
        ];
        let mut body: Vec<Vec<String>> = Vec::new();
        for (name, get) in rows {
            let mut line = vec![name.to_string()];
            for r in &self.results {
                line.push(fmt_metric(get(&r.with_smote)));
                line.push(fmt_metric(get(&r.without_smote)));
            }
            body.push(line);
        }
        let columns = header2.len();
        let mut widths = vec![0usize; columns];
        for line in std::iter::once(&header2).chain(&body) {
            for (w, cell) in widths.iter_mut().zip(line) {
                *w = (*w).max(cell.chars().count());
            }
        }
        // Algorithm names span their column pair.
        for (i, r) in self.results.iter().enumerate() {
            let span = widths[1 + 2 * i] + 3 + widths[2 + 2 * i];
            let need = r.algorithm.display_name().chars().count();
            if need > span {
                widths[2 + 2 * i] += need - span;
            }
        }
        let mut out = String::new();
        let mut line = format!("| {:<w$} |", header1[0], w = widths[0]);
        for (i, r) in self.results.iter().enumerate() {
            let span = widths[1 + 2 * i] + 3 + widths[2 + 2 * i];
            let _ = write!(line, " {:<span$} |", r.algorithm.display_name());
        }
        out.push_str(&line);
        out.push('\n');
        for row in std::iter::once(&header2).chain(&body) {
            let mut line = String::from("|");
            for (cell, w) in row.iter().zip(&widths) {
                let _ = write!(line, " {cell:<w$} |");
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// `algorithm,arm,accuracy,precision,recall,f1,tp,fp,fn,tn`; undefined
    /// metrics are empty fields.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("algorithm,arm,accuracy,precision,recall,f1,tp,fp,fn,tn\n");
        for r in &self.results {
            for (arm, m) in [("with_smote", &r.with_smote), ("without_smote", &r.without_smote)] {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.algorithm,
                    arm,
                    m.accuracy,
                    opt(m.precision),
                    opt(m.recall),
                    opt(m.f1),
                    m.matrix.tp,
                    m.matrix.fp,
                    m.matrix.fn_,
                    m.matrix.tn
                );
            }
        }
        out
    }
}
