//! The four supervised classifiers: multinomial naive Bayes, logistic
//! regression, a primal linear SVM and a CART decision tree.
//!
//! Every fitted model records the feature dimension it was trained on and
//! rejects vectors of any other dimension. Ties resolve to
//! [`Label::NonSpam`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;
use crate::rng::{SeededRng, TREE_STREAM};
use crate::sparse::{FeatureMatrix, SparseVector};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("training matrix is empty")]
    EmptyMatrix,
    #[error("training matrix has dimension 0")]
    ZeroDimension,
    #[error("{algorithm} needs both classes in the training data, found only {label}")]
    SingleClass { algorithm: Algorithm, label: Label },
    #[error("dimension mismatch: model expects {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nb,
    Logistic,
    Svm,
    Tree,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Nb, Algorithm::Logistic, Algorithm::Svm, Algorithm::Tree];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nb => "nb",
            Algorithm::Logistic => "logistic",
            Algorithm::Svm => "svm",
            Algorithm::Tree => "tree",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Nb => "Multinomial NB",
            Algorithm::Logistic => "Logistic Regression",
            Algorithm::Svm => "Linear SVM",
            Algorithm::Tree => "Decision Tree",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nb" | "naive-bayes" | "multinomial-nb" => Ok(Algorithm::Nb),
            "lr" | "logistic" | "logreg" => Ok(Algorithm::Logistic),
            "svm" | "linear-svm" | "svc" => Ok(Algorithm::Svm),
            "tree" | "dt" | "decision-tree" => Ok(Algorithm::Tree),
            other => Err(format!(
                "unknown algorithm `{other}` (expected nb, logistic, svm or tree)"
            )),
        }
    }
}

/// Hyperparameters for all four learners; each algorithm reads its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub lr_learning_rate: f64,
    pub lr_epochs: usize,
    pub l2: f64,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub nb_alpha: f64,
    /// `None` grows the tree until leaves are pure or unsplittable.
    pub tree_max_depth: Option<usize>,
    pub tree_min_samples_split: usize,
    /// Number of features examined per split; `None` examines all.
    pub tree_max_features: Option<usize>,
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        TrainConfig {
            algorithm,
            seed: 0,
            lr_learning_rate: 0.1,
            lr_epochs: 300,
            l2: 1e-4,
            svm_c: 1.0,
            svm_epochs: 300,
            nb_alpha: 1.0,
            tree_max_depth: Some(10),
            tree_min_samples_split: 2,
            tree_max_features: None,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let bad = |msg: &str| Err(ClassifyError::InvalidConfig(msg.to_string()));
        if !(self.lr_learning_rate > 0.0 && self.lr_learning_rate.is_finite()) {
            return bad("lr_learning_rate must be positive");
        }
        if self.lr_epochs == 0 || self.svm_epochs == 0 {
            return bad("epochs must be positive");
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("l2 must be non-negative");
        }
        if !(self.svm_c > 0.0 && self.svm_c.is_finite()) {
            return bad("svm_c must be positive");
        }
        if !(self.nb_alpha > 0.0 && self.nb_alpha.is_finite()) {
            return bad("nb_alpha must be positive");
        }
        if self.tree_max_depth == Some(0) {
            return bad("tree_max_depth must be positive");
        }
        if self.tree_min_samples_split < 2 {
            return bad("tree_min_samples_split must be at least 2");
        }
        if self.tree_max_features == Some(0) {
            return bad("tree_max_features must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: Label,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedClassifier {
    MultinomialNb {
        dim: usize,
        /// Indexed by label; `-inf` (stored as `null`) for a class absent from training.
        #[serde(with = "log_prior")]
        class_log_prior: [f64; 2],
        feature_log_prob: [Vec<f64>; 2],
    },
    Logistic {
        dim: usize,
        weights: Vec<f64>,
        bias: f64,
    },
    LinearSvm {
        dim: usize,
        weights: Vec<f64>,
        bias: f64,
    },
    DecisionTree {
        dim: usize,
        /// Node 0 is the root.
        nodes: Vec<TreeNode>,
    },
}

mod log_prior {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(prior: &[f64; 2], s: S) -> Result<S::Ok, S::Error> {
        prior
            .map(|p| if p == f64::NEG_INFINITY { None } else { Some(p) })
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 2], D::Error> {
        let raw = <[Option<f64>; 2]>::deserialize(d)?;
        Ok(raw.map(|p| p.unwrap_or(f64::NEG_INFINITY)))
    }
}

impl TrainedClassifier {
    pub fn dim(&self) -> usize {
        match self {
            TrainedClassifier::MultinomialNb { dim, .. }
            | TrainedClassifier::Logistic { dim, .. }
            | TrainedClassifier::LinearSvm { dim, .. }
            | TrainedClassifier::DecisionTree { dim, .. } => *dim,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            TrainedClassifier::MultinomialNb { .. } => Algorithm::Nb,
            TrainedClassifier::Logistic { .. } => Algorithm::Logistic,
            TrainedClassifier::LinearSvm { .. } => Algorithm::Svm,
            TrainedClassifier::DecisionTree { .. } => Algorithm::Tree,
        }
    }

    fn check_dim(&self, vector: &SparseVector) -> Result<(), ClassifyError> {
        if vector.dim() != self.dim() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.dim(),
                actual: vector.dim(),
            });
        }
        Ok(())
    }

    /// Signed score whose sign decides the label: the log-odds of spam for
    /// naive Bayes, `w·x + b` for the linear models. Trees have none.
    pub fn decision_score(&self, vector: &SparseVector) -> Result<Option<f64>, ClassifyError> {
        self.check_dim(vector)?;
        Ok(match self {
            TrainedClassifier::MultinomialNb {
                class_log_prior,
                feature_log_prob,
                ..
            } => {
                let joint = |c: usize| class_log_prior[c] + vector.dot_dense(&feature_log_prob[c]);
                Some(joint(1) - joint(0))
            }
            TrainedClassifier::Logistic { weights, bias, .. }
            | TrainedClassifier::LinearSvm { weights, bias, .. } => Some(vector.dot_dense(weights) + bias),
            TrainedClassifier::DecisionTree { .. } => None,
        })
    }

    pub fn predict(&self, vector: &SparseVector) -> Result<Label, ClassifyError> {
        self.check_dim(vector)?;
        Ok(match self {
            TrainedClassifier::MultinomialNb {
                class_log_prior,
                feature_log_prob,
                ..
            } => {
                let joint = |c: usize| class_log_prior[c] + vector.dot_dense(&feature_log_prob[c]);
                if joint(1) > joint(0) {
                    Label::Spam
                } else {
                    Label::NonSpam
                }
            }
            TrainedClassifier::Logistic { weights, bias, .. }
            | TrainedClassifier::LinearSvm { weights, bias, .. } => {
                if vector.dot_dense(weights) + bias >= 0.0 {
                    Label::Spam
                } else {
                    Label::NonSpam
                }
            }
            TrainedClassifier::DecisionTree { nodes, .. } => {
                let mut at = 0;
                loop {
                    match &nodes[at] {
                        TreeNode::Leaf { label } => break *label,
                        TreeNode::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            at = if vector.get(*feature) <= *threshold { *left } else { *right };
                        }
                    }
                }
            }
        })
    }

    pub fn predict_batch(&self, matrix: &FeatureMatrix) -> Result<Vec<Label>, ClassifyError> {
        if matrix.dim() != self.dim() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.dim(),
                actual: matrix.dim(),
            });
        }
        matrix.rows().iter().map(|r| self.predict(r)).collect()
    }
}

pub fn train(matrix: &FeatureMatrix, config: &TrainConfig) -> Result<TrainedClassifier, ClassifyError> {
    config.validate()?;
    if matrix.is_empty() {
        return Err(ClassifyError::EmptyMatrix);
    }
    if matrix.dim() == 0 {
        return Err(ClassifyError::ZeroDimension);
    }
    if config.algorithm != Algorithm::Nb {
        let counts = matrix.class_counts();
        if let Some(missing) = Label::ALL.into_iter().find(|&l| counts.get(l) == 0) {
            return Err(ClassifyError::SingleClass {
                algorithm: config.algorithm,
                label: missing.other(),
            });
        }
    }
    Ok(match config.algorithm {
        Algorithm::Nb => train_naive_bayes(matrix, config.nb_alpha),
        Algorithm::Logistic => {
            let (weights, bias) = train_logistic(matrix, config);
            TrainedClassifier::Logistic {
                dim: matrix.dim(),
                weights,
                bias,
            }
        }
        Algorithm::Svm => {
            let fit = train_linear_svm(matrix, config);
            TrainedClassifier::LinearSvm {
                dim: matrix.dim(),
                weights: fit.weights,
                bias: fit.bias,
            }
        }
        Algorithm::Tree => train_tree(matrix, config),
    })
}

fn train_naive_bayes(matrix: &FeatureMatrix, alpha: f64) -> TrainedClassifier {
    let dim = matrix.dim();
    let n = matrix.len() as f64;
    let counts = matrix.class_counts();
    let mut mass = [vec![0.0; dim], vec![0.0; dim]];
    for (row, label) in matrix.rows().iter().zip(matrix.labels()) {
        let class_mass = &mut mass[label.index()];
        for (i, v) in row.iter() {
            class_mass[i] += v;
        }
    }
    let feature_log_prob = mass.map(|class_mass| {
        let total: f64 = class_mass.iter().sum();
        let denom = (total + alpha * dim as f64).ln();
        class_mass.iter().map(|m| (m + alpha).ln() - denom).collect()
    });
    let class_log_prior = Label::ALL.map(|l| (counts.get(l) as f64 / n).ln());
    TrainedClassifier::MultinomialNb {
        dim,
        class_log_prior,
        feature_log_prob,
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean log loss plus `l2 / 2 * |w|^2` (bias unregularized), with its
/// gradient with respect to the weights and the bias.
pub fn logistic_objective(matrix: &FeatureMatrix, weights: &[f64], bias: f64, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = matrix.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_bias = 0.0;
    for (row, label) in matrix.rows().iter().zip(matrix.labels()) {
        let y = label.as_u8() as f64;
        let z = row.dot_dense(weights) + bias;
        loss += softplus(z) - y * z;
        let residual = sigmoid(z) - y;
        for (i, v) in row.iter() {
            grad[i] += residual * v;
        }
        grad_bias += residual;
    }
    loss /= n;
    grad_bias /= n;
    let mut norm_sq = 0.0;
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
        norm_sq += w * w;
    }
    loss += 0.5 * l2 * norm_sq;
    (loss, grad, grad_bias)
}

fn train_logistic(matrix: &FeatureMatrix, config: &TrainConfig) -> (Vec<f64>, f64) {
    let mut weights = vec![0.0; matrix.dim()];
    let mut bias = 0.0;
    for _ in 0..config.lr_epochs {
        let (_, grad, grad_bias) = logistic_objective(matrix, &weights, bias, config.l2);
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= config.lr_learning_rate * g;
        }
        bias -= config.lr_learning_rate * grad_bias;
    }
    (weights, bias)
}

/// Result of [`train_linear_svm`], with the primal objective after each epoch.
#[derive(Debug, Clone)]
pub struct SvmFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub objective_history: Vec<f64>,
}

/// `lambda / 2 * (|w|^2 + b^2) + mean hinge loss`, with `lambda = 1 / (C n)`.
/// The bias is treated as the weight of a constant feature and regularized
/// with the rest.
pub fn svm_objective(matrix: &FeatureMatrix, weights: &[f64], bias: f64, lambda: f64) -> f64 {
    let n = matrix.len() as f64;
    let hinge: f64 = matrix
        .rows()
        .iter()
        .zip(matrix.labels())
        .map(|(row, label)| {
            let y = if *label == Label::Spam { 1.0 } else { -1.0 };
            (1.0 - y * (row.dot_dense(weights) + bias)).max(0.0)
        })
        .sum();
    let norm_sq: f64 = weights.iter().map(|w| w * w).sum::<f64>() + bias * bias;
    0.5 * lambda * norm_sq + hinge / n
}

/// Full-batch Pegasos: step `1 / (lambda t)` on the subgradient of
/// [`svm_objective`], then projection onto the ball of radius `1/sqrt(lambda)`.
pub fn train_linear_svm(matrix: &FeatureMatrix, config: &TrainConfig) -> SvmFit {
    let n = matrix.len() as f64;
    let lambda = 1.0 / (config.svm_c * n);
    let radius = 1.0 / lambda.sqrt();
    let mut weights = vec![0.0; matrix.dim()];
    let mut bias = 0.0;
    let mut history = Vec::with_capacity(config.svm_epochs);
    let mut violation = vec![0.0; matrix.dim()];
    for t in 1..=config.svm_epochs {
        let step = 1.0 / (lambda * t as f64);
        violation.iter_mut().for_each(|v| *v = 0.0);
        let mut violation_bias = 0.0;
        for (row, label) in matrix.rows().iter().zip(matrix.labels()) {
            let y = if *label == Label::Spam { 1.0 } else { -1.0 };
            if y * (row.dot_dense(&weights) + bias) < 1.0 {
                for (i, v) in row.iter() {
                    violation[i] += y * v;
                }
                violation_bias += y;
            }
        }
        let shrink = 1.0 - step * lambda;
        for (w, v) in weights.iter_mut().zip(&violation) {
            *w = shrink * *w + step * v / n;
        }
        bias = shrink * bias + step * violation_bias / n;

        let norm = (weights.iter().map(|w| w * w).sum::<f64>() + bias * bias).sqrt();
        if norm > radius {
            let scale = radius / norm;
            weights.iter_mut().for_each(|w| *w *= scale);
            bias *= scale;
        }
        history.push(svm_objective(matrix, &weights, bias, lambda));
    }
    SvmFit {
        weights,
        bias,
        objective_history: history,
    }
}

/// Gini impurity `1 - sum p_c^2` of a two-class count pair.
pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

struct TreeBuilder<'a> {
    labels: &'a [Label],
    /// Column-major copy of the matrix: `(row, value)` per feature.
    columns: Vec<Vec<(usize, f64)>>,
    in_node: Vec<bool>,
    nodes: Vec<TreeNode>,
    max_depth: Option<usize>,
    min_samples_split: usize,
    max_features: Option<usize>,
    rng: SeededRng,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn majority_label(counts: [usize; 2]) -> Label {
    if counts[1] > counts[0] {
        Label::Spam
    } else {
        Label::NonSpam
    }
}

impl TreeBuilder<'_> {
    fn class_counts(&self, samples: &[usize]) -> [usize; 2] {
        let mut counts = [0, 0];
        for &s in samples {
            counts[self.labels[s].index()] += 1;
        }
        counts
    }

    fn build(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&samples);
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            label: majority_label(counts),
        });
        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_reached = self.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || samples.len() < self.min_samples_split {
            return id;
        }
        let Some(choice) = self.best_split(&samples, counts) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples.into_iter().partition(|&s| {
            let column = &self.columns[choice.feature];
            let value = column
                .binary_search_by_key(&s, |&(row, _)| row)
                .map(|pos| column[pos].1)
                .unwrap_or(0.0);
            value <= choice.threshold
        });
        let left_id = self.build(left, depth + 1);
        let right_id = self.build(right, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: choice.feature,
            threshold: choice.threshold,
            left: left_id,
            right: right_id,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let dim = self.columns.len();
        match self.max_features {
            Some(m) if m < dim => {
                let mut all: Vec<usize> = (0..dim).collect();
                // Partial Fisher-Yates: the first m slots become a uniform sample.
                for i in 0..m {
                    let j = i + self.rng.below(dim - i);
                    all.swap(i, j);
                }
                all.truncate(m);
                all.sort_unstable();
                all
            }
            _ => (0..dim).collect(),
        }
    }

    /// Lowest weighted child impurity over candidate features; ties keep the
    /// first (lowest feature, lowest threshold).
    fn best_split(&mut self, samples: &[usize], counts: [usize; 2]) -> Option<SplitChoice> {
        for &s in samples {
            self.in_node[s] = true;
        }
        let n = samples.len() as f64;
        let mut best: Option<SplitChoice> = None;
        let mut groups: Vec<(f64, [usize; 2])> = Vec::new();
        for feature in self.candidate_features() {
            let mut nonzero: Vec<(f64, Label)> = self.columns[feature]
                .iter()
                .filter(|(row, _)| self.in_node[*row])
                .map(|&(row, v)| (v, self.labels[row]))
                .collect();
            if nonzero.is_empty() {
                continue;
            }
            nonzero.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut zero_counts = counts;
            for (_, l) in &nonzero {
                zero_counts[l.index()] -= 1;
            }
            groups.clear();
            let mut zero_placed = zero_counts == [0, 0];
            for (v, l) in nonzero {
                if !zero_placed && v > 0.0 {
                    groups.push((0.0, zero_counts));
                    zero_placed = true;
                }
                match groups.last_mut() {
                    Some((gv, gc)) if *gv == v => gc[l.index()] += 1,
                    _ => {
                        let mut gc = [0, 0];
                        gc[l.index()] += 1;
                        groups.push((v, gc));
                    }
                }
            }
            if !zero_placed {
                groups.push((0.0, zero_counts));
            }
            if groups.len() < 2 {
                continue;
            }
            let mut left = [0usize, 0usize];
            for pair in groups.windows(2) {
                let (lo, lo_counts) = pair[0];
                let hi = pair[1].0;
                left[0] += lo_counts[0];
                left[1] += lo_counts[1];
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let n_left = (left[0] + left[1]) as f64;
                let impurity = (n_left * gini(left) + (n - n_left) * gini(right)) / n;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(SplitChoice {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        for &s in samples {
            self.in_node[s] = false;
        }
        best
    }
}

fn train_tree(matrix: &FeatureMatrix, config: &TrainConfig) -> TrainedClassifier {
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); matrix.dim()];
    for (r, row) in matrix.rows().iter().enumerate() {
        for (i, v) in row.iter() {
            columns[i].push((r, v));
        }
    }
    let mut builder = TreeBuilder {
        labels: matrix.labels(),
        columns,
        in_node: vec![false; matrix.len()],
        nodes: Vec::new(),
        max_depth: config.tree_max_depth,
        min_samples_split: config.tree_min_samples_split,
        max_features: config.tree_max_features,
        rng: SeededRng::stream(config.seed, TREE_STREAM),
    };
    builder.build((0..matrix.len()).collect(), 0);
    TrainedClassifier::DecisionTree {
        dim: matrix.dim(),
        nodes: builder.nodes,
    }
}
