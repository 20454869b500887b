//! Exact k-nearest-neighbor search and SMOTE oversampling.
//!
//! Synthetic samples are generated as `x_base + gap * (x_neighbor - x_base)`.
//! Base points cycle round-robin over the minority rows, the neighbor is drawn
//! uniformly from the base point's `k` nearest minority neighbors, and `gap`
//! is uniform on `[0, 1)`. Neighbor choices and gaps come from two separate
//! streams of the configured seed, so changing `k` leaves the gap sequence
//! untouched.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;
use crate::rng::{SeededRng, GAP_STREAM, NEIGHBOR_STREAM};
use crate::sparse::{FeatureMatrix, SparseVector};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum ResampleError {
    #[error("k-nearest-neighbor search needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("query index {index} out of range for {len} points")]
    QueryOutOfRange { index: usize, len: usize },
    #[error("minority set is empty")]
    EmptyMinority,
    #[error("majority count {majority} is smaller than minority count {minority}")]
    MajoritySmaller { majority: usize, minority: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("training matrix contains a single class ({0})")]
    SingleClass(Label),
}

/// How many samples SMOTE should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoteTarget {
    /// Grow the minority class to the majority count.
    Equalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k: usize,
    pub seed: u64,
    pub target: SmoteTarget,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k: DEFAULT_K,
            seed: 0,
            target: SmoteTarget::Equalize,
        }
    }
}

impl SmoteConfig {
    pub fn with_seed(seed: u64) -> Self {
        SmoteConfig {
            seed,
            ..Self::default()
        }
    }
}

/// One generated sample with the pair it was interpolated from. `base` and
/// `neighbor` index into the minority slice passed to [`smote`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub vector: SparseVector,
    pub base: usize,
    pub neighbor: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResampleReport {
    pub minority_label: Option<Label>,
    pub minority_before: usize,
    pub majority: usize,
    pub synthetic_created: usize,
    pub k_effective: usize,
    /// Original row index of each minority row mapped to how many synthetic
    /// samples used it as the base point.
    pub per_sample_usage: BTreeMap<usize, usize>,
    pub warnings: Vec<String>,
}

/// Indices of the `k` points closest to `points[query]` (excluding the query
/// itself), ordered by squared Euclidean distance and then by index.
/// `k` is clamped to `points.len() - 1`.
pub fn knn(points: &[SparseVector], query: usize, k: usize) -> Result<Vec<usize>, ResampleError> {
    if points.len() < 2 {
        return Err(ResampleError::TooFewPoints(points.len()));
    }
    if query >= points.len() {
        return Err(ResampleError::QueryOutOfRange {
            index: query,
            len: points.len(),
        });
    }
    let k = k.min(points.len() - 1);
    let q = &points[query];
    let mut scored: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != query)
        .map(|(i, p)| (q.squared_distance(p), i))
        .collect();
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() {
        scored.select_nth_unstable_by(k, by_distance);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_distance);
    Ok(scored.into_iter().map(|(_, i)| i).collect())
}

/// Generate `majority_count - minority.len()` synthetic minority samples.
///
/// With a single minority point there is no neighbor to interpolate towards,
/// so every synthetic sample is a copy of that point.
pub fn smote(
    minority: &[SparseVector],
    majority_count: usize,
    config: &SmoteConfig,
) -> Result<Vec<SyntheticSample>, ResampleError> {
    if minority.is_empty() {
        return Err(ResampleError::EmptyMinority);
    }
    if config.k == 0 {
        return Err(ResampleError::ZeroK);
    }
    if majority_count < minority.len() {
        return Err(ResampleError::MajoritySmaller {
            majority: majority_count,
            minority: minority.len(),
        });
    }
    let needed = match config.target {
        SmoteTarget::Equalize => majority_count - minority.len(),
    };
    if needed == 0 {
        return Ok(Vec::new());
    }
    if minority.len() == 1 {
        let only = &minority[0];
        return Ok((0..needed)
            .map(|_| SyntheticSample {
                vector: only.clone(),
                base: 0,
                neighbor: 0,
                gap: 0.0,
            })
            .collect());
    }

    let neighbors: Vec<Vec<usize>> = (0..minority.len())
        .map(|i| knn(minority, i, config.k))
        .collect::<Result<_, _>>()?;
    let mut neighbor_rng = SeededRng::stream(config.seed, NEIGHBOR_STREAM);
    let mut gap_rng = SeededRng::stream(config.seed, GAP_STREAM);

    let mut out = Vec::with_capacity(needed);
    for n in 0..needed {
        let base = n % minority.len();
        let candidates = &neighbors[base];
        let neighbor = candidates[neighbor_rng.below(candidates.len())];
        let gap = gap_rng.next_f64();
        out.push(SyntheticSample {
            vector: minority[base].interpolate(&minority[neighbor], gap),
            base,
            neighbor,
            gap,
        });
    }
    Ok(out)
}

/// Oversample the minority class of a training matrix until both classes
/// have the same count. Original rows keep their positions; synthetic rows
/// are appended in generation order. Never apply this to test data.
pub fn balance_training_set(
    matrix: &FeatureMatrix,
    config: &SmoteConfig,
) -> Result<(FeatureMatrix, ResampleReport), ResampleError> {
    let counts = matrix.class_counts();
    for label in Label::ALL {
        if counts.get(label) == 0 {
            return Err(ResampleError::SingleClass(label.other()));
        }
    }
    if counts.non_spam == counts.spam {
        return Ok((
            matrix.clone(),
            ResampleReport {
                minority_label: None,
                minority_before: counts.spam,
                majority: counts.non_spam,
                synthetic_created: 0,
                k_effective: 0,
                per_sample_usage: BTreeMap::new(),
                warnings: Vec::new(),
            },
        ));
    }
    let minority_label = if counts.spam < counts.non_spam {
        Label::Spam
    } else {
        Label::NonSpam
    };
    let majority = counts.get(minority_label.other());
    let minority_rows: Vec<usize> = matrix
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == minority_label)
        .map(|(i, _)| i)
        .collect();
    let minority: Vec<SparseVector> = minority_rows
        .iter()
        .map(|&i| matrix.rows()[i].clone())
        .collect();

    let synthetic = smote(&minority, majority, config)?;

    let mut warnings = Vec::new();
    if minority.len() == 1 {
        warnings.push(
            "single minority sample: synthetic rows are duplicates of it".to_string(),
        );
    }
    let mut per_sample_usage: BTreeMap<usize, usize> =
        minority_rows.iter().map(|&r| (r, 0)).collect();
    let mut out = matrix.clone();
    for sample in &synthetic {
        *per_sample_usage
            .get_mut(&minority_rows[sample.base])
            .expect("base indexes the minority rows") += 1;
        out.push(sample.vector.clone(), minority_label)
            .expect("synthetic rows share the matrix dimension");
    }
    let report = ResampleReport {
        minority_label: Some(minority_label),
        minority_before: minority.len(),
        majority,
        synthetic_created: synthetic.len(),
        k_effective: config.k.min(minority.len().saturating_sub(1)),
        per_sample_usage,
        warnings,
    };
    Ok((out, report))
}
