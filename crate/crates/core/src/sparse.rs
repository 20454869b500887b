//! Sparse feature vectors and labeled feature matrices.

use thiserror::Error;

use crate::label::{ClassCounts, Label};

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("indices must be strictly increasing (saw {prev} then {next})")]
    Unsorted { prev: usize, next: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
}

/// A vector stored as `(index, value)` pairs with strictly increasing
/// indices and no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from sorted entries. Zero values are dropped.
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self, SparseError> {
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut prev: Option<usize> = None;
        for (index, value) in entries {
            if index >= dim {
                return Err(SparseError::IndexOutOfRange { index, dim });
            }
            if let Some(p) = prev {
                if index <= p {
                    return Err(SparseError::Unsorted { prev: p, next: index });
                }
            }
            if !value.is_finite() {
                return Err(SparseError::NonFinite(index));
            }
            prev = Some(index);
            if value != 0.0 {
                indices.push(index);
                values.push(value);
            }
        }
        Ok(SparseVector {
            dim,
            indices,
            values,
        })
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        SparseVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            dense[i] = v;
        }
        dense
    }

    pub fn dot_dense(&self, weights: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * weights[i]).sum()
    }

    /// Squared Euclidean distance, accumulated in ascending coordinate order
    /// over the union of both supports.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let mut sum = 0.0;
        let (mut a, mut b) = (0, 0);
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(usize::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(usize::MAX);
            let diff = if ia == ib {
                let d = self.values[a] - other.values[b];
                a += 1;
                b += 1;
                d
            } else if ia < ib {
                let d = self.values[a];
                a += 1;
                d
            } else {
                let d = -other.values[b];
                b += 1;
                d
            };
            sum += diff * diff;
        }
        sum
    }

    /// `self + gap * (other - self)` over the union of supports. Coordinates
    /// that come out exactly zero are not stored.
    pub fn interpolate(&self, other: &SparseVector, gap: f64) -> SparseVector {
        debug_assert_eq!(self.dim, other.dim);
        let mut indices = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(indices.capacity());
        let (mut a, mut b) = (0, 0);
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(usize::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(usize::MAX);
            let (index, x, y) = if ia == ib {
                let r = (ia, self.values[a], other.values[b]);
                a += 1;
                b += 1;
                r
            } else if ia < ib {
                let r = (ia, self.values[a], 0.0);
                a += 1;
                r
            } else {
                let r = (ib, 0.0, other.values[b]);
                b += 1;
                r
            };
            let v = x + gap * (y - x);
            if v != 0.0 {
                indices.push(index);
                values.push(v);
            }
        }
        SparseVector {
            dim: self.dim,
            indices,
            values,
        }
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        let (indices, values) = self
            .iter()
            .map(|(i, v)| (i, v * factor))
            .filter(|(_, v)| *v != 0.0)
            .unzip();
        SparseVector {
            dim: self.dim,
            indices,
            values,
        }
    }
}

/// Rows of sparse vectors aligned with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    rows: Vec<SparseVector>,
    labels: Vec<Label>,
}

impl FeatureMatrix {
    pub fn new(dim: usize, rows: Vec<SparseVector>, labels: Vec<Label>) -> Result<Self, SparseError> {
        if rows.len() != labels.len() {
            return Err(SparseError::LengthMismatch {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(SparseError::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        Ok(FeatureMatrix { dim, rows, labels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> (&SparseVector, Label) {
        (&self.rows[i], self.labels[i])
    }

    pub fn class_counts(&self) -> ClassCounts {
        ClassCounts::from_labels(&self.labels)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseVector::nnz).sum()
    }

    pub fn push(&mut self, row: SparseVector, label: Label) -> Result<(), SparseError> {
        if row.dim() != self.dim {
            return Err(SparseError::DimensionMismatch {
                expected: self.dim,
                actual: row.dim(),
            });
        }
        self.rows.push(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn into_parts(self) -> (usize, Vec<SparseVector>, Vec<Label>) {
        (self.dim, self.rows, self.labels)
    }
}
