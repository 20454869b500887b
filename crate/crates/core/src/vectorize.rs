//! TF-IDF vectorization.
//!
//! The weight of term `t` in document `d` is
//!
//! ```text
//! tfidf(t, d) = count(t, d) / |d|  *  ln(n_docs / doc_freq(t))
//! ```
//!
//! where `|d|` counts only in-vocabulary tokens, `n_docs` is the number of
//! training documents and `doc_freq(t)` the number of training documents
//! containing `t`. There is no smoothing and no row normalization; terms
//! unseen during fitting are ignored.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;
use crate::preprocess::TokenSequence;
use crate::sparse::{FeatureMatrix, SparseVector};

#[derive(Debug, Error, PartialEq)]
pub enum VectorizeError {
    #[error("cannot fit a vocabulary on an empty training set")]
    EmptyTrainingSet,
    #[error("{docs} documents but {labels} labels")]
    LengthMismatch { docs: usize, labels: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Vocabulary and document frequencies fitted on training documents.
///
/// Serialized as the ordered term list, the matching `doc_freq` array and
/// `n_docs`; the term-to-index map is rebuilt on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfIdfModelRepr", into = "TfIdfModelRepr")]
pub struct TfIdfModel {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

#[derive(Serialize, Deserialize)]
struct TfIdfModelRepr {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl TryFrom<TfIdfModelRepr> for TfIdfModel {
    type Error = VectorizeError;

    fn try_from(repr: TfIdfModelRepr) -> Result<Self, Self::Error> {
        TfIdfModel::from_parts(repr.terms, repr.doc_freq, repr.n_docs)
    }
}

impl From<TfIdfModel> for TfIdfModelRepr {
    fn from(model: TfIdfModel) -> Self {
        TfIdfModelRepr {
            terms: model.terms,
            doc_freq: model.doc_freq,
            n_docs: model.n_docs,
        }
    }
}

impl TfIdfModel {
    /// Fit on training documents only: vocabulary in first-appearance order,
    /// per-term document frequencies, and the document count.
    pub fn fit(train_docs: &[TokenSequence]) -> Result<Self, VectorizeError> {
        if train_docs.is_empty() {
            return Err(VectorizeError::EmptyTrainingSet);
        }
        let mut terms = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut doc_freq: Vec<usize> = Vec::new();
        let mut last_seen: Vec<usize> = Vec::new();
        for (doc_no, doc) in train_docs.iter().enumerate() {
            for token in &doc.tokens {
                let idx = match index.get(token) {
                    Some(&idx) => idx,
                    None => {
                        let idx = terms.len();
                        terms.push(token.clone());
                        index.insert(token.clone(), idx);
                        doc_freq.push(0);
                        last_seen.push(usize::MAX);
                        idx
                    }
                };
                if last_seen[idx] != doc_no {
                    last_seen[idx] = doc_no;
                    doc_freq[idx] += 1;
                }
            }
        }
        Ok(TfIdfModel {
            terms,
            index,
            doc_freq,
            n_docs: train_docs.len(),
        })
    }

    pub fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        n_docs: usize,
    ) -> Result<Self, VectorizeError> {
        if terms.len() != doc_freq.len() {
            return Err(VectorizeError::InvalidModel(format!(
                "{} terms but {} document frequencies",
                terms.len(),
                doc_freq.len()
            )));
        }
        if let Some((t, df)) = terms
            .iter()
            .zip(&doc_freq)
            .find(|(_, &df)| df == 0 || df > n_docs)
        {
            return Err(VectorizeError::InvalidModel(format!(
                "term `{t}` has document frequency {df} outside 1..={n_docs}"
            )));
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(VectorizeError::InvalidModel(format!("duplicate term `{t}`")));
            }
        }
        Ok(TfIdfModel {
            terms,
            index,
            doc_freq,
            n_docs,
        })
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf(&self, index: usize) -> f64 {
        (self.n_docs as f64 / self.doc_freq[index] as f64).ln()
    }

    pub fn transform(&self, doc: &TokenSequence) -> SparseVector {
        let mut counts: Vec<(usize, usize)> = Vec::new();
        let mut total = 0usize;
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for token in &doc.tokens {
            if let Some(&idx) = self.index.get(token) {
                total += 1;
                match slot.get(&idx) {
                    Some(&s) => counts[s].1 += 1,
                    None => {
                        slot.insert(idx, counts.len());
                        counts.push((idx, 1));
                    }
                }
            }
        }
        if total == 0 {
            return SparseVector::zeros(self.dim());
        }
        counts.sort_unstable_by_key(|&(idx, _)| idx);
        let entries = counts
            .into_iter()
            .map(|(idx, n)| (idx, n as f64 / total as f64 * self.idf(idx)))
            .collect();
        SparseVector::new(self.dim(), entries).expect("sorted in-range finite entries")
    }

    pub fn transform_corpus(
        &self,
        docs: &[TokenSequence],
        labels: &[Label],
    ) -> Result<FeatureMatrix, VectorizeError> {
        if docs.len() != labels.len() {
            return Err(VectorizeError::LengthMismatch {
                docs: docs.len(),
                labels: labels.len(),
            });
        }
        let rows = docs.iter().map(|d| self.transform(d)).collect();
        Ok(FeatureMatrix::new(self.dim(), rows, labels.to_vec()).expect("rows share the model dimension"))
    }
}
