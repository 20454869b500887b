//! Glue from raw corpora to feature matrices.

use crate::ingest::Corpus;
use crate::preprocess::Preprocessor;
use crate::sparse::FeatureMatrix;
use crate::vectorize::{TfIdfModel, VectorizeError};

/// A vectorizer fitted on a training corpus together with the transformed
/// training and test matrices.
#[derive(Debug, Clone)]
pub struct Featurized {
    pub model: TfIdfModel,
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
}

/// Preprocess both corpora, fit TF-IDF on the training side only, and
/// transform both.
pub fn featurize(
    preprocessor: &Preprocessor,
    train: &Corpus,
    test: &Corpus,
) -> Result<Featurized, VectorizeError> {
    let train_tokens = preprocessor.process_all(train.documents());
    let model = TfIdfModel::fit(&train_tokens)?;
    let train_matrix = model.transform_corpus(&train_tokens, &train.labels())?;
    let test_tokens = preprocessor.process_all(test.documents());
    let test_matrix = model.transform_corpus(&test_tokens, &test.labels())?;
    Ok(Featurized {
        model,
        train: train_matrix,
        test: test_matrix,
    })
}
