//! Imbalanced text classification toolkit.
//!
//! The pipeline runs raw labeled text through HTML stripping, tokenization
//! and stop-word filtering ([`preprocess`]), TF-IDF vectorization
//! ([`vectorize`]), optional SMOTE oversampling of the training minority
//! class ([`resample`]), one of four classifiers ([`classify`]), and
//! spam-positive evaluation ([`evaluate`]).

pub mod classify;
pub mod evaluate;
pub mod fixture;
pub mod ingest;
pub mod label;
pub mod matrix_io;
pub mod pipeline;
pub mod preprocess;
pub mod resample;
pub mod rng;
pub mod sparse;
pub mod vectorize;

pub use classify::{train, Algorithm, TrainConfig, TrainedClassifier};
pub use evaluate::{compare, confusion, metrics, ComparisonReport, ConfusionMatrix, MetricsReport};
pub use ingest::{load_corpus, split, Corpus, DatasetFormat, DatasetSplit, LabeledDocument};
pub use label::Label;
pub use preprocess::{Preprocessor, StopWordList, TokenSequence};
pub use resample::{balance_training_set, knn, smote, ResampleReport, SmoteConfig};
pub use sparse::{FeatureMatrix, SparseVector};
pub use vectorize::TfIdfModel;
