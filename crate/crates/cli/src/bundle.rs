//! Self-describing JSON model bundles.
//!
//! A bundle holds everything `predict` needs: the preprocessing settings,
//! the fitted TF-IDF model and the classifier, plus provenance. It is
//! written with sorted keys and shortest round-trip numbers, so loading a
//! bundle and saving it again reproduces the same bytes.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spamsmote::preprocess::BUILTIN_STOPWORDS_NAME;
use spamsmote::{Preprocessor, SmoteConfig, StopWordList, TfIdfModel, TrainConfig, TrainedClassifier};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopWordsRecord {
    pub name: String,
    pub sha256: String,
    /// Embedded only for lists other than the built-in one.
    pub words: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessRecord {
    pub min_token_len: usize,
    pub stopwords: StopWordsRecord,
}

impl PreprocessRecord {
    pub fn from_preprocessor(pre: &Preprocessor) -> Self {
        let words = (pre.stopwords.name() != BUILTIN_STOPWORDS_NAME)
            .then(|| pre.stopwords.words().map(str::to_string).collect());
        PreprocessRecord {
            min_token_len: pre.min_token_len,
            stopwords: StopWordsRecord {
                name: pre.stopwords.name().to_string(),
                sha256: pre.stopwords.digest(),
                words,
            },
        }
    }

    /// Rebuild the preprocessor, checking the stop-list hash.
    pub fn preprocessor(&self) -> anyhow::Result<Preprocessor> {
        if self.min_token_len == 0 {
            bail!("min_token_len must be at least 1");
        }
        let rec = &self.stopwords;
        let list = match &rec.words {
            Some(words) => StopWordList::from_words(rec.name.clone(), words.iter().cloned()),
            None if rec.name == BUILTIN_STOPWORDS_NAME => StopWordList::builtin(),
            None => bail!("stop-word list `{}` is neither built in nor embedded", rec.name),
        };
        if list.digest() != rec.sha256 {
            bail!(
                "stop-word list `{}` hash mismatch: bundle says {}, contents give {}",
                rec.name,
                rec.sha256,
                list.digest()
            );
        }
        Ok(Preprocessor::new(list, self.min_token_len))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    pub train_config: TrainConfig,
    pub smote: Option<SmoteConfig>,
    pub dataset_digest: String,
    pub test_dataset_digest: Option<String>,
    /// `None` when a separate test file was given.
    pub train_fraction: Option<f64>,
    pub train_size: usize,
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBundle {
    pub format_version: u64,
    pub preprocess: PreprocessRecord,
    pub tfidf: TfIdfModel,
    pub classifier: TrainedClassifier,
    pub provenance: Provenance,
}

impl ModelBundle {
    /// Canonical JSON text: sorted keys, two-space indent, trailing newline.
    pub fn to_json(&self) -> anyhow::Result<String> {
        let value = serde_json::to_value(self)?;
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let value: Value = serde_json::from_str(text).context("bundle is not valid JSON")?;
        let version = value
            .get("format_version")
            .ok_or_else(|| anyhow!("bundle has no format_version"))?;
        if version.as_u64() != Some(FORMAT_VERSION) {
            bail!("unsupported bundle format_version {version} (this build reads {FORMAT_VERSION})");
        }
        let bundle: ModelBundle = serde_json::from_value(value).context("malformed bundle")?;
        if bundle.tfidf.dim() != bundle.classifier.dim() {
            bail!(
                "vectorizer has {} terms but classifier expects {}",
                bundle.tfidf.dim(),
                bundle.classifier.dim()
            );
        }
        bundle.preprocess.preprocessor()?;
        Ok(bundle)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("loading {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        fs::write(path, self.to_json()?).with_context(|| format!("writing {}", path.display()))
    }
}
