//! Seeded generator for synthetic two-vocabulary forum corpora.
//!
//! Spam documents draw most of their words from a promotional vocabulary and
//! non-spam documents from a tutorial-forum vocabulary. `cross_rate` controls
//! how often a document borrows a word from the other class's vocabulary and
//! `shared_rate` how often it uses a class-neutral word, so the classes can be
//! made anywhere from trivially separable to heavily overlapping. Some
//! documents are wrapped in light HTML so the preprocessing path is exercised.

use crate::ingest::{Corpus, LabeledDocument};
use crate::label::Label;
use crate::rng::{SeededRng, FIXTURE_STREAM};

pub const SPAM_WORDS: &[&str] = &[
    "cheap", "pills", "offer", "winner", "casino", "loan", "discount", "bonus", "crypto", "prize",
    "cash", "credit", "urgent", "bitcoin", "replica", "pharmacy", "deal", "jackpot", "investment",
    "profit", "subscribe", "followers", "coupon", "lottery", "wholesale",
];

pub const FORUM_WORDS: &[&str] = &[
    "install", "tutorial", "python", "error", "module", "linux", "compile", "script", "version",
    "package", "spoken", "video", "audio", "syllabus", "lecture", "assignment", "library",
    "terminal", "ubuntu", "latex", "scilab", "command", "folder", "windows", "download",
];

pub const SHARED_WORDS: &[&str] = &[
    "question", "please", "thanks", "help", "today", "problem", "website", "people", "time",
    "information", "need", "know", "good", "work", "reply", "forum", "link", "page", "free", "best",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureConfig {
    pub non_spam: usize,
    pub spam: usize,
    pub seed: u64,
    /// Probability that a word comes from the other class's vocabulary.
    pub cross_rate: f64,
    /// Probability that a word comes from the neutral vocabulary.
    pub shared_rate: f64,
    pub min_words: usize,
    pub max_words: usize,
    /// Probability that a document is wrapped in HTML markup.
    pub html_rate: f64,
    pub id_prefix: String,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        FixtureConfig {
            non_spam: 251,
            spam: 41,
            seed: 0,
            cross_rate: 0.2,
            shared_rate: 0.3,
            min_words: 6,
            max_words: 16,
            html_rate: 0.25,
            id_prefix: "doc".to_string(),
        }
    }
}

impl FixtureConfig {
    /// Vocabularies never overlap: every word comes from its own class.
    pub fn separable(non_spam: usize, spam: usize, seed: u64) -> Self {
        FixtureConfig {
            non_spam,
            spam,
            seed,
            cross_rate: 0.0,
            shared_rate: 0.0,
            ..Self::default()
        }
    }
}

fn pick<'a>(rng: &mut SeededRng, words: &[&'a str]) -> &'a str {
    words[rng.below(words.len())]
}

fn document(rng: &mut SeededRng, label: Label, config: &FixtureConfig) -> String {
    let (own, other) = match label {
        Label::Spam => (SPAM_WORDS, FORUM_WORDS),
        Label::NonSpam => (FORUM_WORDS, SPAM_WORDS),
    };
    let span = config.max_words.saturating_sub(config.min_words) + 1;
    let len = config.min_words + rng.below(span);
    let words: Vec<&str> = (0..len)
        .map(|_| {
            let u = rng.next_f64();
            if u < config.cross_rate {
                pick(rng, other)
            } else if u < config.cross_rate + config.shared_rate {
                pick(rng, SHARED_WORDS)
            } else {
                pick(rng, own)
            }
        })
        .collect();
    let text = words.join(" ");
    if rng.next_f64() < config.html_rate {
        match label {
            Label::Spam => format!("<p><a href=\"http://example.com\">{text}</a>&nbsp;!!</p>"),
            Label::NonSpam => format!("<div>{text}<br/>\n<script>track();</script></div>"),
        }
    } else {
        text
    }
}

/// Non-spam documents first, then spam, with ids `<prefix>-<n>`.
pub fn generate_corpus(config: &FixtureConfig) -> Corpus {
    let mut rng = SeededRng::stream(config.seed, FIXTURE_STREAM);
    let labels = std::iter::repeat_n(Label::NonSpam, config.non_spam)
        .chain(std::iter::repeat_n(Label::Spam, config.spam));
    let docs = labels
        .enumerate()
        .map(|(i, label)| {
            LabeledDocument::new(
                format!("{}-{i}", config.id_prefix),
                document(&mut rng, label, config),
                label,
            )
        })
        .collect();
    Corpus::new(docs).expect("generated ids are unique")
}

/// Render a corpus as an `id,text,label` CSV file.
pub fn corpus_to_csv(corpus: &Corpus) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["id", "text", "label"])
        .expect("writing to memory");
    for doc in corpus.documents() {
        writer
            .write_record([doc.id.as_str(), doc.text.as_str(), &doc.label.to_string()])
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("valid UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_corpus, DatasetFormat, LoadOptions};

    #[test]
    fn counts_and_determinism() {
        let config = FixtureConfig::default();
        let a = generate_corpus(&config);
        assert_eq!(a.class_counts().non_spam, 251);
        assert_eq!(a.class_counts().spam, 41);
        assert_eq!(a, generate_corpus(&config));
        let b = generate_corpus(&FixtureConfig { seed: 1, ..config });
        assert_ne!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let corpus = generate_corpus(&FixtureConfig { non_spam: 5, spam: 3, ..Default::default() });
        let csv = corpus_to_csv(&corpus);
        let back = parse_corpus(csv.as_bytes(), DatasetFormat::Csv, LoadOptions::default()).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn separable_vocabularies_do_not_mix() {
        let corpus = generate_corpus(&FixtureConfig::separable(10, 10, 4));
        for doc in corpus.documents() {
            let forbidden = if doc.label == Label::Spam { FORUM_WORDS } else { SPAM_WORDS };
            for word in crate::preprocess::tokenize(&crate::preprocess::strip_html(&doc.text)) {
                assert!(!forbidden.contains(&word.as_str()), "{word} in {}", doc.text);
            }
        }
    }
}
