use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary class label. Spam is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    NonSpam,
    Spam,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::NonSpam, Label::Spam];

    pub fn as_u8(self) -> u8 {
        match self {
            Label::NonSpam => 0,
            Label::Spam => 1,
        }
    }

    pub fn index(self) -> usize {
        self.as_u8() as usize
    }

    pub fn other(self) -> Label {
        match self {
            Label::NonSpam => Label::Spam,
            Label::Spam => Label::NonSpam,
        }
    }
}

impl From<Label> for u8 {
    fn from(label: Label) -> u8 {
        label.as_u8()
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(Label::NonSpam),
            1 => Ok(Label::Spam),
            other => Err(format!("label must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Per-class counts indexed by [`Label::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub non_spam: usize,
    pub spam: usize,
}

impl ClassCounts {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Self {
        let mut counts = ClassCounts::default();
        for label in labels {
            counts.add(*label);
        }
        counts
    }

    pub fn add(&mut self, label: Label) {
        match label {
            Label::NonSpam => self.non_spam += 1,
            Label::Spam => self.spam += 1,
        }
    }

    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::NonSpam => self.non_spam,
            Label::Spam => self.spam,
        }
    }

    pub fn total(&self) -> usize {
        self.non_spam + self.spam
    }
}
