//! Raw text to token sequences: HTML stripping, tokenization, and filtering of
//! short words and stop words.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ingest::LabeledDocument;

/// Minimum token length (in Unicode scalar values) kept by default.
pub const DEFAULT_MIN_TOKEN_LEN: usize = 3;

/// Name of the embedded stop-word list.
pub const BUILTIN_STOPWORDS_NAME: &str = "english-v1";

const BUILTIN_STOPWORDS: &str = include_str!("../data/english-stopwords-v1.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWordList {
    name: String,
    words: BTreeSet<String>,
}

impl StopWordList {
    /// The embedded 318-word English list.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_STOPWORDS_NAME, BUILTIN_STOPWORDS)
    }

    pub fn empty() -> Self {
        StopWordList {
            name: "empty".to_string(),
            words: BTreeSet::new(),
        }
    }

    pub fn from_words<I, S>(name: impl Into<String>, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWordList {
            name: name.into(),
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(name: impl Into<String>, contents: &str) -> Self {
        let words = contents
            .lines()
            .map(|line| line.split('#').next().unwrap_or_default())
            .filter(|w| !w.trim().is_empty());
        Self::from_words(name, words)
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let contents = fs::read_to_string(path)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_string());
        Ok(Self::parse(name, &contents))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Hex SHA-256 over the sorted words, each followed by `\n`.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for word in &self.words {
            hasher.update(word.as_bytes());
            hasher.update(b"\n");
        }
        hex(&hasher.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub source_id: String,
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenSequence {
            source_id: source_id.into(),
            tokens,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Text,
    TagOpen,
    TagName,
    InTag,
    Comment,
    Script,
    Style,
}

/// Remove markup from `raw`, returning its text content.
///
/// Tags are dropped, `<script>`/`<style>` bodies and comments are dropped
/// entirely, common entities are decoded (`&nbsp;` becomes a plain space),
/// and newlines and tabs become single spaces. Malformed input never fails:
/// an unclosed tag runs to the end of input, and a `<` not followed by a
/// letter, `/` or `!` is literal text.
pub fn strip_html(raw: &str) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = String::with_capacity(raw.len());
    let mut state = State::Text;
    let mut i = 0;

    let mut name = String::new();
    let mut closing = false;
    let mut quote: Option<char> = None;
    let mut after_eq = false;
    let mut last_significant = '\0';

    while i < chars.len() {
        let c = chars[i];
        match state {
            State::Text => match c {
                '<' => {
                    let opens = chars
                        .get(i + 1)
                        .is_some_and(|&n| n.is_alphabetic() || n == '/' || n == '!');
                    if opens {
                        state = State::TagOpen;
                    } else {
                        out.push('<');
                    }
                    i += 1;
                }
                '&' => match decode_entity(&chars[i..]) {
                    Some((decoded, consumed)) => {
                        push_text_char(&mut out, decoded);
                        i += consumed;
                    }
                    None => {
                        out.push('&');
                        i += 1;
                    }
                },
                '\r' => {
                    out.push(' ');
                    i += if chars.get(i + 1) == Some(&'\n') { 2 } else { 1 };
                }
                _ => {
                    push_text_char(&mut out, c);
                    i += 1;
                }
            },
            State::TagOpen => {
                name.clear();
                closing = false;
                quote = None;
                after_eq = false;
                last_significant = '\0';
                if starts_with(&chars[i..], "!--") {
                    state = State::Comment;
                    i += 3;
                } else if c == '/' {
                    closing = true;
                    state = State::TagName;
                    i += 1;
                } else {
                    state = State::TagName;
                }
            }
            State::TagName => {
                if c.is_alphanumeric() || c == '-' {
                    name.extend(c.to_lowercase());
                    i += 1;
                } else {
                    state = State::InTag;
                }
            }
            State::InTag => {
                if let Some(q) = quote {
                    if c == q {
                        quote = None;
                    }
                } else if c == '>' {
                    let self_closing = last_significant == '/';
                    state = match name.as_str() {
                        "script" if !closing && !self_closing => State::Script,
                        "style" if !closing && !self_closing => State::Style,
                        _ => State::Text,
                    };
                } else if (c == '"' || c == '\'') && after_eq {
                    quote = Some(c);
                } else if !c.is_whitespace() {
                    after_eq = c == '=';
                    last_significant = c;
                }
                i += 1;
            }
            State::Comment => {
                if starts_with(&chars[i..], "-->") {
                    state = State::Text;
                    i += 3;
                } else {
                    i += 1;
                }
            }
            State::Script | State::Style => {
                let element = if state == State::Script { "script" } else { "style" };
                if c == '<' && chars.get(i + 1) == Some(&'/') && closes(&chars[i + 2..], element) {
                    // Re-enter tag scanning at the closing tag's name.
                    state = State::TagOpen;
                }
                i += 1;
            }
        }
    }
    out
}

fn push_text_char(out: &mut String, c: char) {
    match c {
        '\n' | '\t' | '\r' => out.push(' '),
        _ => out.push(c),
    }
}

fn starts_with(chars: &[char], pattern: &str) -> bool {
    let mut it = chars.iter();
    pattern.chars().all(|p| it.next() == Some(&p))
}

/// `chars` begins with `element` (ASCII case-insensitive) followed by a
/// non-name character or end of input.
fn closes(chars: &[char], element: &str) -> bool {
    let len = element.chars().count();
    chars.len() >= len
        && chars
            .iter()
            .zip(element.chars())
            .all(|(a, b)| a.eq_ignore_ascii_case(&b))
        && chars
            .get(len)
            .is_none_or(|c| !(c.is_alphanumeric() || *c == '-'))
}

/// Decode an entity at the start of `chars` (which begins with `&`).
/// Returns the decoded character and the number of chars consumed.
fn decode_entity(chars: &[char]) -> Option<(char, usize)> {
    const MAX_LEN: usize = 12;
    let semi = chars.iter().take(MAX_LEN).position(|&c| c == ';')?;
    let body: String = chars[1..semi].iter().collect();
    let decoded = match body.as_str() {
        "nbsp" => ' ',
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        _ => {
            let numeric = body.strip_prefix('#')?;
            let code = match numeric.strip_prefix(['x', 'X']) {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => numeric.parse::<u32>().ok()?,
            };
            match char::from_u32(code)? {
                '\u{a0}' => ' ',
                ch => ch,
            }
        }
    };
    Some((decoded, semi + 1))
}

/// Lowercase `text` and split it on every run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Drop tokens shorter than `min_len` characters, then stop words.
pub fn filter_tokens(tokens: Vec<String>, stops: &StopWordList, min_len: usize) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| t.chars().count() >= min_len)
        .filter(|t| !stops.contains(t))
        .collect()
}

/// The preprocessing settings shared by training and prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessor {
    pub stopwords: StopWordList,
    pub min_token_len: usize,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            stopwords: StopWordList::builtin(),
            min_token_len: DEFAULT_MIN_TOKEN_LEN,
        }
    }
}

impl Preprocessor {
    pub fn new(stopwords: StopWordList, min_token_len: usize) -> Self {
        assert!(min_token_len >= 1, "min_token_len must be at least 1");
        Preprocessor {
            stopwords,
            min_token_len,
        }
    }

    pub fn tokens(&self, raw: &str) -> Vec<String> {
        filter_tokens(tokenize(&strip_html(raw)), &self.stopwords, self.min_token_len)
    }

    pub fn process(&self, doc: &LabeledDocument) -> TokenSequence {
        TokenSequence::new(doc.id.clone(), self.tokens(&doc.text))
    }

    pub fn process_all(&self, docs: &[LabeledDocument]) -> Vec<TokenSequence> {
        docs.iter().map(|d| self.process(d)).collect()
    }
}

/// Full pipeline with the default minimum token length.
pub fn preprocess_document(doc: &LabeledDocument, stops: &StopWordList) -> TokenSequence {
    TokenSequence::new(
        doc.id.clone(),
        filter_tokens(tokenize(&strip_html(&doc.text)), stops, DEFAULT_MIN_TOKEN_LEN),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn strips_simple_tags() {
        assert_eq!(strip_html("<p>hello <b>world</b></p>"), "hello world");
    }

    #[test]
    fn decodes_nbsp_and_whitespace() {
        assert_eq!(strip_html("click&nbsp;here\tnow"), "click here now");
        assert_eq!(strip_html("a\nb\r\nc"), "a b c");
    }

    #[test]
    fn drops_script_and_style_bodies() {
        assert_eq!(strip_html("<script>var x=1;</script>visit site"), "visit site");
        assert_eq!(
            strip_html("<STYLE type=\"text/css\">p { color: red }</Style>ok"),
            "ok"
        );
        assert_eq!(
            strip_html("<script>if (a < b && c > d) { x = '</scr' + 'ipt>'; }</script>done"),
            "done"
        );
        assert_eq!(strip_html("<script>never closed"), "");
    }

    #[test]
    fn entities() {
        assert_eq!(strip_html("a &amp; b &lt;c&gt; &quot;d&quot;"), "a & b <c> \"d\"");
        assert_eq!(strip_html("&#65;&#x42;&#10;z"), "AB z");
        assert_eq!(strip_html("AT&T &bogus; &"), "AT&T &bogus; &");
    }

    #[test]
    fn lenient_markup() {
        assert_eq!(strip_html("1 < 2 and 3 <= 4"), "1 < 2 and 3 <= 4");
        assert_eq!(strip_html("text <unclosed tag"), "text ");
        assert_eq!(strip_html("<!-- hidden <b>x</b> -->shown"), "shown");
        assert_eq!(strip_html("<!DOCTYPE html><html>x</html>"), "x");
        assert_eq!(strip_html("<a title='1 > 0' href=\"x>y\">link</a>"), "link");
        assert_eq!(strip_html("<script src='a.js'/>after"), "after");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Buy NOW, buy!!"), strings(&["buy", "now", "buy"]));
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("ver2.0 release-notes"),
            strings(&["ver2", "0", "release", "notes"])
        );
        assert_eq!(tokenize("Über café"), strings(&["über", "café"]));
    }

    #[test]
    fn filter_examples() {
        let stops = StopWordList::builtin();
        assert_eq!(
            filter_tokens(strings(&["is", "to", "installation", "this", "guide"]), &stops, 3),
            strings(&["installation", "guide"])
        );
        assert_eq!(
            filter_tokens(strings(&["they", "are", "spam"]), &stops, 3),
            strings(&["spam"])
        );
        assert!(filter_tokens(vec![], &stops, 3).is_empty());
        // length counts characters, not bytes
        assert_eq!(filter_tokens(strings(&["éé", "ééé"]), &stops, 3), strings(&["ééé"]));
    }

    #[test]
    fn builtin_list_contents() {
        let stops = StopWordList::builtin();
        assert_eq!(stops.len(), 318);
        assert_eq!(stops.name(), BUILTIN_STOPWORDS_NAME);
        for w in ["are", "is", "they", "this"] {
            assert!(stops.contains(w), "{w}");
        }
        assert_eq!(
            stops.digest(),
            StopWordList::from_words("x", stops.words().collect::<Vec<_>>()).digest()
        );
    }

    #[test]
    fn stopword_file_format() {
        let list = StopWordList::parse("mine", "# comment\nFoo\n\nbar  # trailing\n");
        assert!(list.contains("foo"));
        assert!(list.contains("bar"));
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn document_pipeline() {
        let doc = LabeledDocument::new("d", "<a href='x'>Cheap pills</a> are here!!", Label::Spam);
        // "here" is on the embedded list.
        assert_eq!(
            preprocess_document(&doc, &StopWordList::builtin()).tokens,
            strings(&["cheap", "pills"])
        );
        let short_list = StopWordList::from_words("four", ["are", "is", "they", "this"]);
        let seq = preprocess_document(&doc, &short_list);
        assert_eq!(seq.tokens, strings(&["cheap", "pills", "here"]));
        assert_eq!(seq.source_id, "d");

        let empty = LabeledDocument::new("e", "", Label::NonSpam);
        assert!(preprocess_document(&empty, &StopWordList::builtin()).is_empty());
        let short = LabeledDocument::new("s", "a an it", Label::NonSpam);
        assert!(preprocess_document(&short, &StopWordList::builtin()).is_empty());
    }

    #[test]
    fn preprocessor_honours_min_len() {
        let p = Preprocessor::new(StopWordList::empty(), 2);
        assert_eq!(p.tokens("a an it"), strings(&["an", "it"]));
    }
}
