use proptest::prelude::*;
use spamsmote::ingest::LabeledDocument;
use spamsmote::preprocess::{filter_tokens, preprocess_document, strip_html, tokenize};
use spamsmote::{Label, Preprocessor, StopWordList};

fn messy_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-zA-Z0-9]{1,8}",
        Just(" ".to_string()),
        Just("\t".to_string()),
        Just("\n".to_string()),
        Just("&nbsp;".to_string()),
        Just("&amp;".to_string()),
        Just("&lt;b&gt;".to_string()),
        Just("<b>".to_string()),
        Just("</p>".to_string()),
        Just("<a href='x'>".to_string()),
        Just("<script>var x=1;</script>".to_string()),
        Just("<!-- note -->".to_string()),
        Just("Éé".to_string()),
        "[!?.,;:'-]{1,3}",
    ];
    prop::collection::vec(piece, 0..30).prop_map(|v| v.concat())
}

proptest! {
    #[test]
    fn strip_html_is_idempotent_once_tags_are_gone(raw in messy_text()) {
        let once = strip_html(&raw);
        prop_assume!(!once.contains('<') && !once.contains('&'));
        prop_assert_eq!(strip_html(&once), once);
    }

    #[test]
    fn tokens_satisfy_the_filter_contract(raw in messy_text()) {
        let stops = StopWordList::builtin();
        let doc = LabeledDocument::new("d", raw, Label::Spam);
        let seq = preprocess_document(&doc, &stops);
        for t in &seq.tokens {
            prop_assert!(t.chars().count() >= 3, "{t}");
            prop_assert!(t.chars().all(char::is_alphanumeric), "{t}");
            prop_assert_eq!(t.to_lowercase(), t.clone());
            prop_assert!(!stops.contains(t), "{t}");
        }
        prop_assert_eq!(&seq, &preprocess_document(&doc, &stops));
    }

    #[test]
    fn surviving_tokens_keep_text_order(words in prop::collection::vec("[a-z]{1,6}", 0..25)) {
        let stops = StopWordList::builtin();
        let text = words.join(" ");
        let kept = filter_tokens(tokenize(&text), &stops, 3);
        let mut rest = words.iter();
        for t in &kept {
            prop_assert!(rest.any(|w| w == t), "{t} out of order");
        }
    }
}

#[test]
fn worked_examples() {
    assert_eq!(strip_html("click&nbsp;here\tnow"), "click here now");
    assert_eq!(strip_html("<script>var x=1;</script>visit site"), "visit site");
    let stops = StopWordList::builtin();
    let they: Vec<String> = ["they", "are", "spam"].iter().map(|s| s.to_string()).collect();
    assert_eq!(filter_tokens(they, &stops, 3), ["spam"]);

    let doc = LabeledDocument::new("d", "<a href='x'>Cheap pills</a> are here!!", Label::Spam);
    // "here" is on the built-in English list.
    assert_eq!(preprocess_document(&doc, &stops).tokens, ["cheap", "pills"]);
    let short = StopWordList::from_words("short", ["are", "is", "they", "this"]);
    assert_eq!(preprocess_document(&doc, &short).tokens, ["cheap", "pills", "here"]);
}

#[test]
fn custom_min_length() {
    let pre = Preprocessor::new(StopWordList::empty(), 1);
    assert_eq!(pre.tokens("a bc Déf"), ["a", "bc", "déf"]);
}
