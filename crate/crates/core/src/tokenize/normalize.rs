//! Pre-segmentation normalization of the uncased multilingual BERT tokenizer.

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

/// Cleans, optionally case-folds, and splits `text` into words.
///
/// Control and format characters are dropped and whitespace collapsed; in
/// lowercase mode the text is NFD-decomposed with nonspacing marks removed
/// and lowercased; CJK ideographs and punctuation become single-character
/// words.
pub fn basic_normalize(text: &str, lowercase: bool) -> Vec<String> {
    let mut cleaned = String::with_capacity(text.len() + 8);
    for c in text.chars() {
        if c == '\0' || c == '\u{fffd}' || is_control(c) {
            continue;
        }
        if is_whitespace(c) {
            cleaned.push(' ');
        } else if is_cjk_ideograph(c) {
            cleaned.push(' ');
            cleaned.push(c);
            cleaned.push(' ');
        } else {
            cleaned.push(c);
        }
    }

    let folded = if lowercase {
        cleaned
            .nfd()
            .filter(|&c| get_general_category(c) != GeneralCategory::NonspacingMark)
            .flat_map(char::to_lowercase)
            .collect()
    } else {
        cleaned
    };

    let mut words = Vec::new();
    for piece in folded.split(is_whitespace).filter(|p| !p.is_empty()) {
        split_punctuation(piece, &mut words);
    }
    words
}

fn split_punctuation(piece: &str, out: &mut Vec<String>) {
    let mut start = 0;
    for (i, c) in piece.char_indices() {
        if is_punctuation(c) {
            if start < i {
                out.push(piece[start..i].to_string());
            }
            out.push(c.to_string());
            start = i + c.len_utf8();
        }
    }
    if start < piece.len() {
        out.push(piece[start..].to_string());
    }
}

pub(crate) fn is_whitespace(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r') || c.is_whitespace()
}

pub(crate) fn is_control(c: char) -> bool {
    if matches!(c, '\t' | '\n' | '\r') {
        return false;
    }
    matches!(
        get_general_category(c),
        GeneralCategory::Control
            | GeneralCategory::Format
            | GeneralCategory::PrivateUse
            | GeneralCategory::Surrogate
            | GeneralCategory::Unassigned
    )
}

pub(crate) fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            get_general_category(c),
            GeneralCategory::ConnectorPunctuation
                | GeneralCategory::DashPunctuation
                | GeneralCategory::OpenPunctuation
                | GeneralCategory::ClosePunctuation
                | GeneralCategory::InitialPunctuation
                | GeneralCategory::FinalPunctuation
                | GeneralCategory::OtherPunctuation
        )
}

/// CJK Unified Ideographs blocks (not Hangul, Hiragana or Katakana).
pub(crate) fn is_cjk_ideograph(c: char) -> bool {
    matches!(
        c as u32,
        0x4E00..=0x9FFF
            | 0x3400..=0x4DBF
            | 0x20000..=0x2A6DF
            | 0x2A700..=0x2B73F
            | 0x2B740..=0x2B81F
            | 0x2B820..=0x2CEAF
            | 0xF900..=0xFAFF
            | 0x2F800..=0x2FA1F
    )
}
