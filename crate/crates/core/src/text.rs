//! Tokenization, language profiles and numeral detection.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a language's text is split into metric tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tokenization {
    /// Whitespace-delimited words with punctuation split off.
    Word,
    /// One token per character, except runs of ASCII letters/digits.
    Character,
}

/// Scripts written without inter-word spaces.
const UNSPACED_LANGUAGES: &[&str] = &["zh", "ja", "th", "lo", "km", "my", "bo"];

const ENGLISH_NUMERALS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    "hundred", "thousand", "million", "billion", "trillion", "dozen",
];

const CHINESE_NUMERALS: &[&str] = &[
    "零", "〇", "一", "二", "两", "三", "四", "五", "六", "七", "八", "九", "十", "百", "千",
    "万", "亿",
];

#[derive(Debug, Clone)]
pub struct LanguageProfile {
    pub tag: String,
    pub tokenization: Tokenization,
    numerals: HashSet<String>,
}

impl LanguageProfile {
    /// Profile with defaults derived from the language tag: character-level
    /// tokens for unspaced scripts, word tokens otherwise. The numeral lexicon
    /// holds English and Chinese numeral words.
    pub fn for_tag(tag: &str) -> Self {
        let primary = tag.split(['-', '_']).next().unwrap_or("").to_ascii_lowercase();
        let tokenization = if UNSPACED_LANGUAGES.contains(&primary.as_str()) {
            Tokenization::Character
        } else {
            Tokenization::Word
        };
        let numerals = ENGLISH_NUMERALS
            .iter()
            .chain(CHINESE_NUMERALS)
            .map(|s| s.to_string())
            .collect();
        LanguageProfile {
            tag: tag.to_string(),
            tokenization,
            numerals,
        }
    }

    pub fn with_tokenization(mut self, tokenization: Tokenization) -> Self {
        self.tokenization = tokenization;
        self
    }

    pub fn with_numerals<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.numerals = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }

    /// Replaces the numeral lexicon with the words in `path`, one per line.
    pub fn load_numerals(self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let words: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Ok(self.with_numerals(words))
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self.tokenization {
            Tokenization::Word => tokenize_words(text),
            Tokenization::Character => tokenize_chars(text),
        }
    }

    pub fn detokenize<S: AsRef<str>>(&self, tokens: &[S]) -> String {
        match self.tokenization {
            Tokenization::Word => join_words(tokens),
            Tokenization::Character => {
                let mut out = String::new();
                let mut prev_ascii = false;
                for tok in tokens {
                    let tok = tok.as_ref();
                    let ascii = tok.chars().all(|c| c.is_ascii_alphanumeric());
                    if ascii && prev_ascii {
                        out.push(' ');
                    }
                    out.push_str(tok);
                    prev_ascii = ascii;
                }
                out
            }
        }
    }

    pub fn is_numeral(&self, token: &str) -> bool {
        is_digit_numeral(token) || self.numerals.contains(&token.to_lowercase())
    }

    /// True iff the span is non-empty and every token is a numeral.
    pub fn is_numeric<S: AsRef<str>>(&self, span: &[S]) -> bool {
        !span.is_empty() && span.iter().all(|t| self.is_numeral(t.as_ref()))
    }
}

/// Decimal numerals, optionally signed, with `,` group separators and a `.`
/// decimal point between digits: `4`, `4.4`, `-3`, `1,000,000.5`.
pub fn is_digit_numeral(token: &str) -> bool {
    let body = token.strip_prefix(['-', '+']).unwrap_or(token);
    let chars: Vec<char> = body.chars().collect();
    if chars.is_empty()
        || !chars[0].is_ascii_digit()
        || !chars[chars.len() - 1].is_ascii_digit()
    {
        return false;
    }
    let mut prev_sep = false;
    for &c in &chars {
        if c.is_ascii_digit() {
            prev_sep = false;
        } else if c == '.' || c == ',' {
            if prev_sep {
                return false;
            }
            prev_sep = true;
        } else {
            return false;
        }
    }
    true
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits on whitespace and separates punctuation into standalone tokens.
/// Apostrophes and hyphens between word characters stay inside the word, and
/// `.`/`,` between digits stay inside the numeral.
pub fn tokenize_words(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let prev = i.checked_sub(1).map(|p| chars[p]);
            let next = chars.get(i + 1).copied();
            let joins = match c {
                c if is_word_char(c) => true,
                '\'' | '-' => {
                    prev.is_some_and(is_word_char) && next.is_some_and(is_word_char)
                }
                '.' | ',' => {
                    prev.is_some_and(|p| p.is_ascii_digit())
                        && next.is_some_and(|n| n.is_ascii_digit())
                }
                _ => false,
            };
            if joins {
                current.push(c);
            } else {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

/// One token per character; runs of ASCII alphanumerics (and numerals with
/// internal separators) form a single token.
pub fn tokenize_chars(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let prev = i.checked_sub(1).map(|p| chars[p]);
            let next = chars.get(i + 1).copied();
            let ascii_run = c.is_ascii_alphanumeric()
                || ((c == '.' || c == ',')
                    && prev.is_some_and(|p| p.is_ascii_digit())
                    && next.is_some_and(|n| n.is_ascii_digit()));
            if ascii_run {
                current.push(c);
            } else {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

pub fn join_words<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_punctuation() {
        assert_eq!(
            tokenize_words("He likes cats, dogs."),
            vec!["He", "likes", "cats", ",", "dogs", "."]
        );
        assert_eq!(tokenize_words("it's well-known"), vec!["it's", "well-known"]);
        assert_eq!(tokenize_words("(4.4)"), vec!["(", "4.4", ")"]);
        assert_eq!(tokenize_words("end. 1,000"), vec!["end", ".", "1,000"]);
        assert!(tokenize_words("   ").is_empty());
    }

    #[test]
    fn character_tokens() {
        assert_eq!(tokenize_chars("他有4.4个ab"), vec!["他", "有", "4.4", "个", "ab"]);
        let zh = LanguageProfile::for_tag("zh-CN");
        assert_eq!(zh.tokenization, Tokenization::Character);
        assert_eq!(zh.detokenize(&["他", "有", "GPU", "和", "4"]), "他有GPU和4");
        let en = LanguageProfile::for_tag("en");
        assert_eq!(en.tokenization, Tokenization::Word);
    }

    #[test]
    fn numerals() {
        let en = LanguageProfile::for_tag("en");
        assert!(en.is_numeral("4.4"));
        assert!(en.is_numeral("1,000"));
        assert!(en.is_numeral("-3"));
        assert!(en.is_numeral("two"));
        assert!(en.is_numeral("Two"));
        assert!(en.is_numeral("四"));
        assert!(!en.is_numeral("kind"));
        assert!(!en.is_numeral("4."));
        assert!(!en.is_numeral("4..4"));
        assert!(!en.is_numeral("v4"));
        assert!(en.is_numeric(&["twenty", "one"]));
        assert!(!en.is_numeric::<&str>(&[]));
        assert!(!en.is_numeric(&["4", "cats"]));

        let custom = LanguageProfile::for_tag("en").with_numerals(["eins"]);
        assert!(custom.is_numeral("Eins"));
        assert!(!custom.is_numeral("two"));
        assert!(custom.is_numeral("12"));
    }
}
