//! Part-of-speech tagging with Penn Treebank tags.
//!
//! [`LexiconTagger`] is a closed-lexicon tagger with numeral, capitalisation
//! and suffix fallbacks plus two contextual fix-ups. [`ExternalTagger`]
//! delegates to another process over a line-delimited exchange.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{is_digit_numeral, tokenize_words};

/// Assigns one Penn Treebank tag per token.
pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Result<Vec<String>>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<String>, tags: Vec<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidSentence("no tokens".into()));
        }
        if tokens.len() != tags.len() {
            return Err(Error::Tagger(format!(
                "{} tokens but {} tags",
                tokens.len(),
                tags.len()
            )));
        }
        Ok(TaggedSentence { tokens, tags })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Tokenizes `sentence` and tags it.
pub fn pos_tag(sentence: &str, tagger: &dyn PosTagger) -> Result<TaggedSentence> {
    let tokens = tokenize_words(sentence);
    if tokens.is_empty() {
        return Err(Error::InvalidSentence(format!("{sentence:?} has no tokens")));
    }
    tag_tokens(tokens, tagger)
}

pub fn tag_tokens(tokens: Vec<String>, tagger: &dyn PosTagger) -> Result<TaggedSentence> {
    if tokens.is_empty() {
        return Err(Error::InvalidSentence("no tokens".into()));
    }
    let tags = tagger.tag(&tokens)?;
    TaggedSentence::new(tokens, tags)
}

/// Nouns, adjectives and cardinal numbers.
pub fn is_replaceable_tag(tag: &str) -> bool {
    tag.starts_with("NN") || tag.starts_with("JJ") || tag == "CD"
}

const BUILTIN_LEXICON: &str = "
DT a an the this that these those another every each some any no all both either neither
PDT half
PRP i you he she it we they me him her us them myself yourself himself herself itself ourselves themselves
PRP$ my your his its our their
IN of in on at by for with from about into over under after before between through during without within against among since until upon than because while although if whether as near across behind beyond
TO to
CC and or but nor
MD can could will would shall should may might must
VBZ is has does likes makes needs wants sees says goes gets takes gives knows thinks seems loves hates
VBP are have do am like make need want see say go get take give know think seem love hate
VBD was were had did made saw said went got took gave knew thought seemed liked loved
VB be
VBN been done seen gone given taken known
VBG being having doing making going
RB not very also often always never too quite really just only still even now then here again already soon almost
EX there
WDT which
WP who what
WRB when where why how
UH oh yes hello
CD one two three four five six seven eight nine ten eleven twelve twenty thirty hundred thousand million billion
JJ good nice great fine bad big small large little new old young happy sad kind important different same other first last long short high low early late strong weak hard easy real whole free full special clear sure open public private major main local social political economic human true able certain red blue green black white
JJR better worse bigger smaller larger older younger
JJS best worst biggest smallest largest
NN man woman child person research work study time year way day world life hand part place case week company system program question government number night point home water room mother area money story fact month lot right book eye job word business issue side head house service friend father power hour game line end member law car city community name president team minute idea kid body information back parent face level office door health art war history party result change morning reason girl guy moment air teacher force education food music science spirit heart shame earthquake magnitude cat dog
NNS men women children people boys girls kids cats dogs
";

/// Lexicon tagger with rule fallbacks for unknown words.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lexicon: HashMap<String, String>,
}

impl Default for LexiconTagger {
    fn default() -> Self {
        Self::new()
    }
}

impl LexiconTagger {
    pub fn new() -> Self {
        let mut tagger = LexiconTagger {
            lexicon: HashMap::new(),
        };
        for line in BUILTIN_LEXICON.lines() {
            let mut fields = line.split_whitespace();
            let Some(tag) = fields.next() else { continue };
            for word in fields {
                tagger.lexicon.insert(word.to_string(), tag.to_string());
            }
        }
        tagger
    }

    /// Adds or overrides one entry.
    pub fn insert(&mut self, word: impl Into<String>, tag: impl Into<String>) {
        self.lexicon.insert(word.into(), tag.into());
    }

    /// Loads extra entries from lines of `word TAG`.
    pub fn extend_from_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            match (fields.next(), fields.next(), fields.next()) {
                (Some(w), Some(t), None) => self.insert(w, t),
                _ => return Err(Error::parse(path, i + 1, "expected `word TAG`")),
            }
        }
        Ok(())
    }

    fn lookup(&self, token: &str) -> Option<&str> {
        self.lexicon
            .get(token)
            .or_else(|| self.lexicon.get(&token.to_lowercase()))
            .map(String::as_str)
    }

    fn tag_one(&self, token: &str, position: usize) -> (String, bool) {
        if let Some(tag) = punctuation_tag(token) {
            return (tag.to_string(), false);
        }
        if is_digit_numeral(token) {
            return ("CD".into(), false);
        }
        if let Some(tag) = self.lookup(token) {
            return (tag.to_string(), false);
        }
        let first_upper = token.chars().next().is_some_and(char::is_uppercase);
        if first_upper && position > 0 {
            return ("NNP".into(), false);
        }
        (suffix_tag(&token.to_lowercase()).to_string(), true)
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, tokens: &[String]) -> Result<Vec<String>> {
        let mut tags = Vec::with_capacity(tokens.len());
        let mut guessed = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() || tok.chars().any(char::is_whitespace) {
                return Err(Error::Tagger(format!("bad token {tok:?}")));
            }
            let (tag, guess) = self.tag_one(tok, i);
            tags.push(tag);
            guessed.push(guess);
        }
        for i in 1..tags.len() {
            let prev = tags[i - 1].clone();
            // "he runs": third-person verb, not a plural noun.
            if guessed[i] && tags[i] == "NNS" && prev == "PRP" {
                tags[i] = "VBZ".into();
            }
            // "to do", "can see": base form after TO or a modal.
            if (prev == "TO" || prev == "MD") && tags[i] == "VBP" {
                tags[i] = "VB".into();
            }
        }
        Ok(tags)
    }
}

fn punctuation_tag(token: &str) -> Option<&'static str> {
    let mut chars = token.chars();
    let c = chars.next()?;
    if chars.next().is_some() || c.is_alphanumeric() {
        return None;
    }
    Some(match c {
        '.' | '!' | '?' => ".",
        ',' => ",",
        ':' | ';' | '-' | '\u{2013}' | '\u{2014}' => ":",
        '(' | '[' | '{' => "-LRB-",
        ')' | ']' | '}' => "-RRB-",
        '"' | '“' | '”' | '\'' | '`' => "''",
        '$' => "$",
        '#' => "#",
        _ => "SYM",
    })
}

fn suffix_tag(word: &str) -> &'static str {
    let n = word.chars().count();
    let ends = |s: &str| word.ends_with(s) && n > s.len() + 1;
    if word.contains('-') {
        "JJ"
    } else if ends("ing") {
        "VBG"
    } else if ends("ed") {
        "VBD"
    } else if ends("ly") {
        "RB"
    } else if ["ness", "ment", "tion", "sion", "ity", "ism", "ist"]
        .iter()
        .any(|s| ends(s))
    {
        "NN"
    } else if ["ous", "ful", "able", "ible", "ive", "less", "ical", "ish", "ic", "al"]
        .iter()
        .any(|s| ends(s))
    {
        "JJ"
    } else if ends("est") {
        "JJS"
    } else if ends("s") && !["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        "NNS"
    } else {
        "NN"
    }
}

/// Runs an external tagger per call. The tokens are written on one line,
/// space-separated; the process answers with one line of `token/TAG` pairs
/// (or bare tags).
#[derive(Debug, Clone)]
pub struct ExternalTagger {
    program: String,
    args: Vec<String>,
}

impl ExternalTagger {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalTagger {
            program: program.into(),
            args,
        }
    }
}

impl PosTagger for ExternalTagger {
    fn tag(&self, tokens: &[String]) -> Result<Vec<String>> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Tagger(format!("spawn {}: {e}", self.program)))?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            writeln!(stdin, "{}", tokens.join(" "))
                .map_err(|e| Error::Tagger(format!("write to tagger: {e}")))?;
        }
        let output = child
            .wait_with_output()
            .map_err(|e| Error::Tagger(format!("wait for tagger: {e}")))?;
        if !output.status.success() {
            return Err(Error::Tagger(format!("tagger exited with {}", output.status)));
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        let line = stdout.lines().next().unwrap_or("");
        let tags: Vec<String> = line
            .split_whitespace()
            .map(|item| match item.rsplit_once('/') {
                Some((_, tag)) if !tag.is_empty() => tag.to_string(),
                _ => item.to_string(),
            })
            .collect();
        if tags.len() != tokens.len() {
            return Err(Error::Tagger(format!(
                "expected {} tags, got {}",
                tokens.len(),
                tags.len()
            )));
        }
        Ok(tags)
    }
}
