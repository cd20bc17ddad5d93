//! Deterministic dictionary translator with planted inconsistencies.
//!
//! Rule file lines:
//! - `src -> tgt` (or `src → tgt`): phrase rewrite, longest match first
//! - `word -> repl WHEN trigger`: translate `word` as `repl` whenever
//!   `trigger` occurs in the input
//! - `TOKEN = p`: probability when `TOKEN` occurs in the output; first match
//!   wins, `*` matches anything
//! - `@unknown = copy | error`: policy for words without a rule

use std::collections::HashMap;
use std::path::Path;

use super::{Backend, RawTranslation, TranslateError};
use crate::error::{Error, Result};
use crate::text::{tokenize_words, LanguageProfile};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnknownPolicy {
    #[default]
    Copy,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub word: String,
    pub replacement: Vec<String>,
    pub trigger: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MockConfig {
    /// Source phrase (lowercased tokens) to target tokens.
    pub rules: HashMap<Vec<String>, Vec<String>>,
    pub injections: Vec<Injection>,
    pub probabilities: Vec<(String, f64)>,
    pub unknown: UnknownPolicy,
}

fn split_arrow(line: &str) -> Option<(&str, &str)> {
    line.split_once('→').or_else(|| line.split_once("->"))
}

fn lower_tokens(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_lowercase).collect()
}

impl MockConfig {
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut cfg = MockConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::parse(source, i + 1, msg);
            if let Some(rest) = line.strip_prefix("@unknown") {
                let v = rest.trim().trim_start_matches('=').trim();
                cfg.unknown = match v {
                    "copy" => UnknownPolicy::Copy,
                    "error" => UnknownPolicy::Error,
                    _ => return Err(bad("@unknown must be copy or error")),
                };
            } else if let Some((lhs, rhs)) = split_arrow(line) {
                if let Some((repl, trigger)) = rhs.split_once(" WHEN ") {
                    let word = lhs.trim().to_lowercase();
                    let trigger = trigger.trim().to_lowercase();
                    if word.contains(char::is_whitespace) || trigger.is_empty() || word.is_empty() {
                        return Err(bad("injection needs a single word and a trigger"));
                    }
                    cfg.injections.push(Injection {
                        word,
                        replacement: repl.split_whitespace().map(String::from).collect(),
                        trigger,
                    });
                } else {
                    let src = lower_tokens(lhs);
                    let tgt: Vec<String> = rhs.split_whitespace().map(String::from).collect();
                    if src.is_empty() {
                        return Err(bad("empty rule source"));
                    }
                    cfg.rules.insert(src, tgt);
                }
            } else if let Some((pat, p)) = line.rsplit_once('=') {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| bad("probability must be a number"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad("probability outside [0, 1]"));
                }
                cfg.probabilities.push((pat.trim().to_string(), p));
            } else {
                return Err(bad("unrecognised mock rule"));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    fn longest_rule(&self) -> usize {
        self.rules.keys().map(Vec::len).max().unwrap_or(1)
    }

    /// Translates source tokens into target tokens.
    pub fn translate_tokens(&self, tokens: &[String]) -> std::result::Result<Vec<String>, TranslateError> {
        let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        let longest = self.longest_rule();
        let mut out = Vec::new();
        let mut i = 0;
        while i < lower.len() {
            if let Some(inj) = self
                .injections
                .iter()
                .find(|inj| inj.word == lower[i] && lower.contains(&inj.trigger))
            {
                out.extend(inj.replacement.iter().cloned());
                i += 1;
                continue;
            }
            let matched = (1..=longest.min(lower.len() - i))
                .rev()
                .find_map(|n| self.rules.get(&lower[i..i + n]).map(|t| (n, t)));
            match matched {
                Some((n, t)) => {
                    out.extend(t.iter().cloned());
                    i += n;
                }
                None => match self.unknown {
                    UnknownPolicy::Copy => {
                        out.push(tokens[i].clone());
                        i += 1;
                    }
                    UnknownPolicy::Error => {
                        return Err(TranslateError::Permanent(format!(
                            "mock has no rule for {:?}",
                            tokens[i]
                        )))
                    }
                },
            }
        }
        Ok(out)
    }

    pub fn probability(&self, output: &[String]) -> Option<f64> {
        if self.probabilities.is_empty() {
            return None;
        }
        let hit = self
            .probabilities
            .iter()
            .find(|(pat, _)| pat == "*" || output.iter().any(|t| t == pat));
        Some(hit.map_or(1.0, |&(_, p)| p))
    }
}

#[derive(Debug, Clone)]
pub struct MockBackend {
    id: String,
    config: MockConfig,
    target: LanguageProfile,
}

impl MockBackend {
    pub fn new(id: impl Into<String>, config: MockConfig, target: LanguageProfile) -> Self {
        MockBackend {
            id: id.into(),
            config,
            target,
        }
    }
}

impl Backend for MockBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn translate(&self, text: &str, _source: &str, _target: &str) -> std::result::Result<RawTranslation, TranslateError> {
        let out = self.config.translate_tokens(&tokenize_words(text))?;
        Ok(RawTranslation {
            probability: self.config.probability(&out),
            text: self.target.detokenize(&out),
        })
    }
}
