//! Source-to-target word alignment.
//!
//! The shipped aligner is a lexical translation model estimated by
//! expectation-maximization (uniform start, no null word). Externally
//! produced `i-j` alignments plug in through [`PrecomputedAligner`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ALIGNMENT_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub source: usize,
    pub target: usize,
    pub confidence: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AlignmentTable {
    /// Sorted by `(source, target)`.
    pub links: Vec<Link>,
}

impl AlignmentTable {
    pub fn new(mut links: Vec<Link>) -> Self {
        links.sort_by_key(|l| (l.source, l.target));
        links.dedup_by(|a, b| a.source == b.source && a.target == b.target);
        AlignmentTable { links }
    }

    pub fn targets_of(&self, source: usize) -> impl Iterator<Item = usize> + '_ {
        self.links
            .iter()
            .filter(move |l| l.source == source)
            .map(|l| l.target)
    }

    /// `i-j` pairs separated by spaces.
    pub fn to_pharaoh(&self) -> String {
        let parts: Vec<String> = self
            .links
            .iter()
            .map(|l| format!("{}-{}", l.source, l.target))
            .collect();
        parts.join(" ")
    }

    /// Parses one `i-j i-j ...` line; externally produced links get
    /// confidence 1.
    pub fn parse_pharaoh(line: &str) -> Result<Self> {
        let mut links = Vec::new();
        for item in line.split_whitespace() {
            let (i, j) = item
                .split_once('-')
                .ok_or_else(|| Error::InvalidInput(format!("bad link {item:?}")))?;
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::InvalidInput(format!("bad link {item:?}: {e}")))
            };
            links.push(Link {
                source: parse(i)?,
                target: parse(j)?,
                confidence: 1.0,
            });
        }
        Ok(AlignmentTable::new(links))
    }

    fn check_bounds(&self, source_len: usize, target_len: usize) -> Result<()> {
        match self
            .links
            .iter()
            .find(|l| l.source >= source_len || l.target >= target_len)
        {
            Some(l) => Err(Error::InvalidInput(format!(
                "link {}-{} out of bounds for {source_len}x{target_len}",
                l.source, l.target
            ))),
            None => Ok(()),
        }
    }
}

pub trait Aligner: Send + Sync {
    fn align(&self, source: &[String], target: &[String]) -> Result<AlignmentTable>;
}

/// `p(target | source)` for every co-occurring word pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LexiconModel {
    probs: HashMap<String, HashMap<String, f64>>,
    pub iterations: usize,
    pub corpus_size: usize,
}

impl LexiconModel {
    pub fn prob(&self, target: &str, source: &str) -> f64 {
        self.probs
            .get(source)
            .and_then(|m| m.get(target))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn source_vocab_len(&self) -> usize {
        self.probs.len()
    }

    /// Largest `|sum_t p(t|s) - 1|` over source words.
    pub fn max_normalization_drift(&self) -> f64 {
        self.probs
            .values()
            .map(|m| (m.values().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// TSV `source \t target \t probability`, sorted, after two metadata
    /// comment lines.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# iterations={}\n# corpus_size={}\n",
            self.iterations, self.corpus_size
        );
        let sorted: BTreeMap<_, BTreeMap<_, _>> = self
            .probs
            .iter()
            .map(|(s, m)| (s, m.iter().collect()))
            .collect();
        for (s, m) in sorted {
            for (t, p) in m {
                let _ = writeln!(out, "{s}\t{t}\t{p}");
            }
        }
        out
    }

    pub fn parse_tsv(text: &str, source: &Path) -> Result<Self> {
        let mut model = LexiconModel::default();
        for (i, line) in text.lines().enumerate() {
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.trim();
                if let Some(v) = meta.strip_prefix("iterations=") {
                    model.iterations = v.parse().unwrap_or(0);
                } else if let Some(v) = meta.strip_prefix("corpus_size=") {
                    model.corpus_size = v.parse().unwrap_or(0);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(source, i + 1, "expected 3 tab-separated fields"));
            }
            let p: f64 = fields[2]
                .parse()
                .map_err(|e| Error::parse(source, i + 1, format!("bad probability: {e}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::parse(source, i + 1, "probability outside [0, 1]"));
            }
            model
                .probs
                .entry(fields[0].to_string())
                .or_default()
                .insert(fields[1].to_string(), p);
        }
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Runs `iterations` EM rounds; `observe` sees the model after each round.
pub fn train_lexicon_observed<F>(
    corpus: &[(Vec<String>, Vec<String>)],
    iterations: usize,
    mut observe: F,
) -> Result<LexiconModel>
where
    F: FnMut(usize, &LexiconModel),
{
    if corpus.is_empty() {
        return Err(Error::Training("empty parallel corpus".into()));
    }
    if iterations == 0 {
        return Err(Error::Training("iterations must be at least 1".into()));
    }
    let mut source_ids: HashMap<&str, usize> = HashMap::new();
    let mut target_ids: HashMap<&str, usize> = HashMap::new();
    let mut source_words = Vec::new();
    let mut target_words = Vec::new();
    let mut sentences: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(corpus.len());
    for (src, tgt) in corpus {
        let s: Vec<usize> = src
            .iter()
            .map(|w| {
                let next = source_words.len();
                *source_ids.entry(w.as_str()).or_insert_with(|| {
                    source_words.push(w.clone());
                    next
                })
            })
            .collect();
        let t: Vec<usize> = tgt
            .iter()
            .map(|w| {
                let next = target_words.len();
                *target_ids.entry(w.as_str()).or_insert_with(|| {
                    target_words.push(w.clone());
                    next
                })
            })
            .collect();
        sentences.push((s, t));
    }

    // t(f|e), keyed by (e, f); starts uniform.
    let uniform = 1.0 / target_words.len().max(1) as f64;
    let mut trans: HashMap<(usize, usize), f64> = HashMap::new();
    for (s, t) in &sentences {
        for &e in s {
            for &f in t {
                trans.insert((e, f), uniform);
            }
        }
    }

    let mut model = LexiconModel {
        corpus_size: corpus.len(),
        ..Default::default()
    };
    for iter in 1..=iterations {
        let mut counts: HashMap<(usize, usize), f64> = HashMap::with_capacity(trans.len());
        let mut totals = vec![0.0f64; source_words.len()];
        for (s, t) in &sentences {
            for &f in t {
                let denom: f64 = s.iter().map(|&e| trans[&(e, f)]).sum();
                if denom == 0.0 {
                    continue;
                }
                for &e in s {
                    let c = trans[&(e, f)] / denom;
                    *counts.entry((e, f)).or_insert(0.0) += c;
                    totals[e] += c;
                }
            }
        }
        for (&(e, f), p) in trans.iter_mut() {
            let c = counts.get(&(e, f)).copied().unwrap_or(0.0);
            *p = if totals[e] > 0.0 { c / totals[e] } else { 0.0 };
        }
        model.iterations = iter;
        model.probs = HashMap::with_capacity(source_words.len());
        for (&(e, f), &p) in &trans {
            model
                .probs
                .entry(source_words[e].clone())
                .or_default()
                .insert(target_words[f].clone(), p);
        }
        observe(iter, &model);
    }
    Ok(model)
}

pub fn train_lexicon(corpus: &[(Vec<String>, Vec<String>)], iterations: usize) -> Result<LexiconModel> {
    train_lexicon_observed(corpus, iterations, |_, _| {})
}

/// Links each source word to its most probable target word when that
/// probability reaches `floor`. Ties prefer the link closest to the diagonal,
/// then the leftmost target.
#[derive(Debug, Clone)]
pub struct LexiconAligner {
    pub model: LexiconModel,
    pub floor: f64,
}

impl LexiconAligner {
    pub fn new(model: LexiconModel) -> Self {
        LexiconAligner {
            model,
            floor: DEFAULT_ALIGNMENT_FLOOR,
        }
    }
}

pub fn align(
    source: &[String],
    target: &[String],
    model: &LexiconModel,
    floor: f64,
) -> Result<AlignmentTable> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::InvalidInput("cannot align an empty sequence".into()));
    }
    let (ls, lt) = (source.len() as f64, target.len() as f64);
    let mut links = Vec::new();
    for (i, s) in source.iter().enumerate() {
        let mut best: Option<(f64, f64, usize)> = None;
        for (j, t) in target.iter().enumerate() {
            let p = model.prob(t, s);
            if p < floor || p == 0.0 {
                continue;
            }
            let diag = (i as f64 / ls - j as f64 / lt).abs();
            let better = match best {
                None => true,
                Some((bp, bd, _)) => p > bp || (p == bp && diag < bd),
            };
            if better {
                best = Some((p, diag, j));
            }
        }
        if let Some((p, _, j)) = best {
            links.push(Link {
                source: i,
                target: j,
                confidence: p,
            });
        }
    }
    Ok(AlignmentTable::new(links))
}

impl Aligner for LexiconAligner {
    fn align(&self, source: &[String], target: &[String]) -> Result<AlignmentTable> {
        align(source, target, &self.model, self.floor)
    }
}

/// Alignments supplied from outside, looked up by the exact token sequences.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedAligner {
    tables: HashMap<(Vec<String>, Vec<String>), AlignmentTable>,
}

impl PrecomputedAligner {
    pub fn insert(&mut self, source: Vec<String>, target: Vec<String>, table: AlignmentTable) -> Result<()> {
        table.check_bounds(source.len(), target.len())?;
        self.tables.insert((source, target), table);
        Ok(())
    }

    /// Pairs `pairs[k]` with line `k` of an `i-j` alignment file.
    pub fn from_lines(pairs: Vec<(Vec<String>, Vec<String>)>, alignment_text: &str) -> Result<Self> {
        let lines: Vec<&str> = alignment_text.lines().collect();
        if lines.len() != pairs.len() {
            return Err(Error::InvalidInput(format!(
                "{} sentence pairs but {} alignment lines",
                pairs.len(),
                lines.len()
            )));
        }
        let mut out = PrecomputedAligner::default();
        for ((s, t), line) in pairs.into_iter().zip(lines) {
            let table = AlignmentTable::parse_pharaoh(line)?;
            out.insert(s, t, table)?;
        }
        Ok(out)
    }
}

impl Aligner for PrecomputedAligner {
    fn align(&self, source: &[String], target: &[String]) -> Result<AlignmentTable> {
        Ok(self
            .tables
            .get(&(source.to_vec(), target.to_vec()))
            .cloned()
            .unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedSpan {
    /// Half-open token range in the target.
    pub start: usize,
    pub end: usize,
    pub tokens: Vec<String>,
    /// The linked targets were not contiguous; the span covers min..=max.
    pub low_confidence: bool,
}

/// The target span linked to source position `index`, if any.
pub fn get_translated_word(
    index: usize,
    table: &AlignmentTable,
    target: &[String],
) -> Option<TranslatedSpan> {
    let mut linked: Vec<usize> = table.targets_of(index).filter(|&j| j < target.len()).collect();
    if linked.is_empty() {
        return None;
    }
    linked.sort_unstable();
    linked.dedup();
    let (lo, hi) = (linked[0], linked[linked.len() - 1]);
    Some(TranslatedSpan {
        start: lo,
        end: hi + 1,
        tokens: target[lo..=hi].to_vec(),
        low_confidence: linked.len() != hi - lo + 1,
    })
}
