//! Token-sequence similarity metrics: LCS, edit distance, tf-idf cosine and
//! bidirectional BLEU. Every metric returns a value in `[0, 1]`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "LCS")]
    Lcs,
    #[serde(rename = "ED")]
    Ed,
    #[serde(rename = "TFIDF")]
    TfIdf,
    #[serde(rename = "BLEU")]
    Bleu,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Lcs, Metric::Ed, Metric::TfIdf, Metric::Bleu];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Lcs => "LCS",
            Metric::Ed => "ED",
            Metric::TfIdf => "TFIDF",
            Metric::Bleu => "BLEU",
        }
    }

    /// Parses `all` or a comma-separated list of metric names.
    pub fn parse_list(s: &str) -> Result<Vec<Metric>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Metric::ALL.to_vec());
        }
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m: Metric = part.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("empty metric list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace(['-', '_'], "").as_str() {
            "LCS" => Ok(Metric::Lcs),
            "ED" => Ok(Metric::Ed),
            "TFIDF" => Ok(Metric::TfIdf),
            "BLEU" => Ok(Metric::Bleu),
            _ => Err(Error::Config(format!("unknown metric {s:?}"))),
        }
    }
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance over tokens with unit costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `len(LCS) / max(len)`; two empty sequences score 1.
pub fn lcs_metric<T: PartialEq>(t1: &[T], t2: &[T]) -> f64 {
    let longest = t1.len().max(t2.len());
    if longest == 0 {
        return 1.0;
    }
    lcs_len(t1, t2) as f64 / longest as f64
}

/// `1 - ED / max(len)`; two empty sequences score 1.
pub fn ed_metric<T: PartialEq>(t1: &[T], t2: &[T]) -> f64 {
    let longest = t1.len().max(t2.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - edit_distance(t1, t2) as f64 / longest as f64
}

/// Token multiplicities, ordered by token.
pub fn bag_of_words<S: AsRef<str>>(tokens: &[S]) -> BTreeMap<String, usize> {
    let mut bag = BTreeMap::new();
    for t in tokens {
        *bag.entry(t.as_ref().to_string()).or_insert(0) += 1;
    }
    bag
}

/// Inverse document frequencies over a sentence corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdfTable {
    doc_freq: HashMap<String, usize>,
    corpus_size: usize,
}

impl IdfTable {
    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn doc_freq(&self, token: &str) -> usize {
        self.doc_freq.get(token).copied().unwrap_or(0)
    }

    /// `ln((|C| + 1) / (f_w + 1))`.
    pub fn weight(&self, token: &str) -> f64 {
        let c = self.corpus_size as f64;
        let f = self.doc_freq(token) as f64;
        ((c + 1.0) / (f + 1.0)).ln()
    }

    /// Every weight is zero when the corpus is empty.
    pub fn is_degenerate(&self) -> bool {
        self.corpus_size == 0
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("#corpus_size\t{}\n", self.corpus_size);
        let sorted: BTreeMap<_, _> = self.doc_freq.iter().collect();
        for (tok, f) in sorted {
            let _ = writeln!(out, "{tok}\t{f}");
        }
        out
    }

    pub fn parse_tsv(text: &str, source: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let corpus_size = match lines.next() {
            Some((_, header)) => header
                .strip_prefix("#corpus_size\t")
                .and_then(|n| n.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::parse(source, 1, "expected `#corpus_size\\t<n>` header"))?,
            None => return Err(Error::parse(source, 1, "empty idf file")),
        };
        let mut doc_freq = HashMap::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (tok, f) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::parse(source, i + 1, "expected `token\\tdoc_freq`"))?;
            let f: usize = f
                .trim()
                .parse()
                .map_err(|e| Error::parse(source, i + 1, format!("bad frequency: {e}")))?;
            if f > corpus_size {
                return Err(Error::parse(source, i + 1, "frequency exceeds corpus size"));
            }
            doc_freq.insert(tok.to_string(), f);
        }
        Ok(IdfTable {
            doc_freq,
            corpus_size,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Document frequency counts each sentence at most once per token.
pub fn build_idf<I, S>(sentences: I) -> IdfTable
where
    I: IntoIterator<Item = Vec<S>>,
    S: AsRef<str>,
{
    let mut table = IdfTable::default();
    for sentence in sentences {
        table.corpus_size += 1;
        let unique: HashSet<&str> = sentence.iter().map(AsRef::as_ref).collect();
        for tok in unique {
            *table.doc_freq.entry(tok.to_string()).or_insert(0) += 1;
        }
    }
    if table.is_degenerate() {
        log::warn!("idf table built from an empty corpus; all weights are zero");
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfIdfScore {
    pub value: f64,
    /// Set when either weighted vector was all zeros; the value is then 0.
    pub degenerate: bool,
}

fn weighted_cosine<S, W>(t1: &[S], t2: &[S], weight: W) -> TfIdfScore
where
    S: AsRef<str>,
    W: Fn(&str) -> f64,
{
    let (bag1, bag2) = (bag_of_words(t1), bag_of_words(t2));
    let vocab: std::collections::BTreeSet<&String> = bag1.keys().chain(bag2.keys()).collect();
    let (mut dot, mut n1, mut n2) = (0.0, 0.0, 0.0);
    for w in vocab {
        let wt = weight(w);
        let x = bag1.get(w).copied().unwrap_or(0) as f64 * wt;
        let y = bag2.get(w).copied().unwrap_or(0) as f64 * wt;
        dot += x * y;
        n1 += x * x;
        n2 += y * y;
    }
    if n1 == 0.0 || n2 == 0.0 {
        return TfIdfScore {
            value: 0.0,
            degenerate: true,
        };
    }
    TfIdfScore {
        value: (dot / (n1 * n2).sqrt()).clamp(0.0, 1.0),
        degenerate: false,
    }
}

/// Cosine of idf-weighted bag-of-words vectors.
pub fn tfidf_metric<S: AsRef<str>>(t1: &[S], t2: &[S], idf: &IdfTable) -> TfIdfScore {
    let score = weighted_cosine(t1, t2, |w| idf.weight(w));
    if score.degenerate {
        log::warn!("tf-idf: zero weighted vector, scoring 0");
    }
    score
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for w in tokens.windows(n) {
        let key: Vec<&str> = w.iter().map(AsRef::as_ref).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram matches of `candidate` against `reference`, and the number
/// of candidate n-grams.
pub fn modified_precision<S: AsRef<str>>(reference: &[S], candidate: &[S], n: usize) -> (usize, usize) {
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let total = cand.values().sum();
    let matched = cand
        .iter()
        .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
        .sum();
    (matched, total)
}

pub const BLEU_MAX_ORDER: usize = 4;

/// BLEU of `candidate` against `reference` with uniform weights over orders
/// 1..=4 and the brevity penalty. An order absent from both sides is left
/// out and the weights renormalised; any zero precision scores 0.
pub fn bleu_directional<S: AsRef<str>>(reference: &[S], candidate: &[S]) -> f64 {
    if reference.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=BLEU_MAX_ORDER {
        if candidate.len() < n && reference.len() < n {
            continue;
        }
        let (matched, total) = modified_precision(reference, candidate, n);
        if matched == 0 || total == 0 {
            return 0.0;
        }
        log_sum += (matched as f64 / total as f64).ln();
        orders += 1;
    }
    let (c, r) = (candidate.len() as f64, reference.len() as f64);
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    (bp * (log_sum / orders as f64).exp()).clamp(0.0, 1.0)
}

/// The higher of the two directional BLEU scores.
pub fn bleu_metric<S: AsRef<str>>(t1: &[S], t2: &[S]) -> Result<f64> {
    if t1.is_empty() || t2.is_empty() {
        return Err(Error::InvalidInput("BLEU needs two non-empty sequences".into()));
    }
    Ok(bleu_directional(t1, t2).max(bleu_directional(t2, t1)))
}

/// A metric bound to its weighting data. Scoring is total: inputs the raw
/// metric refuses (empty sequences for BLEU/tf-idf, zero weighted vectors)
/// score 0.
#[derive(Debug, Clone, Copy)]
pub struct Scorer<'a> {
    pub metric: Metric,
    /// Idf weights for tf-idf; `None` weighs every token 1.
    pub idf: Option<&'a IdfTable>,
}

impl<'a> Scorer<'a> {
    pub fn new(metric: Metric, idf: Option<&'a IdfTable>) -> Self {
        Scorer { metric, idf }
    }

    pub fn score<S: AsRef<str>>(&self, a: &[S], b: &[S]) -> f64 {
        match self.metric {
            Metric::Lcs => lcs_metric(&as_strs(a), &as_strs(b)),
            Metric::Ed => ed_metric(&as_strs(a), &as_strs(b)),
            Metric::TfIdf => match self.idf {
                Some(idf) => tfidf_metric(a, b, idf).value,
                None => weighted_cosine(a, b, |_| 1.0).value,
            },
            Metric::Bleu => bleu_metric(a, b).unwrap_or(0.0),
        }
    }
}

fn as_strs<S: AsRef<str>>(v: &[S]) -> Vec<&str> {
    v.iter().map(AsRef::as_ref).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_len(&chars("ABCDGH"), &chars("AEDFHR")), 3);
        assert_eq!(lcs_metric(&chars("ABCDGH"), &chars("AEDFHR")), 0.5);
        assert_eq!(lcs_metric(&toks("a b c"), &toks("a b c")), 1.0);
        assert_eq!(lcs_metric(&toks("a b"), &toks("c d e")), 0.0);
        assert_eq!(lcs_metric::<String>(&[], &[]), 1.0);
    }

    #[test]
    fn ed_examples() {
        assert_eq!(ed_metric(&toks("A B C"), &toks("A B C")), 1.0);
        assert!((ed_metric(&toks("A B C"), &toks("A X C")) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(edit_distance(&toks("A"), &toks("B C")), 2);
        assert_eq!(ed_metric(&toks("A"), &toks("B C")), 0.0);
        assert_eq!(ed_metric::<String>(&[], &[]), 1.0);
        assert_eq!(edit_distance(&chars("kitten"), &chars("sitting")), 3);
    }

    #[test]
    fn bag_of_words_example() {
        let bag = bag_of_words(&toks("A B C A"));
        let v: Vec<_> = bag.into_iter().collect();
        assert_eq!(v, vec![("A".into(), 2), ("B".into(), 1), ("C".into(), 1)]);
    }

    #[test]
    fn idf_weights() {
        let idf = build_idf(vec![toks("A B"), toks("A")]);
        assert_eq!(idf.corpus_size(), 2);
        assert_eq!(idf.weight("A"), 0.0);
        assert!((idf.weight("B") - (3.0f64 / 2.0).ln()).abs() < 1e-15);
        assert!((idf.weight("Z") - 3.0f64.ln()).abs() < 1e-15);

        let empty = build_idf(Vec::<Vec<String>>::new());
        assert!(empty.is_degenerate());
        assert_eq!(empty.weight("anything"), 0.0);
    }

    #[test]
    fn idf_tsv_round_trip() {
        let idf = build_idf(vec![toks("A B"), toks("A"), toks("C\u{3000}")]);
        let text = idf.to_tsv();
        assert!(text.starts_with("#corpus_size\t3\n"));
        let back = IdfTable::parse_tsv(&text, Path::new("idf.tsv")).unwrap();
        assert_eq!(back, idf);
        assert!(IdfTable::parse_tsv("A\t1\n", Path::new("x")).is_err());
        assert!(IdfTable::parse_tsv("#corpus_size\t1\nA\t2\n", Path::new("x")).is_err());
    }

    #[test]
    fn tfidf_examples() {
        let idf = build_idf(vec![toks("A B"), toks("C")]);
        assert!((tfidf_metric(&toks("A B C"), &toks("A B C"), &idf).value - 1.0).abs() < 1e-12);
        let uniform = Scorer::new(Metric::TfIdf, None);
        assert_eq!(uniform.score(&toks("A A"), &toks("B")), 0.0);

        // Every token appears in every sentence: zero weights.
        let all = build_idf(vec![toks("A")]);
        let s = tfidf_metric(&toks("A"), &toks("A"), &all);
        assert!(s.degenerate);
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn bleu_precision_example() {
        assert_eq!(modified_precision(&toks("A A B C"), &toks("A B B C"), 2), (2, 3));
    }

    #[test]
    fn bleu_examples() {
        assert_eq!(bleu_metric(&toks("a b c d e"), &toks("a b c d e")).unwrap(), 1.0);
        assert_eq!(bleu_metric(&toks("a b"), &toks("a b")).unwrap(), 1.0);
        // All unigrams match, but the 3-token candidate has no 4-gram while the
        // 6-token reference does.
        assert_eq!(bleu_directional(&toks("a b c a b c"), &toks("a b c")), 0.0);
        assert!(bleu_metric(&toks("a"), &[] as &[String]).is_err());
    }

    #[test]
    fn bleu_matches_hand_computation() {
        // ref "a b c d e f", cand "a b c d e": p1..p4 = 1, BP = exp(1 - 6/5).
        let got = bleu_directional(&toks("a b c d e f"), &toks("a b c d e"));
        assert!((got - (-0.2f64).exp()).abs() < 1e-12);
        // Longer candidate, no brevity penalty: p1 = 5/6, p2 = 4/5, p3 = 3/4, p4 = 2/3.
        let got = bleu_directional(&toks("a b c d e"), &toks("a b c d e f"));
        let want = ((5.0f64 / 6.0).ln() + (0.8f64).ln() + (0.75f64).ln() + (2.0f64 / 3.0).ln()) / 4.0;
        assert!((got - want.exp()).abs() < 1e-12);
    }

    #[test]
    fn metric_names() {
        assert_eq!("tf-idf".parse::<Metric>().unwrap(), Metric::TfIdf);
        assert_eq!(Metric::parse_list("all").unwrap().len(), 4);
        assert_eq!(Metric::parse_list("LCS, bleu").unwrap(), vec![Metric::Lcs, Metric::Bleu]);
        assert!(Metric::parse_list("LCS,foo").is_err());
        assert_eq!(serde_json::to_string(&Metric::TfIdf).unwrap(), "\"TFIDF\"");
    }
}
