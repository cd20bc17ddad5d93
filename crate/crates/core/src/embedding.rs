//! Word-embedding ingestion and the context-similarity corpus.
//!
//! Two independently trained embedding models are intersected: a word pair
//! is context-similar when its cosine similarity meets the threshold under
//! both models.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WordVector {
    pub word: String,
    pub vector: Vec<f64>,
}

impl WordVector {
    pub fn new(word: impl Into<String>, vector: Vec<f64>) -> Self {
        WordVector {
            word: word.into(),
            vector,
        }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.vector)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cosine_with_norms(a: &[f64], b: &[f64], norm_a: f64, norm_b: f64) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (norm_a * norm_b)).clamp(-1.0, 1.0)
}

/// Cosine similarity of two word vectors, in `[-1, 1]`.
pub fn cosine_similarity(a: &WordVector, b: &WordVector) -> Result<f64> {
    if a.vector.len() != b.vector.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} has {}, {} has {}",
            a.word,
            a.vector.len(),
            b.word,
            b.vector.len()
        )));
    }
    let (na, nb) = (a.norm(), b.norm());
    for (w, n) in [(&a.word, na), (&b.word, nb)] {
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateVector(format!("vector for {w:?} has norm {n}")));
        }
    }
    Ok(cosine_with_norms(&a.vector, &b.vector, na, nb))
}

/// A parsed embedding model. Tokens map to vectors of one fixed dimension.
#[derive(Debug, Clone, Default)]
pub struct Embeddings {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl Embeddings {
    /// Parses the text layout `token c1 c2 ... cd`, one token per line. The
    /// dimension comes from the first line; a repeated token keeps its last
    /// vector.
    pub fn parse<R: Read>(reader: R, source: &Path, lowercase: bool) -> Result<Self> {
        let mut dim = None;
        let mut vectors = HashMap::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::io(source, e))?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let vector = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(source, lineno, format!("bad component: {e}")))?;
            if vector.is_empty() {
                return Err(Error::parse(source, lineno, "token without components"));
            }
            match dim {
                None => dim = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(Error::parse(
                        source,
                        lineno,
                        format!("expected {d} components, found {}", vector.len()),
                    ));
                }
                Some(_) => {}
            }
            let token = if lowercase {
                token.to_lowercase()
            } else {
                token.to_string()
            };
            vectors.insert(token, vector);
        }
        Ok(Embeddings {
            dim: dim.unwrap_or(0),
            vectors,
        })
    }

    pub fn load(path: &Path, lowercase: bool) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(file, path, lowercase)
    }

    pub fn from_vectors<I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = WordVector>,
    {
        let mut out = Embeddings::default();
        for wv in vectors {
            if out.vectors.is_empty() {
                out.dim = wv.vector.len();
            } else if wv.vector.len() != out.dim {
                return Err(Error::InvalidInput(format!(
                    "{} has dimension {}, expected {}",
                    wv.word,
                    wv.vector.len(),
                    out.dim
                )));
            }
            out.vectors.insert(wv.word, wv.vector);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<WordVector> {
        self.vectors
            .get(word)
            .map(|v| WordVector::new(word, v.clone()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarPair {
    pub word_a: String,
    pub word_b: String,
    pub sim_model1: f64,
    pub sim_model2: f64,
}

impl SimilarPair {
    pub fn min_sim(&self) -> f64 {
        self.sim_model1.min(self.sim_model2)
    }
}

/// Context-similar word pairs. Pairs are unordered: `word_a < word_b`, and
/// either word retrieves the pair.
#[derive(Debug, Clone, Default)]
pub struct SimilarityCorpus {
    threshold: f64,
    pairs: Vec<SimilarPair>,
    index: HashMap<String, Vec<usize>>,
}

impl SimilarityCorpus {
    /// Builds a corpus from explicit pairs. Pair orientation is normalised,
    /// duplicates keep the last occurrence, and self-pairs are rejected.
    pub fn from_pairs<I>(pairs: I, threshold: f64) -> Result<Self>
    where
        I: IntoIterator<Item = SimilarPair>,
    {
        let mut by_key: BTreeMap<(String, String), SimilarPair> = BTreeMap::new();
        for mut p in pairs {
            if p.word_a == p.word_b {
                return Err(Error::InvalidInput(format!("self-pair ({}, {})", p.word_a, p.word_b)));
            }
            if p.word_a > p.word_b {
                std::mem::swap(&mut p.word_a, &mut p.word_b);
            }
            if p.sim_model1 < threshold || p.sim_model2 < threshold {
                return Err(Error::InvalidInput(format!(
                    "pair ({}, {}) below threshold {threshold}",
                    p.word_a, p.word_b
                )));
            }
            by_key.insert((p.word_a.clone(), p.word_b.clone()), p);
        }
        let pairs: Vec<SimilarPair> = by_key.into_values().collect();
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in pairs.iter().enumerate() {
            index.entry(p.word_a.clone()).or_default().push(i);
            index.entry(p.word_b.clone()).or_default().push(i);
        }
        Ok(SimilarityCorpus {
            threshold,
            pairs,
            index,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Pairs sorted by `(word_a, word_b)`.
    pub fn pairs(&self) -> &[SimilarPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Partners of `word` with their min similarity, best first; ties go to
    /// the lexicographically smaller partner.
    pub fn lookup(&self, word: &str) -> Vec<(String, f64)> {
        let Some(ids) = self.index.get(word) else {
            return Vec::new();
        };
        let mut out: Vec<(String, f64)> = ids
            .iter()
            .map(|&i| {
                let p = &self.pairs[i];
                let other = if p.word_a == word { &p.word_b } else { &p.word_a };
                (other.clone(), p.min_sim())
            })
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// TSV `word_a \t word_b \t sim1 \t sim2`, preceded by a threshold comment.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# threshold={}\n", self.threshold);
        for p in &self.pairs {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", p.word_a, p.word_b, p.sim_model1, p.sim_model2);
        }
        out
    }

    pub fn parse_tsv(text: &str, source: &Path) -> Result<Self> {
        let mut threshold = None;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("threshold=") {
                    threshold = Some(v.trim().parse::<f64>().map_err(|e| {
                        Error::parse(source, lineno, format!("bad threshold: {e}"))
                    })?);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(source, lineno, "expected 4 tab-separated fields"));
            }
            let sim = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(source, lineno, format!("bad similarity: {e}")))
            };
            pairs.push(SimilarPair {
                word_a: fields[0].to_string(),
                word_b: fields[1].to_string(),
                sim_model1: sim(fields[2])?,
                sim_model2: sim(fields[3])?,
            });
        }
        let threshold = threshold.unwrap_or_else(|| {
            pairs
                .iter()
                .map(SimilarPair::min_sim)
                .fold(f64::INFINITY, f64::min)
                .min(1.0)
        });
        let threshold = if threshold.is_finite() { threshold } else { 1.0 };
        Self::from_pairs(pairs, threshold).map_err(|e| Error::parse(source, 0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// A word present in both models: vectors and norms from each.
type SharedWord<'a> = (&'a str, &'a [f64], f64, &'a [f64], f64);

/// Intersects two models and keeps every unordered pair of shared words
/// whose similarity meets `threshold` under both.
pub fn build_corpus(
    model1: &Embeddings,
    model2: &Embeddings,
    threshold: f64,
) -> Result<SimilarityCorpus> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidInput(format!("threshold {threshold} outside (0, 1]")));
    }
    // Shared vocabulary, sorted, zero-norm vectors excluded.
    let mut shared: Vec<SharedWord<'_>> = model1
        .vectors
        .iter()
        .filter_map(|(w, v1)| {
            let v2 = model2.vectors.get(w)?;
            let (n1, n2) = (norm(v1), norm(v2));
            if n1 > 0.0 && n2 > 0.0 && n1.is_finite() && n2.is_finite() {
                Some((w.as_str(), v1.as_slice(), n1, v2.as_slice(), n2))
            } else {
                log::debug!("skipping zero-norm vector for {w:?}");
                None
            }
        })
        .collect();
    shared.sort_by(|a, b| a.0.cmp(b.0));

    let pairs: Vec<SimilarPair> = (0..shared.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (wa, a1, na1, a2, na2) = shared[i];
            let shared = &shared;
            (i + 1..shared.len()).filter_map(move |j| {
                let (wb, b1, nb1, b2, nb2) = shared[j];
                let s1 = cosine_with_norms(a1, b1, na1, nb1);
                if s1 < threshold {
                    return None;
                }
                let s2 = cosine_with_norms(a2, b2, na2, nb2);
                (s2 >= threshold).then(|| SimilarPair {
                    word_a: wa.to_string(),
                    word_b: wb.to_string(),
                    sim_model1: s1,
                    sim_model2: s2,
                })
            })
        })
        .collect();
    SimilarityCorpus::from_pairs(pairs, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(w: &str, v: &[f64]) -> WordVector {
        WordVector::new(w, v.to_vec())
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&wv("a", &[1.0, 0.0]), &wv("b", &[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&wv("a", &[1.0, 0.0]), &wv("b", &[0.0, 1.0])).unwrap(), 0.0);
        // 32 / (sqrt(14) * sqrt(77))
        let s = cosine_similarity(&wv("a", &[1.0, 2.0, 3.0]), &wv("b", &[4.0, 5.0, 6.0])).unwrap();
        assert!((s - 0.974_631_846).abs() < 1e-9, "{s}");
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(
            cosine_similarity(&wv("a", &[1.0]), &wv("b", &[1.0, 2.0])),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cosine_similarity(&wv("a", &[0.0, 0.0]), &wv("b", &[1.0, 2.0])),
            Err(Error::DegenerateVector(_))
        ));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "cat 1 0\ndog 1 x\n";
        let err = Embeddings::parse(text.as_bytes(), Path::new("m.txt"), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let text = "cat 1 0\n\ndog 1 0 3\n";
        let err = Embeddings::parse(text.as_bytes(), Path::new("m.txt"), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn parse_last_duplicate_wins_and_lowercase_folds() {
        let text = "Cat 1 0\ncat 0 1\n";
        let e = Embeddings::parse(text.as_bytes(), Path::new("m"), false).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.dim(), 2);
        let e = Embeddings::parse(text.as_bytes(), Path::new("m"), true).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.get("cat").unwrap().vector, vec![0.0, 1.0]);
    }

    fn toy_models() -> (Embeddings, Embeddings) {
        // model1: cat~dog 0.95-ish, cat~car 0.95-ish; model2: cat~dog high, cat~car low.
        let m1 = "cat 1 0.1\ndog 1 0.42\ncar 1 -0.22\nzero 0 0\n";
        let m2 = "cat 1 0\ndog 1 0.4\ncar 0.4 1\nbus 1 1\n";
        (
            Embeddings::parse(m1.as_bytes(), Path::new("m1"), false).unwrap(),
            Embeddings::parse(m2.as_bytes(), Path::new("m2"), false).unwrap(),
        )
    }

    #[test]
    fn corpus_keeps_pairs_similar_in_both_models() {
        let (m1, m2) = toy_models();
        let s = |m: &Embeddings, a: &str, b: &str| {
            cosine_similarity(&m.get(a).unwrap(), &m.get(b).unwrap()).unwrap()
        };
        assert!(s(&m1, "cat", "dog") >= 0.9 && s(&m2, "cat", "dog") >= 0.9);
        assert!(s(&m1, "cat", "car") >= 0.9 && s(&m2, "cat", "car") < 0.9);

        let corpus = build_corpus(&m1, &m2, 0.9).unwrap();
        let words: Vec<_> = corpus
            .pairs()
            .iter()
            .map(|p| (p.word_a.as_str(), p.word_b.as_str()))
            .collect();
        assert_eq!(words, vec![("cat", "dog")]);
        assert_eq!(corpus.lookup("dog")[0].0, "cat");
        assert!(corpus.lookup("fish").is_empty());
    }

    #[test]
    fn threshold_one_without_duplicate_directions_is_empty() {
        let (m1, m2) = toy_models();
        assert!(build_corpus(&m1, &m2, 1.0).unwrap().is_empty());
        assert!(build_corpus(&m1, &m2, 0.0).is_err());
    }

    #[test]
    fn disjoint_vocabularies_give_empty_corpus() {
        let m1 = Embeddings::parse("a 1 0\n".as_bytes(), Path::new("m1"), false).unwrap();
        let m2 = Embeddings::parse("b 1 0\n".as_bytes(), Path::new("m2"), false).unwrap();
        assert!(build_corpus(&m1, &m2, 0.9).unwrap().is_empty());
    }

    #[test]
    fn lookup_orders_by_similarity_then_word() {
        let p = |a: &str, b: &str, s1: f64, s2: f64| SimilarPair {
            word_a: a.into(),
            word_b: b.into(),
            sim_model1: s1,
            sim_model2: s2,
        };
        let corpus = SimilarityCorpus::from_pairs(
            vec![
                p("a", "c", 0.95, 0.99),
                p("b", "a", 0.99, 0.95),
                p("a", "d", 0.97, 0.98),
            ],
            0.9,
        )
        .unwrap();
        let got: Vec<_> = corpus.lookup("a").into_iter().map(|(w, _)| w).collect();
        assert_eq!(got, vec!["d", "b", "c"]);
        assert!(SimilarityCorpus::from_pairs(vec![p("a", "a", 1.0, 1.0)], 0.9).is_err());
    }

    #[test]
    fn tsv_round_trip_is_byte_stable() {
        let (m1, m2) = toy_models();
        let corpus = build_corpus(&m1, &m2, 0.9).unwrap();
        let tsv = corpus.to_tsv();
        let back = SimilarityCorpus::parse_tsv(&tsv, Path::new("c.tsv")).unwrap();
        assert_eq!(back.to_tsv(), tsv);
        assert_eq!(back.threshold(), 0.9);
    }
}
