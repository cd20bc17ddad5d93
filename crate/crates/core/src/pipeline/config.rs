use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::mutation::FilterMode;
use crate::repair::RepairMode;

/// Where the context-similarity corpus comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    /// A saved corpus TSV.
    Saved(PathBuf),
    /// Two embedding files compared at a similarity threshold.
    Embeddings {
        model1: PathBuf,
        model2: PathBuf,
        threshold: f64,
        lowercase: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// One sentence per line.
    pub input: PathBuf,
    pub corpus: CorpusSource,
    pub profile: PathBuf,
    /// Defaults to `cache.jsonl` in the output directory.
    pub cache: Option<PathBuf>,
    pub metrics: Vec<Metric>,
    /// Defaults to the reference thresholds.
    pub thresholds: Option<PathBuf>,
    /// Defaults to document frequencies over the run's own translations.
    pub idf: Option<PathBuf>,
    /// Tab-separated source/target sentences for aligner training.
    pub parallel: Option<PathBuf>,
    /// A saved lexical model; takes precedence over `parallel`.
    pub align_model: Option<PathBuf>,
    pub align_iterations: usize,
    pub max_mutants: usize,
    pub repair_mutants: usize,
    pub repair_mode: RepairMode,
    /// Metric whose verdicts select repair targets and drive cross-reference
    /// ranking; defaults to the first selected metric.
    pub repair_metric: Option<Metric>,
    pub filter: FilterMode,
    pub out_dir: PathBuf,
    pub workers: usize,
    /// Reserved for sampling utilities; the core stages are deterministic.
    pub seed: u64,
    pub source_lexicon: Option<PathBuf>,
    pub target_lexicon: Option<PathBuf>,
    pub source_numerals: Option<PathBuf>,
    pub target_numerals: Option<PathBuf>,
}

pub const DEFAULT_MAX_MUTANTS: usize = 5;
pub const DEFAULT_REPAIR_MUTANTS: usize = 16;
pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.9;
pub const DEFAULT_ALIGN_ITERATIONS: usize = 10;

impl RunConfig {
    pub fn new(
        input: impl Into<PathBuf>,
        corpus: impl Into<PathBuf>,
        profile: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        RunConfig {
            input: input.into(),
            corpus: CorpusSource::Saved(corpus.into()),
            profile: profile.into(),
            cache: None,
            metrics: Metric::ALL.to_vec(),
            thresholds: None,
            idf: None,
            parallel: None,
            align_model: None,
            align_iterations: DEFAULT_ALIGN_ITERATIONS,
            max_mutants: DEFAULT_MAX_MUTANTS,
            repair_mutants: DEFAULT_REPAIR_MUTANTS,
            repair_mode: RepairMode::CrossReference,
            repair_metric: None,
            filter: FilterMode::Sentence,
            out_dir: out_dir.into(),
            workers: 4,
            seed: 0,
            source_lexicon: None,
            target_lexicon: None,
            source_numerals: None,
            target_numerals: None,
        }
    }

    pub fn active_repair_metric(&self) -> Metric {
        self.repair_metric.unwrap_or(self.metrics[0])
    }

    pub fn cache_path(&self) -> PathBuf {
        self.cache.clone().unwrap_or_else(|| self.out_dir.join("cache.jsonl"))
    }

    /// Parses `key = value` lines; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, source: &Path, base_dir: &Path) -> Result<Self> {
        let mut input = None;
        let mut saved_corpus = None;
        let (mut emb1, mut emb2) = (None, None);
        let mut sim_threshold = DEFAULT_SIMILARITY_THRESHOLD;
        let mut lowercase = false;
        let mut profile = None;
        let mut out_dir = None;
        let mut cfg = RunConfig::new("", "", "", "");
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, i + 1, "expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            let path = || base_dir.join(v);
            let err = |msg: String| Error::parse(source, i + 1, msg);
            let count = || -> Result<usize> {
                v.parse::<usize>()
                    .map_err(|_| err(format!("{k} must be a non-negative integer")))
            };
            match k {
                "input" => input = Some(path()),
                "similarity" => saved_corpus = Some(path()),
                "embeddings1" => emb1 = Some(path()),
                "embeddings2" => emb2 = Some(path()),
                "similarity_threshold" => {
                    sim_threshold = v.parse().map_err(|_| err("similarity_threshold must be a number".into()))?
                }
                "lowercase" => lowercase = parse_bool(v).ok_or_else(|| err("lowercase must be true or false".into()))?,
                "profile" => profile = Some(path()),
                "cache" => cfg.cache = Some(path()),
                "metrics" => cfg.metrics = Metric::parse_list(v).map_err(|e| err(e.to_string()))?,
                "thresholds" => cfg.thresholds = Some(path()),
                "idf" => cfg.idf = Some(path()),
                "parallel" => cfg.parallel = Some(path()),
                "align_model" => cfg.align_model = Some(path()),
                "align_iterations" => cfg.align_iterations = count()?,
                "max_mutants" => cfg.max_mutants = count()?,
                "repair_mutants" => cfg.repair_mutants = count()?,
                "repair_mode" => cfg.repair_mode = v.parse().map_err(|e: Error| err(e.to_string()))?,
                "repair_metric" => cfg.repair_metric = Some(v.parse().map_err(|e: Error| err(e.to_string()))?),
                "filter" => cfg.filter = v.parse().map_err(|e: Error| err(e.to_string()))?,
                "out" => out_dir = Some(path()),
                "workers" => cfg.workers = count()?,
                "seed" => cfg.seed = v.parse().map_err(|_| err("seed must be an integer".into()))?,
                "source_lexicon" => cfg.source_lexicon = Some(path()),
                "target_lexicon" => cfg.target_lexicon = Some(path()),
                "source_numerals" => cfg.source_numerals = Some(path()),
                "target_numerals" => cfg.target_numerals = Some(path()),
                _ => return Err(err(format!("unknown key {k:?}"))),
            }
        }
        let missing = |key: &str| Error::Config(format!("{}: {key} is required", source.display()));
        cfg.input = input.ok_or_else(|| missing("input"))?;
        cfg.profile = profile.ok_or_else(|| missing("profile"))?;
        cfg.out_dir = out_dir.ok_or_else(|| missing("out"))?;
        cfg.corpus = match (saved_corpus, emb1, emb2) {
            (Some(p), None, None) => CorpusSource::Saved(p),
            (None, Some(model1), Some(model2)) => CorpusSource::Embeddings {
                model1,
                model2,
                threshold: sim_threshold,
                lowercase,
            },
            _ => {
                return Err(Error::Config(format!(
                    "{}: give either similarity or both embeddings1 and embeddings2",
                    source.display()
                )))
            }
        };
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, path, &base)
    }

    /// Checks values and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::Config("at least one metric is required".into()));
        }
        if self.max_mutants == 0 || self.repair_mutants == 0 {
            return Err(Error::Config("mutant budgets must be at least 1".into()));
        }
        if self.align_iterations == 0 {
            return Err(Error::Config("align_iterations must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let mut required: Vec<(&str, &Path)> = vec![("input", &self.input), ("profile", &self.profile)];
        match &self.corpus {
            CorpusSource::Saved(p) => required.push(("similarity", p)),
            CorpusSource::Embeddings {
                model1,
                model2,
                threshold,
                ..
            } => {
                if !(*threshold > 0.0 && *threshold <= 1.0) {
                    return Err(Error::Config("similarity_threshold must be in (0, 1]".into()));
                }
                required.push(("embeddings1", model1));
                required.push(("embeddings2", model2));
            }
        }
        let optional = [
            ("thresholds", &self.thresholds),
            ("idf", &self.idf),
            ("parallel", &self.parallel),
            ("align_model", &self.align_model),
            ("source_lexicon", &self.source_lexicon),
            ("target_lexicon", &self.target_lexicon),
            ("source_numerals", &self.source_numerals),
            ("target_numerals", &self.target_numerals),
        ];
        for (key, p) in optional {
            if let Some(p) = p {
                required.push((key, p));
            }
        }
        for (key, p) in required {
            if !p.is_file() {
                return Err(Error::Config(format!("{key}: {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_defaults() {
        let text = "input = s.txt\nsimilarity = c.tsv\nprofile = p.conf\nout = out\nmetrics = lcs,bleu\n";
        let cfg = RunConfig::parse(text, Path::new("run.conf"), Path::new("/base")).unwrap();
        assert_eq!(cfg.input, Path::new("/base/s.txt"));
        assert_eq!(cfg.corpus, CorpusSource::Saved("/base/c.tsv".into()));
        assert_eq!(cfg.metrics, [Metric::Lcs, Metric::Bleu]);
        assert_eq!((cfg.max_mutants, cfg.repair_mutants), (5, 16));
        assert_eq!(cfg.active_repair_metric(), Metric::Lcs);
        assert_eq!(cfg.cache_path(), Path::new("/base/out/cache.jsonl"));
    }

    #[test]
    fn rejects_bad_config() {
        let p = |t: &str| RunConfig::parse(t, Path::new("r"), Path::new("."));
        assert!(p("input = a\nprofile = b\nout = o\n").is_err());
        assert!(p("input = a\nprofile = b\nout = o\nsimilarity = c\nembeddings1 = e\n").is_err());
        assert!(p("input = a\nprofile = b\nout = o\nsimilarity = c\nmax_mutants = -1\n").is_err());
        assert!(p("input = a\nprofile = b\nout = o\nsimilarity = c\ncolour = red\n").is_err());
    }

    #[test]
    fn validation_catches_missing_paths() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::new(
            dir.path().join("missing.txt"),
            dir.path().join("c.tsv"),
            dir.path().join("p.conf"),
            dir.path().join("out"),
        );
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("input")));
    }
}
