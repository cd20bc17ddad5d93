use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};

use transcheck_core::aligner::train_lexicon;
use transcheck_core::embedding::{build_corpus, Embeddings};
use transcheck_core::metrics::build_idf;
use transcheck_core::mutation::generate_mutants;
use transcheck_core::oracle::{consistency_score, learn_thresholds, LabeledScores};
use transcheck_core::pipeline::artifacts::{write_jsonl, MutantRecord, HISTOGRAM_FILE, MUTANT_SCHEMA, REPORTS_FILE};
use transcheck_core::pipeline::histogram::Histogram;
use transcheck_core::pipeline::read_parallel;
use transcheck_core::tagger::tag_tokens;
use transcheck_core::translator::TranslationCache;
use transcheck_core::{
    Error, FilterMode, LanguageProfile, LexiconTagger, Metric, Pipeline, RunConfig, Scorer, SimilarityCorpus, Stage,
    TranslatorClient, TranslatorProfile,
};

use crate::Overrides;

/// A stage ran and failed, as opposed to invalid input or configuration.
#[derive(Debug)]
pub struct StageFailed(pub String);

impl fmt::Display for StageFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage failed: {}", self.0)
    }
}

impl std::error::Error for StageFailed {}

/// 1 for validation problems, 2 for stage failures.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<StageFailed>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(
            Error::Config(_)
            | Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::Io { .. }
            | Error::Json(_),
        ) => 1,
        _ => 2,
    }
}

/// The error chain, leaving out causes already quoted by their parent.
pub fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn stage_failed<E: fmt::Display>(e: E) -> anyhow::Error {
    anyhow!(StageFailed(e.to_string()))
}

pub fn corpus_build(model1: &Path, model2: &Path, threshold: f64, lowercase: bool, out: &Path) -> Result<()> {
    let m1 = Embeddings::load(model1, lowercase)?;
    let m2 = Embeddings::load(model2, lowercase)?;
    let corpus = build_corpus(&m1, &m2, threshold)?;
    corpus.save(out).map_err(stage_failed)?;
    println!("{} pairs written to {}", corpus.len(), out.display());
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

pub fn idf_build(corpus: &Path, lang: &str, out: &Path) -> Result<()> {
    let profile = LanguageProfile::for_tag(lang);
    let lines = read_lines(corpus)?;
    let idf = build_idf(lines.iter().map(|l| profile.tokenize(l)));
    std::fs::write(out, idf.to_tsv()).map_err(stage_failed)?;
    println!("idf over {} sentences written to {}", idf.corpus_size(), out.display());
    Ok(())
}

pub fn align_train(parallel: &Path, iters: usize, source: &str, target: &str, out: &Path) -> Result<()> {
    let pairs = read_parallel(parallel, &LanguageProfile::for_tag(source), &LanguageProfile::for_tag(target))?;
    let model = train_lexicon(&pairs, iters)?;
    model.save(out).map_err(stage_failed)?;
    println!(
        "trained on {} pairs for {} iterations; {} source words",
        model.corpus_size,
        model.iterations,
        model.source_vocab_len()
    );
    Ok(())
}

pub struct MutateOptions {
    pub corpus: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub max_mutants: usize,
    pub filter: String,
    pub lexicon: Option<PathBuf>,
    pub lang: String,
}

pub fn mutate_standalone(o: &MutateOptions) -> Result<()> {
    let (Some(corpus), Some(input), Some(out)) = (&o.corpus, &o.input, &o.out) else {
        bail!(Error::Config("mutate needs either --config or --corpus, --input and --out".into()));
    };
    let filter: FilterMode = o.filter.parse()?;
    let corpus = SimilarityCorpus::load(corpus)?;
    let mut tagger = LexiconTagger::new();
    if let Some(p) = &o.lexicon {
        tagger.extend_from_file(p)?;
    }
    let profile = LanguageProfile::for_tag(&o.lang);
    let mut records = Vec::new();
    let (mut generated, mut rejected) = (0, 0);
    for (sid, line) in read_lines(input)?.iter().enumerate() {
        let tagged = match tag_tokens(profile.tokenize(line), &tagger) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("skipping sentence {sid}: {e}");
                continue;
            }
        };
        let batch = generate_mutants(&tagged, &corpus, o.max_mutants, &tagger, filter)?;
        generated += batch.generated;
        rejected += batch.rejected;
        for (mid, m) in batch.mutants.into_iter().enumerate() {
            records.push(MutantRecord {
                schema: MUTANT_SCHEMA.into(),
                sentence_id: sid,
                mutant_id: mid,
                text: profile.detokenize(&m.tokens()),
                tokens: tagged.tokens.clone(),
                tags: tagged.tags.clone(),
                mutated_index: m.mutated_index,
                original_word: m.original_word,
                replacement_word: m.replacement_word,
            });
        }
    }
    write_jsonl(out, &records).map_err(stage_failed)?;
    println!("{} mutants emitted, {generated} generated, {rejected} filtered out", records.len());
    Ok(())
}

pub fn translate_standalone(
    profile: Option<PathBuf>,
    input: Option<PathBuf>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<()> {
    let (Some(profile), Some(input)) = (profile, input) else {
        bail!(Error::Config("translate needs either --config or --profile and --input".into()));
    };
    let profile = TranslatorProfile::load(&profile)?;
    let cache = match &cache {
        Some(p) => TranslationCache::open(p)?,
        None => TranslationCache::in_memory(),
    };
    let client = TranslatorClient::from_profile(profile, Arc::new(cache))?;
    let lines = read_lines(&input)?;
    let mut buf = Vec::new();
    let mut failures = 0usize;
    for line in &lines {
        match client.translate(line) {
            Ok(record) => {
                serde_json::to_writer(&mut buf, &record)?;
                buf.push(b'\n');
            }
            Err(e) => {
                log::error!("{line:?}: {e}");
                failures += 1;
            }
        }
    }
    match out {
        Some(path) => std::fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&buf)?,
    }
    eprintln!(
        "{} translated, {failures} failed, {} backend calls, {} cache hits",
        lines.len() - failures,
        client.backend_calls(),
        client.cache_hits()
    );
    if failures > 0 {
        return Err(stage_failed(format!("{failures} translations failed")));
    }
    Ok(())
}

fn load_config(path: &Path, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(m) = &o.metric {
        cfg.metrics = Metric::parse_list(m)?;
    }
    if let Some(t) = &o.thresholds {
        cfg.thresholds = Some(t.clone());
    }
    if let Some(n) = o.max_mutants {
        cfg.max_mutants = n;
    }
    if let Some(n) = o.repair_mutants {
        cfg.repair_mutants = n;
    }
    if let Some(m) = &o.mode {
        cfg.repair_mode = m.parse()?;
    }
    if let Some(n) = o.workers {
        cfg.workers = n;
    }
    if let Some(d) = &o.out_dir {
        cfg.out_dir = d.clone();
    }
    Ok(cfg)
}

fn run_and_report(pipeline: &Pipeline, stages: &[Stage]) -> Result<()> {
    let summary = pipeline.run_stages(stages).map_err(stage_failed)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if let Some(stage) = summary.failed_stage() {
        let msg = summary
            .stages
            .iter()
            .find(|s| s.stage == stage)
            .and_then(|s| s.error.clone())
            .unwrap_or_default();
        return Err(stage_failed(format!("{}: {msg}", stage.name())));
    }
    Ok(())
}

pub fn stages(config: &Path, o: &Overrides, names: &[&str]) -> Result<()> {
    let stages = names.iter().map(|n| n.parse()).collect::<transcheck_core::Result<Vec<Stage>>>()?;
    let pipeline = Pipeline::open(load_config(config, o)?)?;
    run_and_report(&pipeline, &stages)
}

pub fn run(config: &Path, from: &str, o: &Overrides) -> Result<()> {
    let from: Stage = from.parse()?;
    let pipeline = Pipeline::open(load_config(config, o)?)?;
    let stages: Vec<Stage> = Stage::ALL.into_iter().filter(|s| *s >= from).collect();
    run_and_report(&pipeline, &stages)
}

pub fn report(config: Option<PathBuf>, reports: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let reports = match (config, reports) {
        (Some(config), _) => {
            let cfg = load_config(&config, &Overrides::default())?;
            cfg.out_dir.join(REPORTS_FILE)
        }
        (None, Some(r)) => r,
        (None, None) => bail!(Error::Config("report needs --config or --reports".into())),
    };
    let text = std::fs::read_to_string(&reports).map_err(|e| Error::Io {
        path: reports.clone(),
        source: e,
    })?;
    let histogram = Histogram::from_reports(&text);
    if histogram.skipped > 0 {
        eprintln!("{} malformed report lines skipped", histogram.skipped);
    }
    let csv = histogram.to_csv();
    print!("{csv}");
    let target = out.or_else(|| reports.parent().map(|p| p.join(HISTOGRAM_FILE)));
    if let Some(path) = target {
        std::fs::write(&path, csv).map_err(stage_failed)?;
    }
    Ok(())
}

pub fn calibrate(labels: &Path, metric: &str, step: f64, lang: &str, out: &Path) -> Result<()> {
    let metrics = Metric::parse_list(metric)?;
    let profile = LanguageProfile::for_tag(lang);
    let mut pairs = Vec::new();
    for (i, line) in read_lines(labels)?.iter().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_err = |msg: &str| Error::Parse {
            path: labels.to_path_buf(),
            line: i + 1,
            msg: msg.into(),
        };
        let [label, a, b] = fields[..] else {
            bail!(parse_err("expected label<TAB>translation<TAB>translation"));
        };
        let consistent = match label {
            "consistent" | "1" => true,
            "inconsistent" | "0" => false,
            _ => bail!(parse_err("label must be consistent or inconsistent")),
        };
        let (a, b) = (profile.tokenize(a), profile.tokenize(b));
        if a.is_empty() || b.is_empty() {
            bail!(parse_err("empty translation"));
        }
        pairs.push((consistent, a, b));
    }
    let idf = build_idf(pairs.iter().flat_map(|(_, a, b)| [a.clone(), b.clone()]));
    let mut labeled = Vec::new();
    for (consistent, a, b) in &pairs {
        let mut scores = std::collections::BTreeMap::new();
        for &m in &metrics {
            scores.insert(m, consistency_score(a, b, &Scorer::new(m, Some(&idf)))?.score);
        }
        labeled.push(LabeledScores {
            scores,
            consistent: *consistent,
        });
    }
    let set = learn_thresholds(&labeled, step)?;
    set.save(out).map_err(stage_failed)?;
    print!("{}", set.to_text());
    Ok(())
}
