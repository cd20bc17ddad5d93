//! End-to-end orchestration: corpus, mutate, translate, test, repair, report.
//!
//! Every stage reads its inputs from the artifacts of earlier stages in the
//! output directory, so any suffix of the pipeline can be re-run on its own.

pub mod artifacts;
mod config;
pub mod histogram;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    CorpusSource, RunConfig, DEFAULT_ALIGN_ITERATIONS, DEFAULT_MAX_MUTANTS, DEFAULT_REPAIR_MUTANTS,
    DEFAULT_SIMILARITY_THRESHOLD,
};

use crate::aligner::{train_lexicon, Aligner, LexiconAligner, LexiconModel};
use crate::embedding::{build_corpus, Embeddings, SimilarityCorpus};
use crate::error::{Error, Result};
use crate::metrics::{build_idf, IdfTable, Metric, Scorer};
use crate::mutation::generate_mutants;
use crate::oracle::{judge, ThresholdSet};
use crate::repair::{
    repair_translation, Candidate, CandidateSet, Origin, RepairContext, RepairMode, RepairOutcome, RepairTarget,
};
use crate::tagger::{tag_tokens, LexiconTagger, TaggedSentence};
use crate::text::LanguageProfile;
use crate::translator::{TranslationCache, TranslatorClient, TranslatorProfile};
use artifacts::*;
use histogram::Histogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Corpus,
    Mutate,
    Translate,
    Test,
    Repair,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Corpus,
        Stage::Mutate,
        Stage::Translate,
        Stage::Test,
        Stage::Repair,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Corpus => "corpus",
            Stage::Mutate => "mutate",
            Stage::Translate => "translate",
            Stage::Test => "test",
            Stage::Repair => "repair",
            Stage::Report => "report",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunCounts {
    pub sentences_in: usize,
    pub sentences_skipped: usize,
    pub corpus_pairs: usize,
    pub mutants_generated: usize,
    pub mutants_filtered: usize,
    pub mutants_emitted: usize,
    pub translations: usize,
    pub translation_failures: usize,
    pub inputs_tested: usize,
    /// Mutant pairs below threshold, per metric.
    pub bugs: BTreeMap<Metric, usize>,
    /// Sentences with at least one flagged mutant pair, per metric.
    pub buggy_sentences: BTreeMap<Metric, usize>,
    /// Keyed `original|mutant/<mode>/<status>`.
    pub repairs: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub ok: bool,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub counts: RunCounts,
    pub stages: Vec<StageRecord>,
    pub backend_calls: usize,
    pub cache_hits: usize,
}

impl RunSummary {
    pub fn failed_stage(&self) -> Option<Stage> {
        self.stages.iter().find(|s| !s.ok).map(|s| s.stage)
    }

    /// Arithmetic that must hold on every run.
    pub fn check_invariants(&self) -> Result<()> {
        let c = &self.counts;
        if c.mutants_generated != c.mutants_filtered + c.mutants_emitted {
            return Err(Error::InvalidInput(format!(
                "generated {} != filtered {} + emitted {}",
                c.mutants_generated, c.mutants_filtered, c.mutants_emitted
            )));
        }
        if let Some((m, n)) = c.bugs.iter().find(|(_, &n)| n > c.inputs_tested) {
            return Err(Error::InvalidInput(format!("{m} bugs {n} exceed inputs tested {}", c.inputs_tested)));
        }
        Ok(())
    }
}

pub struct Pipeline {
    cfg: RunConfig,
    source: LanguageProfile,
    target: LanguageProfile,
    source_tagger: LexiconTagger,
    target_tagger: LexiconTagger,
    thresholds: ThresholdSet,
    client: TranslatorClient,
    corpus: OnceLock<SimilarityCorpus>,
    pool: rayon::ThreadPool,
}

fn tagger_with(lexicon: Option<&Path>) -> Result<LexiconTagger> {
    let mut t = LexiconTagger::new();
    if let Some(p) = lexicon {
        t.extend_from_file(p)?;
    }
    Ok(t)
}

fn profile_with(tag: &str, numerals: Option<&Path>) -> Result<LanguageProfile> {
    let p = LanguageProfile::for_tag(tag);
    match numerals {
        Some(path) => p.load_numerals(path),
        None => Ok(p),
    }
}

impl Pipeline {
    /// Validates the configuration and loads everything except the corpus.
    pub fn open(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let profile = TranslatorProfile::load(&cfg.profile)?;
        if cfg.repair_mode == RepairMode::Probability && !profile.grey_box {
            return Err(Error::Config(
                "probability repair needs a translator profile with grey-box capability".into(),
            ));
        }
        let thresholds = match &cfg.thresholds {
            Some(p) => ThresholdSet::load(p)?,
            None => ThresholdSet::reference(),
        };
        for m in cfg.metrics.iter().copied().chain([cfg.active_repair_metric()]) {
            thresholds.get(m).map_err(|e| Error::Config(e.to_string()))?;
        }
        std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
        let cache = Arc::new(TranslationCache::open(&cfg.cache_path())?);
        let source = profile_with(&profile.source, cfg.source_numerals.as_deref())?;
        let target = profile_with(&profile.target, cfg.target_numerals.as_deref())?;
        let client = TranslatorClient::from_profile(profile, cache)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        Ok(Pipeline {
            source_tagger: tagger_with(cfg.source_lexicon.as_deref())?,
            target_tagger: tagger_with(cfg.target_lexicon.as_deref())?,
            source,
            target,
            thresholds,
            client,
            corpus: OnceLock::new(),
            pool,
            cfg,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn client(&self) -> &TranslatorClient {
        &self.client
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    pub fn corpus(&self) -> Result<&SimilarityCorpus> {
        if let Some(c) = self.corpus.get() {
            return Ok(c);
        }
        let corpus = match &self.cfg.corpus {
            CorpusSource::Saved(p) => SimilarityCorpus::load(p)?,
            CorpusSource::Embeddings {
                model1,
                model2,
                threshold,
                lowercase,
            } => {
                let m1 = Embeddings::load(model1, *lowercase)?;
                let m2 = Embeddings::load(model2, *lowercase)?;
                let c = self.pool.install(|| build_corpus(&m1, &m2, *threshold))?;
                c.save(&self.artifact(CORPUS_FILE))?;
                c
            }
        };
        Ok(self.corpus.get_or_init(|| corpus))
    }

    /// Runs `from` and every later stage, stopping at the first failure.
    /// The summary is written to the output directory either way.
    pub fn run(&self, from: Stage) -> Result<RunSummary> {
        let stages: Vec<Stage> = Stage::ALL.into_iter().filter(|s| *s >= from).collect();
        self.run_stages(&stages)
    }

    /// Runs the given stages in order, stopping at the first failure.
    pub fn run_stages(&self, stages: &[Stage]) -> Result<RunSummary> {
        let mut summary = RunSummary::default();
        for &stage in stages {
            let start = Instant::now();
            let result = self.run_stage(stage, &mut summary.counts);
            let seconds = start.elapsed().as_secs_f64();
            let error = result.err().map(|e| e.to_string());
            if let Some(e) = &error {
                log::error!("stage {} failed: {e}", stage.name());
            } else {
                log::info!("stage {} done in {seconds:.3}s", stage.name());
            }
            let ok = error.is_none();
            summary.stages.push(StageRecord {
                stage,
                ok,
                seconds,
                error,
            });
            if !ok {
                break;
            }
        }
        summary.backend_calls = self.client.backend_calls();
        summary.cache_hits = self.client.cache_hits();
        let path = self.artifact(SUMMARY_FILE);
        let text = serde_json::to_string_pretty(&summary)?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(summary)
    }

    pub fn run_stage(&self, stage: Stage, counts: &mut RunCounts) -> Result<()> {
        match stage {
            Stage::Corpus => {
                counts.corpus_pairs = self.corpus()?.len();
                Ok(())
            }
            Stage::Mutate => self.stage_mutate(counts),
            Stage::Translate => self.stage_translate(counts),
            Stage::Test => self.stage_test(counts),
            Stage::Repair => self.stage_repair(counts),
            Stage::Report => self.stage_report(),
        }
    }

    fn read_sentences(&self) -> Result<Vec<String>> {
        let text = std::fs::read_to_string(&self.cfg.input).map_err(|e| Error::io(&self.cfg.input, e))?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect())
    }

    pub fn stage_mutate(&self, counts: &mut RunCounts) -> Result<()> {
        let sentences = self.read_sentences()?;
        let corpus = self.corpus()?;
        let batches: Vec<Option<(TaggedSentence, crate::mutation::MutantBatch)>> = self.pool.install(|| {
            sentences
                .par_iter()
                .map(|s| {
                    let tagged = match tag_tokens(self.source.tokenize(s), &self.source_tagger) {
                        Ok(t) => t,
                        Err(e) => {
                            log::warn!("skipping sentence {s:?}: {e}");
                            return Ok(None);
                        }
                    };
                    let batch =
                        generate_mutants(&tagged, corpus, self.cfg.max_mutants, &self.source_tagger, self.cfg.filter)?;
                    Ok(Some((tagged, batch)))
                })
                .collect::<Result<_>>()
        })?;
        counts.sentences_in = sentences.len();
        let mut records = Vec::new();
        for (sid, entry) in batches.into_iter().enumerate() {
            let Some((tagged, batch)) = entry else {
                counts.sentences_skipped += 1;
                continue;
            };
            counts.mutants_generated += batch.generated;
            counts.mutants_filtered += batch.rejected;
            counts.mutants_emitted += batch.mutants.len();
            for (mid, m) in batch.mutants.into_iter().enumerate() {
                let text = self.source.detokenize(&m.tokens());
                records.push(MutantRecord {
                    schema: MUTANT_SCHEMA.into(),
                    sentence_id: sid,
                    mutant_id: mid,
                    tokens: tagged.tokens.clone(),
                    tags: tagged.tags.clone(),
                    mutated_index: m.mutated_index,
                    original_word: m.original_word,
                    replacement_word: m.replacement_word,
                    text,
                });
            }
        }
        write_jsonl(&self.artifact(MUTANTS_FILE), &records)
    }

    pub fn stage_translate(&self, counts: &mut RunCounts) -> Result<()> {
        let mutants: Vec<MutantRecord> = read_jsonl(&self.artifact(MUTANTS_FILE))?;
        let mut jobs: Vec<(usize, Option<usize>, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for m in &mutants {
            if seen.insert(m.sentence_id) {
                jobs.push((m.sentence_id, None, self.source.detokenize(&m.tokens)));
            }
            jobs.push((m.sentence_id, Some(m.mutant_id), m.text.clone()));
        }
        let results: Vec<Result<_>> = self
            .pool
            .install(|| jobs.par_iter().map(|(_, _, text)| self.client.translate(text)).collect());
        let mut records = Vec::with_capacity(jobs.len());
        for ((sid, mid, text), result) in jobs.into_iter().zip(results) {
            match result {
                Ok(r) => records.push(TranslationArtifact {
                    schema: TRANSLATION_SCHEMA.into(),
                    sentence_id: sid,
                    mutant_id: mid,
                    input: text,
                    output: r.output,
                    probability: r.probability,
                }),
                Err(e) => {
                    log::warn!("translation of {text:?} failed: {e}");
                    counts.translation_failures += 1;
                }
            }
        }
        counts.translations = records.len();
        write_jsonl(&self.artifact(TRANSLATIONS_FILE), &records)
    }

    /// Idf table for tf-idf scoring: the configured file, or document
    /// frequencies over the run's translations.
    fn idf(&self, translations: &[TranslationArtifact]) -> Result<Option<IdfTable>> {
        let needed = self.cfg.metrics.contains(&Metric::TfIdf) || self.cfg.active_repair_metric() == Metric::TfIdf;
        if !needed {
            return Ok(None);
        }
        Ok(Some(match &self.cfg.idf {
            Some(p) => IdfTable::load(p)?,
            None => build_idf(translations.iter().map(|t| self.target.tokenize(&t.output))),
        }))
    }

    pub fn stage_test(&self, counts: &mut RunCounts) -> Result<()> {
        let mutants: Vec<MutantRecord> = read_jsonl(&self.artifact(MUTANTS_FILE))?;
        let translations: Vec<TranslationArtifact> = read_jsonl(&self.artifact(TRANSLATIONS_FILE))?;
        let idf = self.idf(&translations)?;
        let by_key: HashMap<(usize, Option<usize>), &TranslationArtifact> =
            translations.iter().map(|t| ((t.sentence_id, t.mutant_id), t)).collect();
        let pairs: Vec<(&MutantRecord, &TranslationArtifact, &TranslationArtifact)> = mutants
            .iter()
            .filter_map(|m| {
                let orig = by_key.get(&(m.sentence_id, None))?;
                let mt = by_key.get(&(m.sentence_id, Some(m.mutant_id)))?;
                Some((m, *orig, *mt))
            })
            .collect();
        let reports: Vec<Vec<ReportRecord>> = self.pool.install(|| {
            pairs
                .par_iter()
                .map(|(m, orig, mt)| {
                    let (t_s, t_sm) = (self.target.tokenize(&orig.output), self.target.tokenize(&mt.output));
                    self.cfg
                        .metrics
                        .iter()
                        .map(|&metric| {
                            let scorer = Scorer::new(metric, idf.as_ref());
                            let r = judge(m.sentence_id, m.mutant_id, &t_s, &t_sm, &self.thresholds, &scorer)?;
                            Ok(ReportRecord {
                                schema: REPORT_SCHEMA.into(),
                                sentence_id: r.sentence_id,
                                mutant_id: r.mutant_id,
                                metric: r.metric,
                                score: r.score,
                                threshold: r.threshold,
                                is_bug: r.is_bug,
                                slices: r.slices,
                                original_translation: orig.output.clone(),
                                mutant_translation: mt.output.clone(),
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()
        })?;
        let reports: Vec<ReportRecord> = reports.into_iter().flatten().collect();
        counts.inputs_tested = pairs.len();
        let mut buggy: BTreeMap<Metric, BTreeSet<usize>> = BTreeMap::new();
        for m in &self.cfg.metrics {
            counts.bugs.insert(*m, 0);
            buggy.insert(*m, BTreeSet::new());
        }
        for r in reports.iter().filter(|r| r.is_bug) {
            *counts.bugs.entry(r.metric).or_default() += 1;
            buggy.entry(r.metric).or_default().insert(r.sentence_id);
        }
        counts.buggy_sentences = buggy.into_iter().map(|(m, s)| (m, s.len())).collect();
        write_jsonl(&self.artifact(REPORTS_FILE), &reports)
    }

    /// The sentence's own candidate plus translated repair mutants.
    fn candidate_set(&self, tagged: &TaggedSentence, own: Candidate) -> Result<CandidateSet> {
        let batch = generate_mutants(
            tagged,
            self.corpus()?,
            self.cfg.repair_mutants,
            &self.source_tagger,
            self.cfg.filter,
        )?;
        let mut entries = vec![own];
        for (k, m) in batch.mutants.iter().enumerate() {
            let tokens = m.tokens();
            match self.client.translate(&self.source.detokenize(&tokens)) {
                Ok(r) => entries.push(Candidate {
                    origin: Origin::Mutant(k),
                    sentence: tokens,
                    translation: self.target.tokenize(&r.output),
                    probability: r.probability,
                }),
                Err(e) => log::warn!("repair candidate {k} untranslated: {e}"),
            }
        }
        CandidateSet::new(entries)
    }

    fn aligner(&self, jobs: &[RepairJob], translations: &[TranslationArtifact], mutants: &[MutantRecord]) -> Result<LexiconAligner> {
        let model = if let Some(p) = &self.cfg.align_model {
            LexiconModel::load(p)?
        } else if let Some(p) = &self.cfg.parallel {
            let pairs = read_parallel(p, &self.source, &self.target)?;
            train_lexicon(&pairs, self.cfg.align_iterations)?
        } else {
            // Self-training on every (sentence, translation) pair of the run.
            let mut sources: HashMap<(usize, Option<usize>), Vec<String>> = HashMap::new();
            for m in mutants {
                sources.entry((m.sentence_id, None)).or_insert_with(|| m.tokens.clone());
                let mut toks = m.tokens.clone();
                toks[m.mutated_index] = m.replacement_word.clone();
                sources.insert((m.sentence_id, Some(m.mutant_id)), toks);
            }
            let mut pairs: Vec<(Vec<String>, Vec<String>)> = translations
                .iter()
                .filter_map(|t| {
                    let s = sources.get(&(t.sentence_id, t.mutant_id))?;
                    Some((s.clone(), self.target.tokenize(&t.output)))
                })
                .collect();
            for job in jobs {
                for set in std::iter::once(&job.original).chain(job.mutants.iter().map(|(_, s)| s)) {
                    for c in &set.entries()[1..] {
                        pairs.push((c.sentence.clone(), c.translation.clone()));
                    }
                }
            }
            if pairs.is_empty() {
                LexiconModel::default()
            } else {
                train_lexicon(&pairs, self.cfg.align_iterations)?
            }
        };
        Ok(LexiconAligner::new(model))
    }

    pub fn stage_repair(&self, counts: &mut RunCounts) -> Result<()> {
        let mutants: Vec<MutantRecord> = read_jsonl(&self.artifact(MUTANTS_FILE))?;
        let translations: Vec<TranslationArtifact> = read_jsonl(&self.artifact(TRANSLATIONS_FILE))?;
        let reports: Vec<ReportRecord> = read_jsonl(&self.artifact(REPORTS_FILE))?;
        let metric = self.cfg.active_repair_metric();
        let idf = self.idf(&translations)?;

        let mut targets: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for r in reports.iter().filter(|r| r.metric == metric && r.is_bug) {
            targets.entry(r.sentence_id).or_default().insert(r.mutant_id);
        }
        let by_key: HashMap<(usize, Option<usize>), &TranslationArtifact> =
            translations.iter().map(|t| ((t.sentence_id, t.mutant_id), t)).collect();
        let by_mutant: HashMap<(usize, usize), &MutantRecord> =
            mutants.iter().map(|m| ((m.sentence_id, m.mutant_id), m)).collect();

        let targets: Vec<(usize, Vec<usize>)> =
            targets.into_iter().map(|(s, m)| (s, m.into_iter().collect())).collect();
        let jobs: Vec<Option<RepairJob>> = self.pool.install(|| {
            targets
                .par_iter()
                .map(|(sid, mids)| self.build_job(*sid, mids, &by_key, &by_mutant))
                .collect::<Result<Vec<_>>>()
        })?;
        let jobs: Vec<RepairJob> = jobs.into_iter().flatten().collect();

        let aligner = self.aligner(&jobs, &translations, &mutants)?;
        let ctx = RepairContext {
            mode: self.cfg.repair_mode,
            scorer: Scorer::new(metric, idf.as_ref()),
            threshold: self.thresholds.get(metric)?,
            source_profile: &self.source,
            target_profile: &self.target,
            target_tagger: &self.target_tagger,
            aligner: &aligner as &dyn Aligner,
        };
        let outcomes: Vec<Vec<RepairOutcome>> = self.pool.install(|| {
            jobs.par_iter()
                .map(|job| {
                    let target = RepairTarget {
                        sentence_id: job.sentence_id,
                        mutant_id: None,
                    };
                    let original = repair_translation(target, &job.original, &ctx, None)?;
                    let mut out = Vec::with_capacity(1 + job.mutants.len());
                    for (mid, set) in &job.mutants {
                        let target = RepairTarget {
                            sentence_id: job.sentence_id,
                            mutant_id: Some(*mid),
                        };
                        out.push(repair_translation(target, set, &ctx, Some(&original.repaired_translation))?);
                    }
                    out.insert(0, original);
                    Ok(out)
                })
                .collect::<Result<_>>()
        })?;
        let mut records = Vec::new();
        for outcome in outcomes.into_iter().flatten() {
            let kind = if outcome.target.mutant_id.is_some() { "mutant" } else { "original" };
            *counts
                .repairs
                .entry(format!("{kind}/{}/{}", outcome.mode.name(), outcome.status.name()))
                .or_default() += 1;
            records.push(RepairRecord {
                schema: REPAIR_SCHEMA.into(),
                repaired_text: self.target.detokenize(&outcome.repaired_translation),
                outcome,
            });
        }
        write_jsonl(&self.artifact(REPAIRS_FILE), &records)
    }

    fn build_job(
        &self,
        sid: usize,
        mids: &[usize],
        by_key: &HashMap<(usize, Option<usize>), &TranslationArtifact>,
        by_mutant: &HashMap<(usize, usize), &MutantRecord>,
    ) -> Result<Option<RepairJob>> {
        let (Some(orig_t), Some(first)) = (by_key.get(&(sid, None)), by_mutant.get(&(sid, mids[0]))) else {
            return Ok(None);
        };
        let tagged = TaggedSentence::new(first.tokens.clone(), first.tags.clone())?;
        let own = Candidate {
            origin: Origin::Original,
            sentence: tagged.tokens.clone(),
            translation: self.target.tokenize(&orig_t.output),
            probability: orig_t.probability,
        };
        let original = self.candidate_set(&tagged, own)?;
        let mut sets = Vec::new();
        for &mid in mids {
            let (Some(m), Some(t)) = (by_mutant.get(&(sid, mid)), by_key.get(&(sid, Some(mid)))) else {
                continue;
            };
            let mut toks = m.tokens.clone();
            toks[m.mutated_index] = m.replacement_word.clone();
            let tagged_m = match tag_tokens(toks, &self.source_tagger) {
                Ok(t) => t,
                Err(e) => {
                    log::warn!("mutant {sid}/{mid} not re-tagged: {e}");
                    continue;
                }
            };
            let own = Candidate {
                origin: Origin::Original,
                sentence: tagged_m.tokens.clone(),
                translation: self.target.tokenize(&t.output),
                probability: t.probability,
            };
            sets.push((mid, self.candidate_set(&tagged_m, own)?));
        }
        Ok(Some(RepairJob {
            sentence_id: sid,
            original,
            mutants: sets,
        }))
    }

    pub fn stage_report(&self) -> Result<()> {
        let path = self.artifact(REPORTS_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let h = Histogram::from_reports(&text);
        if h.skipped > 0 {
            log::warn!("{} malformed report lines skipped", h.skipped);
        }
        let out = self.artifact(HISTOGRAM_FILE);
        std::fs::write(&out, h.to_csv()).map_err(|e| Error::io(&out, e))
    }
}

struct RepairJob {
    sentence_id: usize,
    original: CandidateSet,
    /// Test mutant id and its candidates, the mutant being the set's
    /// original.
    mutants: Vec<(usize, CandidateSet)>,
}

/// Tab-separated `source \t target` lines.
pub fn read_parallel(
    path: &Path,
    source: &LanguageProfile,
    target: &LanguageProfile,
) -> Result<Vec<(Vec<String>, Vec<String>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (s, t) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected source<TAB>target"))?;
        let (s, t) = (source.tokenize(s), target.tokenize(t));
        if s.is_empty() || t.is_empty() {
            return Err(Error::parse(path, i + 1, "empty side"));
        }
        out.push((s, t));
    }
    Ok(out)
}

/// Validates `cfg` and runs every stage. Validation problems are errors;
/// stage failures are recorded in the returned summary.
pub fn run_pipeline(cfg: RunConfig) -> Result<RunSummary> {
    Pipeline::open(cfg)?.run(Stage::Corpus)
}
