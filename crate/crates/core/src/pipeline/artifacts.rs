//! Line-delimited JSON records exchanged between stages.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::diff::DiffSlices;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::repair::RepairOutcome;

pub const MUTANT_SCHEMA: &str = "transcheck.mutant/1";
pub const TRANSLATION_SCHEMA: &str = "transcheck.translation/1";
pub const REPORT_SCHEMA: &str = "transcheck.report/1";
pub const REPAIR_SCHEMA: &str = "transcheck.repair/1";

pub const MUTANTS_FILE: &str = "mutants.jsonl";
pub const TRANSLATIONS_FILE: &str = "translations.jsonl";
pub const REPORTS_FILE: &str = "reports.jsonl";
pub const REPAIRS_FILE: &str = "repairs.jsonl";
pub const CORPUS_FILE: &str = "corpus.tsv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub schema: String,
    pub sentence_id: usize,
    pub mutant_id: usize,
    pub tokens: Vec<String>,
    pub tags: Vec<String>,
    pub mutated_index: usize,
    pub original_word: String,
    pub replacement_word: String,
    /// The mutant sentence as sent to the translator.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationArtifact {
    pub schema: String,
    pub sentence_id: usize,
    /// `None` for the original sentence.
    pub mutant_id: Option<usize>,
    pub input: String,
    pub output: String,
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub schema: String,
    pub sentence_id: usize,
    pub mutant_id: usize,
    pub metric: Metric,
    pub score: f64,
    pub threshold: f64,
    pub is_bug: bool,
    pub slices: DiffSlices,
    pub original_translation: String,
    pub mutant_translation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairRecord {
    pub schema: String,
    #[serde(flatten)]
    pub outcome: RepairOutcome,
    pub repaired_text: String,
}

/// Writes records atomically: a failed write leaves any previous file intact.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(&buf).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Reads every line; any malformed record is an error naming its line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}
