//! Consistency scoring between a translation and a mutant's translation,
//! threshold verdicts, and threshold calibration from labelled scores.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diff::{delete_slice, word_diff, DiffSlices, Slice};
use crate::error::{Error, Result};
use crate::metrics::{Metric, Scorer};

/// Slices longer than this rarely correspond to the replaced word and are
/// never deleted.
pub const MAX_SLICE_TOKENS: usize = 5;

pub const GRID_MIN: f64 = 0.8;
pub const GRID_MAX: f64 = 1.0;
pub const DEFAULT_GRID_STEP: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyScore {
    pub score: f64,
    pub slices: DiffSlices,
    /// Indices into `slices.slices_a` / `slices.slices_b` deleted in the
    /// best-scoring pair; `None` means that side was left whole.
    pub best: (Option<usize>, Option<usize>),
}

fn candidates(tokens: &[String], slices: &[Slice]) -> Vec<(Option<usize>, Vec<String>)> {
    let mut out = vec![(None, tokens.to_vec())];
    for (i, s) in slices.iter().enumerate() {
        if s.len() > MAX_SLICE_TOKENS {
            continue;
        }
        let rest = delete_slice(tokens, s);
        // A subsequence with nothing left carries no evidence of consistency.
        if !rest.is_empty() {
            out.push((Some(i), rest));
        }
    }
    out
}

/// Highest similarity over every pair of (translation or translation minus
/// one short diff slice) from each side.
pub fn consistency_score(
    t_s: &[String],
    t_sm: &[String],
    scorer: &Scorer<'_>,
) -> Result<ConsistencyScore> {
    if t_s.is_empty() || t_sm.is_empty() {
        return Err(Error::InvalidTranslation("empty translation".into()));
    }
    // Diff in a canonical argument order so the score is symmetric.
    let slices = if t_s <= t_sm {
        word_diff(t_s, t_sm)
    } else {
        word_diff(t_sm, t_s).mirrored()
    };
    let originals = candidates(t_s, &slices.slices_a);
    let mutants = candidates(t_sm, &slices.slices_b);
    let mut best = (f64::NEG_INFINITY, (None, None));
    for (ia, a) in &originals {
        for (ib, b) in &mutants {
            let sim = scorer.score(a, b);
            if sim > best.0 {
                best = (sim, (*ia, *ib));
            }
        }
    }
    Ok(ConsistencyScore {
        score: best.0,
        slices,
        best: best.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub threshold: f64,
    /// F-measure reached on calibration data, when calibrated.
    pub f_measure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    pub step: f64,
    pub entries: BTreeMap<Metric, ThresholdEntry>,
}

fn on_grid(value: f64, step: f64) -> bool {
    let k = (value - GRID_MIN) / step;
    (GRID_MIN - 1e-9..=GRID_MAX + 1e-9).contains(&value) && (k - k.round()).abs() < 1e-6
}

fn grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= GRID_MAX - GRID_MIN) {
        return Err(Error::Calibration(format!("grid step {step} outside (0, 0.2]")));
    }
    let n = ((GRID_MAX - GRID_MIN) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| ((GRID_MIN + k as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

impl ThresholdSet {
    /// Thresholds calibrated on human-labelled translations: LCS 0.963,
    /// ED 0.963, tf-idf 0.999, BLEU 0.906.
    pub fn reference() -> Self {
        let entry = |t, f| ThresholdEntry {
            threshold: t,
            f_measure: Some(f),
        };
        ThresholdSet {
            step: DEFAULT_GRID_STEP,
            entries: BTreeMap::from([
                (Metric::Lcs, entry(0.963, 0.81)),
                (Metric::Ed, entry(0.963, 0.82)),
                (Metric::TfIdf, entry(0.999, 0.79)),
                (Metric::Bleu, entry(0.906, 0.82)),
            ]),
        }
    }

    pub fn uniform(threshold: f64) -> Self {
        ThresholdSet {
            step: DEFAULT_GRID_STEP,
            entries: Metric::ALL
                .iter()
                .map(|&m| {
                    (
                        m,
                        ThresholdEntry {
                            threshold,
                            f_measure: None,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn get(&self, metric: Metric) -> Result<f64> {
        self.entries
            .get(&metric)
            .map(|e| e.threshold)
            .ok_or_else(|| Error::Config(format!("no threshold for {metric}")))
    }

    /// `key = value` lines: `step`, `<METRIC>` and optional `<METRIC>.f`.
    pub fn to_text(&self) -> String {
        let mut out = format!("step = {}\n", self.step);
        for (m, e) in &self.entries {
            let _ = writeln!(out, "{m} = {}", e.threshold);
            if let Some(f) = e.f_measure {
                let _ = writeln!(out, "{m}.f = {f}");
            }
        }
        out
    }

    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut step = DEFAULT_GRID_STEP;
        let mut thresholds = BTreeMap::new();
        let mut fs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, i + 1, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let num: f64 = value
                .parse()
                .map_err(|e| Error::parse(source, i + 1, format!("bad number: {e}")))?;
            if key.eq_ignore_ascii_case("step") {
                step = num;
            } else if let Some(m) = key.strip_suffix(".f") {
                let m: Metric = m.parse().map_err(|e: Error| Error::parse(source, i + 1, e.to_string()))?;
                fs.insert(m, num);
            } else {
                let m: Metric = key.parse().map_err(|e: Error| Error::parse(source, i + 1, e.to_string()))?;
                thresholds.insert(m, num);
            }
        }
        let entries: BTreeMap<Metric, ThresholdEntry> = thresholds
            .into_iter()
            .map(|(m, t)| {
                (
                    m,
                    ThresholdEntry {
                        threshold: t,
                        f_measure: fs.get(&m).copied(),
                    },
                )
            })
            .collect();
        for (m, e) in &entries {
            if !on_grid(e.threshold, step) {
                return Err(Error::parse(
                    source,
                    0,
                    format!("{m} threshold {} is not on the {step} grid over [0.8, 1.0]", e.threshold),
                ));
            }
        }
        Ok(ThresholdSet { step, entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Per-metric scores of one translation pair with its human label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    pub scores: BTreeMap<Metric, f64>,
    pub consistent: bool,
}

/// F1 of the "inconsistent" class when `score < threshold` flags a bug.
pub fn f_measure(samples: &[(f64, bool)], threshold: f64) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for &(score, consistent) in samples {
        match (score < threshold, consistent) {
            (true, false) => tp += 1,
            (true, true) => fp += 1,
            (false, false) => fn_ += 1,
            (false, true) => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Scans the grid from 0.80 to 1.00 and keeps, per metric, the threshold with
/// the largest F-measure; ties go to the lower threshold.
pub fn learn_thresholds(labeled: &[LabeledScores], step: f64) -> Result<ThresholdSet> {
    let positives = labeled.iter().filter(|l| !l.consistent).count();
    if positives == 0 || positives == labeled.len() {
        return Err(Error::Calibration(
            "labels must include both consistent and inconsistent pairs".into(),
        ));
    }
    let grid = grid(step)?;
    let metrics: Vec<Metric> = labeled[0].scores.keys().copied().collect();
    let mut entries = BTreeMap::new();
    for metric in metrics {
        let samples = labeled
            .iter()
            .map(|l| {
                l.scores
                    .get(&metric)
                    .map(|&s| (s, l.consistent))
                    .ok_or_else(|| Error::Calibration(format!("sample without a {metric} score")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut best = (grid[0], f_measure(&samples, grid[0]));
        for &t in &grid[1..] {
            let f = f_measure(&samples, t);
            if f > best.1 {
                best = (t, f);
            }
        }
        entries.insert(
            metric,
            ThresholdEntry {
                threshold: best.0,
                f_measure: Some(best.1),
            },
        );
    }
    Ok(ThresholdSet { step, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub sentence_id: usize,
    pub mutant_id: usize,
    pub metric: Metric,
    pub score: f64,
    pub threshold: f64,
    pub is_bug: bool,
    pub slices: DiffSlices,
}

/// Scores the pair and flags a bug when the score falls strictly below the
/// metric's threshold.
pub fn judge(
    sentence_id: usize,
    mutant_id: usize,
    t_s: &[String],
    t_sm: &[String],
    thresholds: &ThresholdSet,
    scorer: &Scorer<'_>,
) -> Result<ConsistencyReport> {
    let threshold = thresholds.get(scorer.metric)?;
    let c = consistency_score(t_s, t_sm, scorer)?;
    Ok(ConsistencyReport {
        sentence_id,
        mutant_id,
        metric: scorer.metric,
        score: c.score,
        threshold,
        is_bug: c.score < threshold,
        slices: c.slices,
    })
}
