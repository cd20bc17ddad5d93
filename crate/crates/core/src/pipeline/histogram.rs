use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::metrics::Metric;

/// Twenty buckets of width 0.05 over [0, 1) plus one for exactly 1.0.
pub const BUCKETS: usize = 21;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Histogram {
    pub counts: BTreeMap<Metric, [usize; BUCKETS]>,
    /// Lines that did not parse as a report.
    pub skipped: usize,
}

pub fn bucket(score: f64) -> usize {
    if score >= 1.0 {
        return BUCKETS - 1;
    }
    ((score * 20.0 + 1e-9).floor().max(0.0) as usize).min(BUCKETS - 2)
}

pub fn bucket_label(b: usize) -> String {
    if b == BUCKETS - 1 {
        "1.00".to_string()
    } else {
        format!("[{:.2},{:.2})", b as f64 * 0.05, (b + 1) as f64 * 0.05)
    }
}

#[derive(Deserialize)]
struct ScoreLine {
    metric: Metric,
    score: f64,
}

impl Histogram {
    pub fn add(&mut self, metric: Metric, score: f64) {
        self.counts.entry(metric).or_insert([0; BUCKETS])[bucket(score)] += 1;
    }

    /// Reads report JSONL; malformed lines are counted and skipped.
    pub fn from_reports(text: &str) -> Self {
        let mut h = Histogram::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<ScoreLine>(line) {
                Ok(r) => h.add(r.metric, r.score),
                Err(e) => {
                    log::warn!("reports line {}: {e}; skipped", i + 1);
                    h.skipped += 1;
                }
            }
        }
        h
    }

    pub fn non_empty(&self, metric: Metric) -> Vec<(String, usize)> {
        self.counts
            .get(&metric)
            .map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(b, &n)| (bucket_label(b), n))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// `metric,bucket,count` rows for every bucket.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,bucket,count\n");
        for (metric, counts) in &self.counts {
            for (b, n) in counts.iter().enumerate() {
                let _ = writeln!(out, "{metric},\"{}\",{n}", bucket_label(b));
            }
        }
        out
    }
}
