//! A deterministic mock-translator world with planted inconsistencies.
//!
//! Sentences read `subject verb adjective object`. The mock translates word
//! by word into upper case, except that "good" becomes BAD whenever "women"
//! is in the sentence. Planted sentences pair "women" with "good"; clean
//! sentences are chosen so that no single context-similar replacement can
//! bring the two together.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub const TRIGGER: &str = "women";
pub const VICTIM: &str = "good";
pub const WOMEN_PARTNERS: [&str; 9] = [
    "men", "girls", "boys", "kids", "children", "people", "students", "teachers", "parents",
];
pub const GOOD_PARTNERS: [&str; 3] = ["nice", "great", "fine"];
pub const OTHER_SUBJECTS: [&str; 6] = ["doctors", "nurses", "workers", "farmers", "artists", "friends"];
pub const NEUTRAL_ADJS: [&str; 10] = [
    "new", "old", "big", "small", "important", "different", "special", "real", "strong", "hard",
];
pub const FREE_ADJS: [&str; 6] = ["good", "nice", "great", "fine", "new", "big"];
pub const VERBS: [&str; 6] = ["do", "like", "make", "need", "want", "see"];
pub const OBJECTS: [&str; 15] = [
    "research", "work", "food", "music", "art", "science", "history", "education", "business",
    "information", "health", "money", "water", "time", "power",
];

pub struct Scenario {
    pub sentences: Vec<String>,
    pub planted: Vec<bool>,
}

impl Scenario {
    /// `n` sentences of which `p` are planted, spread evenly.
    pub fn new(n: usize, p: usize) -> Self {
        let (mut sentences, mut planted) = (Vec::new(), Vec::new());
        let (mut pi, mut ci) = (0usize, 0usize);
        for k in 0..n {
            if (k * p) % n < p {
                sentences.push(format!(
                    "{TRIGGER} {} {VICTIM} {}",
                    VERBS[pi % VERBS.len()],
                    OBJECTS[pi % OBJECTS.len()]
                ));
                planted.push(true);
                pi += 1;
            } else {
                let j = ci;
                let (subject, adj) = if j % 2 == 0 {
                    let subjects: Vec<&str> = std::iter::once(TRIGGER).chain(WOMEN_PARTNERS).collect();
                    (subjects[(j / 2) % subjects.len()], NEUTRAL_ADJS[(j / 2) % NEUTRAL_ADJS.len()])
                } else {
                    (OTHER_SUBJECTS[(j / 2) % OTHER_SUBJECTS.len()], FREE_ADJS[(j / 2) % FREE_ADJS.len()])
                };
                sentences.push(format!(
                    "{subject} {} {adj} {}",
                    VERBS[(j * 5 + 1) % VERBS.len()],
                    OBJECTS[(j * 7 + 3) % OBJECTS.len()]
                ));
                planted.push(false);
                ci += 1;
            }
        }
        Scenario { sentences, planted }
    }

    pub fn planted_ids(&self) -> Vec<usize> {
        (0..self.planted.len()).filter(|&i| self.planted[i]).collect()
    }
}

/// What the mock would output with the injection switched off.
pub fn clean_translation(sentence: &str) -> String {
    sentence
        .split_whitespace()
        .map(str::to_uppercase)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn vocabulary() -> Vec<&'static str> {
    let mut v: Vec<&str> = [TRIGGER, VICTIM, "large", "little"]
        .into_iter()
        .chain(WOMEN_PARTNERS)
        .chain(GOOD_PARTNERS)
        .chain(OTHER_SUBJECTS)
        .chain(NEUTRAL_ADJS)
        .chain(FREE_ADJS)
        .chain(VERBS)
        .chain(OBJECTS)
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn mock_rules() -> String {
    let mut out = String::new();
    for w in vocabulary() {
        out.push_str(&format!("{w} -> {}\n", w.to_uppercase()));
    }
    out.push_str(&format!("{VICTIM} -> BAD WHEN {TRIGGER}\n"));
    out.push_str("BAD = 0.3\n* = 0.9\n");
    out
}

pub fn corpus_tsv() -> String {
    let mut out = String::from("# threshold=0.9\n");
    for (k, w) in WOMEN_PARTNERS.iter().enumerate() {
        let s = 0.99 - 0.005 * k as f64;
        out.push_str(&format!("{TRIGGER}\t{w}\t{s:.3}\t{s:.3}\n"));
    }
    for (k, w) in GOOD_PARTNERS.iter().enumerate() {
        let s = 0.95 - 0.01 * k as f64;
        out.push_str(&format!("{VICTIM}\t{w}\t{s:.2}\t{s:.2}\n"));
    }
    out.push_str("doctors\tnurses\t0.93\t0.93\nworkers\tfarmers\t0.92\t0.92\n");
    out.push_str("big\tlarge\t0.92\t0.92\nsmall\tlittle\t0.91\t0.91\n");
    out
}

pub struct World {
    pub dir: tempfile::TempDir,
    pub scenario: Scenario,
}

impl World {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Writes sentences, corpus, mock rules, profile and a run config.
    pub fn create(n: usize, p: usize, extra_config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let scenario = Scenario::new(n, p);
        let d = dir.path();
        write(d, "sentences.txt", &(scenario.sentences.join("\n") + "\n"));
        write(d, "corpus.tsv", &corpus_tsv());
        write(d, "mock_rules.txt", &mock_rules());
        write(
            d,
            "profile.conf",
            "kind = mock\nbackend_id = mock-upper\nendpoint = mock_rules.txt\nsource = en\ntarget = en-x-upper\n\
             capabilities = black-box, grey-box\nrate_limit = 1000000\ntimeout = 5\n",
        );
        write(
            d,
            "run.conf",
            &format!(
                "input = sentences.txt\nsimilarity = corpus.tsv\nprofile = profile.conf\nout = out\n{extra_config}"
            ),
        );
        World { dir, scenario }
    }
}

pub fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}
