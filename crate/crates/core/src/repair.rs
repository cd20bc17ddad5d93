//! Candidate ranking, map-back and gated repair of inconsistent translations.

use serde::{Deserialize, Serialize};

use crate::aligner::{get_translated_word, Aligner, AlignmentTable};
use crate::error::{Error, Result};
use crate::metrics::Scorer;
use crate::oracle::consistency_score;
use crate::tagger::PosTagger;
use crate::text::LanguageProfile;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairMode {
    Probability,
    #[default]
    CrossReference,
}

impl RepairMode {
    pub fn name(self) -> &'static str {
        match self {
            RepairMode::Probability => "probability",
            RepairMode::CrossReference => "cross-reference",
        }
    }
}

impl std::str::FromStr for RepairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "probability" | "grey-box" | "greybox" => Ok(RepairMode::Probability),
            "cross-reference" | "crossreference" | "black-box" | "blackbox" => {
                Ok(RepairMode::CrossReference)
            }
            other => Err(Error::Config(format!("unknown repair mode {other:?}"))),
        }
    }
}

/// Where a candidate came from. Orders the original before every mutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Original,
    Mutant(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub origin: Origin,
    pub sentence: Vec<String>,
    pub translation: Vec<String>,
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    entries: Vec<Candidate>,
    /// Position at which each mutant differs from the original; `None` for
    /// the original itself.
    replaced: Vec<Option<usize>>,
    original: usize,
}

fn single_difference(a: &[String], b: &[String]) -> Option<usize> {
    if a.len() != b.len() {
        return None;
    }
    let mut diffs = a.iter().zip(b).enumerate().filter(|(_, (x, y))| x != y);
    match (diffs.next(), diffs.next()) {
        (Some((i, _)), None) => Some(i),
        _ => None,
    }
}

impl CandidateSet {
    pub fn new(entries: Vec<Candidate>) -> Result<Self> {
        let originals: Vec<usize> = entries
            .iter()
            .enumerate()
            .filter(|(_, c)| c.origin == Origin::Original)
            .map(|(i, _)| i)
            .collect();
        let [original] = originals[..] else {
            return Err(Error::InvalidInput(format!(
                "candidate set needs exactly one original, found {}",
                originals.len()
            )));
        };
        let mut replaced = Vec::with_capacity(entries.len());
        for c in &entries {
            if c.translation.is_empty() {
                return Err(Error::InvalidTranslation(format!("{:?} has an empty translation", c.origin)));
            }
            if let Some(p) = c.probability {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")));
                }
            }
            if c.origin == Origin::Original {
                replaced.push(None);
                continue;
            }
            match single_difference(&entries[original].sentence, &c.sentence) {
                Some(i) => replaced.push(Some(i)),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "{:?} does not differ from the original in exactly one token",
                        c.origin
                    )))
                }
            }
        }
        Ok(CandidateSet {
            entries,
            replaced,
            original,
        })
    }

    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn original(&self) -> &Candidate {
        &self.entries[self.original]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Entry indices, most probable first. Ties keep the original first, then
/// mutant ids ascending.
pub fn rank_by_probability(cands: &CandidateSet) -> Result<Vec<usize>> {
    let mut probs = Vec::with_capacity(cands.len());
    for c in cands.entries() {
        probs.push(c.probability.ok_or_else(|| {
            Error::GreyBoxUnavailable(format!("{:?} has no predictive probability", c.origin))
        })?);
    }
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| {
        probs[b]
            .total_cmp(&probs[a])
            .then(cands.entries[a].origin.cmp(&cands.entries[b].origin))
    });
    Ok(order)
}

/// Mean consistency score of each entry's translation against every other
/// entry's translation.
pub fn cross_reference_means(cands: &CandidateSet, scorer: &Scorer<'_>) -> Vec<f64> {
    let n = cands.len();
    let mut sums = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = pair_score(&cands.entries[i].translation, &cands.entries[j].translation, scorer);
            sums[i] += s;
            sums[j] += s;
        }
    }
    let others = n.saturating_sub(1).max(1) as f64;
    sums.into_iter().map(|s| s / others).collect()
}

fn pair_score(a: &[String], b: &[String], scorer: &Scorer<'_>) -> f64 {
    consistency_score(a, b, scorer).map(|c| c.score).unwrap_or(0.0)
}

/// Mean consistency of `translation` against each of `others`.
pub fn mean_consistency(translation: &[String], others: &[&[String]], scorer: &Scorer<'_>) -> f64 {
    if others.is_empty() {
        return 0.0;
    }
    others.iter().map(|o| pair_score(translation, o, scorer)).sum::<f64>() / others.len() as f64
}

/// Entry indices with their means, highest mean first. Ties keep the original
/// first, then mutant ids ascending.
pub fn rank_by_cross_reference(cands: &CandidateSet, scorer: &Scorer<'_>) -> Vec<(usize, f64)> {
    let means = cross_reference_means(cands, scorer);
    let mut order: Vec<(usize, f64)> = means.into_iter().enumerate().collect();
    order.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(cands.entries[a.0].origin.cmp(&cands.entries[b.0].origin))
    });
    order
}

fn differing_index(s: &[String], s_r: &[String]) -> Result<usize> {
    single_difference(s, s_r).ok_or_else(|| {
        Error::InvalidInput("sentences must differ in exactly one token".into())
    })
}

/// Replaces, in `t_sr`, the span aligned to the replacement word with the span
/// aligned to the original word in `t_s`.
pub fn map_back(
    t_s: &[String],
    t_sr: &[String],
    s: &[String],
    s_r: &[String],
    a_s: &AlignmentTable,
    a_sr: &AlignmentTable,
) -> Result<Vec<String>> {
    let i = differing_index(s, s_r)?;
    let from = get_translated_word(i, a_sr, t_sr).ok_or_else(|| {
        Error::MapBackUnavailable(format!("replacement {:?} is unaligned", s_r[i]))
    })?;
    let to = get_translated_word(i, a_s, t_s).ok_or_else(|| {
        Error::MapBackUnavailable(format!("original word {:?} is unaligned", s[i]))
    })?;
    let mut out = Vec::with_capacity(t_sr.len() - (from.end - from.start) + to.tokens.len());
    out.extend_from_slice(&t_sr[..from.start]);
    out.extend(to.tokens);
    out.extend_from_slice(&t_sr[from.end..]);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepairStatus {
    Repaired,
    KeptOriginal,
    NoCandidate,
}

impl RepairStatus {
    pub fn name(self) -> &'static str {
        match self {
            RepairStatus::Repaired => "repaired",
            RepairStatus::KeptOriginal => "kept-original",
            RepairStatus::NoCandidate => "no-candidate",
        }
    }
}

/// Gate results for one examined candidate; `None` means the gate was not
/// reached or does not apply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub candidate: Option<Origin>,
    pub numeric: Option<bool>,
    pub map_back: Option<bool>,
    /// The mapped-back translation differs from the input translation.
    pub changed: Option<bool>,
    pub structure: Option<bool>,
    pub consistency: Option<bool>,
    pub accepted: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairTarget {
    pub sentence_id: usize,
    /// `None` when the original sentence's translation is repaired.
    pub mutant_id: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub target: RepairTarget,
    pub mode: RepairMode,
    pub status: RepairStatus,
    pub chosen_candidate: Option<Origin>,
    pub input_translation: Vec<String>,
    pub repaired_translation: Vec<String>,
    pub gates: Vec<GateRecord>,
}

/// Everything the repair walk needs besides the candidates.
pub struct RepairContext<'a> {
    pub mode: RepairMode,
    pub scorer: Scorer<'a>,
    /// Consistency threshold of the scorer's metric.
    pub threshold: f64,
    pub source_profile: &'a LanguageProfile,
    pub target_profile: &'a LanguageProfile,
    pub target_tagger: &'a dyn PosTagger,
    pub aligner: &'a dyn Aligner,
}

/// Ranks the candidates and walks the ranking until the original is reached
/// or a candidate survives every gate. `repaired_original` is the already
/// repaired translation of the original sentence when the candidate set's
/// original is itself a mutant.
pub fn repair_translation(
    target: RepairTarget,
    cands: &CandidateSet,
    ctx: &RepairContext<'_>,
    repaired_original: Option<&[String]>,
) -> Result<RepairOutcome> {
    let me = cands.original();
    let mut outcome = RepairOutcome {
        target,
        mode: ctx.mode,
        status: RepairStatus::NoCandidate,
        chosen_candidate: None,
        input_translation: me.translation.clone(),
        repaired_translation: me.translation.clone(),
        gates: Vec::new(),
    };
    if cands.len() < 2 {
        return Ok(outcome);
    }
    let ranked: Vec<usize> = match ctx.mode {
        RepairMode::Probability => rank_by_probability(cands)?,
        RepairMode::CrossReference => rank_by_cross_reference(cands, &ctx.scorer)
            .into_iter()
            .map(|(i, _)| i)
            .collect(),
    };
    let a_s = ctx.aligner.align(&me.sentence, &me.translation)?;

    for (rank, &idx) in ranked.iter().enumerate() {
        let cand = &cands.entries[idx];
        if idx == cands.original {
            if rank == 0 {
                outcome.status = RepairStatus::KeptOriginal;
                outcome.chosen_candidate = Some(Origin::Original);
            }
            break;
        }
        let mut gate = GateRecord {
            candidate: Some(cand.origin),
            ..Default::default()
        };
        let result = examine(ctx, me, cand, cands.replaced[idx], &a_s, repaired_original, &mut gate);
        match result {
            Ok(Some(repaired)) => {
                gate.accepted = true;
                outcome.gates.push(gate);
                outcome.status = RepairStatus::Repaired;
                outcome.chosen_candidate = Some(cand.origin);
                outcome.repaired_translation = repaired;
                return Ok(outcome);
            }
            Ok(None) => {}
            Err(Error::MapBackUnavailable(msg)) => {
                gate.map_back = Some(false);
                gate.note = Some(msg);
            }
            Err(e) => return Err(e),
        }
        log::debug!(
            "candidate {:?} skipped for sentence {}: {gate:?}",
            cand.origin,
            outcome.target.sentence_id
        );
        outcome.gates.push(gate);
    }
    Ok(outcome)
}

/// Runs the gates in order; `Ok(None)` means a gate rejected the candidate.
fn examine(
    ctx: &RepairContext<'_>,
    me: &Candidate,
    cand: &Candidate,
    replaced: Option<usize>,
    a_s: &AlignmentTable,
    repaired_original: Option<&[String]>,
    gate: &mut GateRecord,
) -> Result<Option<Vec<String>>> {
    let i = replaced.expect("mutant entries carry their replaced index");
    let a_sr = ctx.aligner.align(&cand.sentence, &cand.translation)?;

    let (Some(t_w), Some(t_wr)) = (
        get_translated_word(i, a_s, &me.translation),
        get_translated_word(i, &a_sr, &cand.translation),
    ) else {
        return Err(Error::MapBackUnavailable(format!(
            "{:?} or {:?} is unaligned",
            me.sentence[i], cand.sentence[i]
        )));
    };
    let w_numeric = ctx.source_profile.is_numeral(&me.sentence[i]);
    let wr_numeric = ctx.source_profile.is_numeral(&cand.sentence[i]);
    let numeric_ok = w_numeric == ctx.target_profile.is_numeric(&t_w.tokens)
        && wr_numeric == ctx.target_profile.is_numeric(&t_wr.tokens);
    gate.numeric = Some(numeric_ok);
    if !numeric_ok {
        return Ok(None);
    }

    let repaired = map_back(&me.translation, &cand.translation, &me.sentence, &cand.sentence, a_s, &a_sr)?;
    gate.map_back = Some(true);
    let changed = repaired != me.translation;
    gate.changed = Some(changed);
    if !changed {
        return Ok(None);
    }

    if !wr_numeric {
        let before = ctx.target_tagger.tag(&cand.translation);
        let after = ctx.target_tagger.tag(&repaired);
        let same = match (before, after) {
            (Ok(b), Ok(a)) => a == b,
            (Err(e), _) | (_, Err(e)) => {
                gate.note = Some(format!("target tagger failed: {e}"));
                false
            }
        };
        gate.structure = Some(same);
        if !same {
            return Ok(None);
        }
    }

    if let Some(orig) = repaired_original {
        let score = pair_score(orig, &repaired, &ctx.scorer);
        let consistent = score >= ctx.threshold;
        gate.consistency = Some(consistent);
        if !consistent {
            gate.note = Some(format!("consistency {score:.4} below {}", ctx.threshold));
            return Ok(None);
        }
    }
    Ok(Some(repaired))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Metric;
    use crate::tagger::LexiconTagger;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    /// Links position i to position i.
    struct Diagonal;
    impl Aligner for Diagonal {
        fn align(&self, source: &[String], target: &[String]) -> Result<AlignmentTable> {
            let n = source.len().min(target.len());
            Ok(AlignmentTable::new(
                (0..n)
                    .map(|i| crate::aligner::Link {
                        source: i,
                        target: i,
                        confidence: 1.0,
                    })
                    .collect(),
            ))
        }
    }

    fn cand(origin: Origin, s: &str, t: &str, p: Option<f64>) -> Candidate {
        Candidate {
            origin,
            sentence: toks(s),
            translation: toks(t),
            probability: p,
        }
    }

    const LCS: Scorer<'static> = Scorer {
        metric: Metric::Lcs,
        idf: None,
    };

    #[test]
    fn candidate_set_validation() {
        let ok = CandidateSet::new(vec![
            cand(Origin::Original, "a b", "X Y", None),
            cand(Origin::Mutant(0), "a c", "X Z", None),
        ]);
        assert!(ok.is_ok());
        let two_edits = CandidateSet::new(vec![
            cand(Origin::Original, "a b", "X Y", None),
            cand(Origin::Mutant(0), "c d", "X Z", None),
        ]);
        assert!(two_edits.is_err());
        let no_original = CandidateSet::new(vec![cand(Origin::Mutant(0), "a", "X", None)]);
        assert!(no_original.is_err());
    }

    #[test]
    fn probability_ranking() {
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "a", "X", Some(0.5)),
            cand(Origin::Mutant(1), "b", "Y", Some(0.7)),
            cand(Origin::Mutant(2), "c", "Z", Some(0.6)),
        ])
        .unwrap();
        assert_eq!(rank_by_probability(&set).unwrap(), [1, 2, 0]);

        let tied = CandidateSet::new(vec![
            cand(Origin::Mutant(2), "c", "Z", Some(0.5)),
            cand(Origin::Mutant(1), "b", "Y", Some(0.5)),
            cand(Origin::Original, "a", "X", Some(0.5)),
        ])
        .unwrap();
        assert_eq!(rank_by_probability(&tied).unwrap(), [2, 1, 0]);

        let missing = CandidateSet::new(vec![
            cand(Origin::Original, "a", "X", Some(0.5)),
            cand(Origin::Mutant(1), "b", "Y", None),
        ])
        .unwrap();
        assert!(matches!(rank_by_probability(&missing), Err(Error::GreyBoxUnavailable(_))));
    }

    #[test]
    fn cross_reference_ranking() {
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "a x", "P Q R S T", None),
            cand(Origin::Mutant(1), "b x", "A B C D E", None),
            cand(Origin::Mutant(2), "c x", "A B C D E", None),
            cand(Origin::Mutant(3), "d x", "A B C D E", None),
        ])
        .unwrap();
        let ranked = rank_by_cross_reference(&set, &LCS);
        assert_eq!(ranked[0].0, 1);
        assert_eq!(ranked.last().unwrap().0, 0);
        // Brute-force mean for the divergent original.
        let others: Vec<&[String]> = set.entries()[1..].iter().map(|c| c.translation.as_slice()).collect();
        let brute = mean_consistency(&set.entries()[0].translation, &others, &LCS);
        assert_eq!(ranked.last().unwrap().1, brute);

        let pair = CandidateSet::new(vec![
            cand(Origin::Mutant(1), "b", "Y Z", None),
            cand(Origin::Original, "a", "X", None),
        ])
        .unwrap();
        let ranked = rank_by_cross_reference(&pair, &LCS);
        assert_eq!(ranked[0].0, 1);
        assert_eq!(ranked[0].1, ranked[1].1);
    }

    #[test]
    fn map_back_substitutes_span() {
        let a = AlignmentTable::parse_pharaoh("0-0 1-1").unwrap();
        let out = map_back(
            &toks("G W"),
            &toks("F W"),
            &toks("good work"),
            &toks("fine work"),
            &a,
            &a,
        )
        .unwrap();
        assert_eq!(out, toks("G W"));

        let out = map_back(
            &toks("VIER KATZEN"),
            &toks("6 KATZEN"),
            &toks("4 cats"),
            &toks("6 cats"),
            &a,
            &a,
        )
        .unwrap();
        assert_eq!(out, toks("VIER KATZEN"));

        let unaligned = AlignmentTable::parse_pharaoh("1-1").unwrap();
        let err = map_back(&toks("G W"), &toks("F W"), &toks("good work"), &toks("fine work"), &a, &unaligned);
        assert!(matches!(err, Err(Error::MapBackUnavailable(_))));
    }

    #[test]
    fn numeric_words() {
        let en = LanguageProfile::for_tag("en");
        assert!(en.is_numeric(&["4.4"]));
        assert!(en.is_numeric(&["two"]));
        assert!(!en.is_numeric(&["kind"]));
    }

    fn ctx<'a>(
        mode: RepairMode,
        profile: &'a LanguageProfile,
        tagger: &'a LexiconTagger,
    ) -> RepairContext<'a> {
        RepairContext {
            mode,
            scorer: LCS,
            threshold: 0.963,
            source_profile: profile,
            target_profile: profile,
            target_tagger: tagger,
            aligner: &Diagonal,
        }
    }

    fn target() -> RepairTarget {
        RepairTarget {
            sentence_id: 0,
            mutant_id: None,
        }
    }

    #[test]
    fn original_first_keeps_translation() {
        let profile = LanguageProfile::for_tag("en");
        let tagger = LexiconTagger::new();
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "a b", "X Y", Some(0.9)),
            cand(Origin::Mutant(0), "a c", "X Z", Some(0.2)),
        ])
        .unwrap();
        let out = repair_translation(target(), &set, &ctx(RepairMode::Probability, &profile, &tagger), None)
            .unwrap();
        assert_eq!(out.status, RepairStatus::KeptOriginal);
        assert_eq!(out.repaired_translation, out.input_translation);
        assert!(out.gates.is_empty());
    }

    #[test]
    fn numeric_gate_skips_then_second_candidate_wins() {
        let profile = LanguageProfile::for_tag("en");
        let tagger = LexiconTagger::new();
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "I have 4 cats", "ICH HABE 4 HUNDE", Some(0.5)),
            cand(Origin::Mutant(0), "I have 6 cats", "ICH HABE SECHS KATZEN", Some(0.9)),
            cand(Origin::Mutant(1), "I have 5 cats", "ICH HABE 5 KATZEN", Some(0.8)),
        ])
        .unwrap();
        let out = repair_translation(target(), &set, &ctx(RepairMode::Probability, &profile, &tagger), None)
            .unwrap();
        assert_eq!(out.status, RepairStatus::Repaired);
        assert_eq!(out.chosen_candidate, Some(Origin::Mutant(1)));
        assert_eq!(out.repaired_translation, toks("ICH HABE 4 KATZEN"));
        assert_eq!(out.gates.len(), 2);
        assert_eq!(out.gates[0].numeric, Some(false));
        assert!(!out.gates[0].accepted);
        assert!(out.gates[1].accepted);
        assert_eq!(out.gates[1].structure, None);
    }

    #[test]
    fn mutant_repair_conflicting_with_original_has_no_candidate() {
        let profile = LanguageProfile::for_tag("en");
        let tagger = LexiconTagger::new();
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "x y z", "X Y Q", Some(0.5)),
            cand(Origin::Mutant(0), "x w z", "X W Z", Some(0.9)),
        ])
        .unwrap();
        let repaired_original = toks("P Q R S");
        let out = repair_translation(
            RepairTarget {
                sentence_id: 0,
                mutant_id: Some(3),
            },
            &set,
            &ctx(RepairMode::Probability, &profile, &tagger),
            Some(&repaired_original),
        )
        .unwrap();
        assert_eq!(out.status, RepairStatus::NoCandidate);
        assert_eq!(out.repaired_translation, toks("X Y Q"));
        assert_eq!(out.gates[0].consistency, Some(false));
    }

    #[test]
    fn structure_gate_rejects_tag_change() {
        let profile = LanguageProfile::for_tag("en");
        let tagger = LexiconTagger::new();
        // "quickly" mapped over "cat" turns a noun slot into an adverb.
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "a b c", "the quickly sleep", Some(0.5)),
            cand(Origin::Mutant(0), "a d c", "the cat run", Some(0.9)),
        ])
        .unwrap();
        let out = repair_translation(target(), &set, &ctx(RepairMode::Probability, &profile, &tagger), None)
            .unwrap();
        assert_eq!(out.status, RepairStatus::NoCandidate);
        assert_eq!(out.gates[0].structure, Some(false));
    }

    #[test]
    fn unaligned_candidate_is_skipped() {
        struct Empty;
        impl Aligner for Empty {
            fn align(&self, _: &[String], _: &[String]) -> Result<AlignmentTable> {
                Ok(AlignmentTable::default())
            }
        }
        let profile = LanguageProfile::for_tag("en");
        let tagger = LexiconTagger::new();
        let mut c = ctx(RepairMode::Probability, &profile, &tagger);
        c.aligner = &Empty;
        let set = CandidateSet::new(vec![
            cand(Origin::Original, "a b", "X Y", Some(0.1)),
            cand(Origin::Mutant(0), "a c", "X Z", Some(0.9)),
        ])
        .unwrap();
        let out = repair_translation(target(), &set, &c, None).unwrap();
        assert_eq!(out.status, RepairStatus::NoCandidate);
        assert_eq!(out.gates[0].map_back, Some(false));
        assert!(out.gates[0].note.is_some());
    }
}
