use proptest::prelude::*;

use transcheck_core::aligner::{get_translated_word, train_lexicon, AlignmentTable, Link};
use transcheck_core::diff::{splice, word_diff};
use transcheck_core::embedding::{SimilarPair, SimilarityCorpus};
use transcheck_core::metrics::{bleu_metric, build_idf, ed_metric, lcs_metric, tfidf_metric};
use transcheck_core::mutation::{generate_mutants, FilterMode};
use transcheck_core::oracle::{consistency_score, f_measure, learn_thresholds, LabeledScores};
use transcheck_core::pipeline::histogram::bucket;
use transcheck_core::repair::map_back;
use transcheck_core::tagger::{pos_tag, LexiconTagger, PosTagger};
use transcheck_core::{Metric, Scorer};

fn sentence(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec((0u8..8).prop_map(|i| format!("w{i}")), 1..=max)
}

fn common_of(tokens: &[String], slices: &[transcheck_core::Slice]) -> Vec<String> {
    let mut keep = vec![true; tokens.len()];
    for s in slices {
        keep[s.start..s.end()].fill(false);
    }
    tokens.iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t.clone()).collect()
}

fn diagonal(n: usize) -> AlignmentTable {
    AlignmentTable::new(
        (0..n)
            .map(|i| Link {
                source: i,
                target: i,
                confidence: 1.0,
            })
            .collect(),
    )
}

proptest! {
    #[test]
    fn lcs_and_ed_are_bounded_and_symmetric(a in sentence(12), b in sentence(12)) {
        for f in [lcs_metric::<String>, ed_metric::<String>] {
            let v = f(&a, &b);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v, f(&b, &a));
            prop_assert_eq!(f(&a, &a), 1.0);
        }
        let longest = a.len().max(b.len()) as f64;
        let lcs = lcs_metric(&a, &b) * longest;
        let ed = (1.0 - ed_metric(&a, &b)) * longest;
        prop_assert!(ed + 1e-9 >= longest - lcs);
    }

    #[test]
    fn bleu_and_tfidf_are_bounded_and_symmetric(a in sentence(12), b in sentence(12)) {
        let bleu = bleu_metric(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&bleu));
        prop_assert_eq!(bleu, bleu_metric(&b, &a).unwrap());
        let idf = build_idf([a.clone(), b.clone()]);
        let t = tfidf_metric(&a, &b, &idf).value;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t));
        prop_assert!((t - tfidf_metric(&b, &a, &idf).value).abs() < 1e-12);
    }

    #[test]
    fn diff_slices_rebuild_both_sides(a in sentence(15), b in sentence(15)) {
        let d = word_diff(&a, &b);
        let common = common_of(&a, &d.slices_a);
        prop_assert_eq!(&common, &common_of(&b, &d.slices_b));
        prop_assert_eq!(&splice(&common, &d.slices_a), &a);
        prop_assert_eq!(&splice(&common, &d.slices_b), &b);
        prop_assert!(d.slices_a.iter().chain(&d.slices_b).all(|s| !s.is_empty()));
    }

    #[test]
    fn consistency_score_dominates_and_is_symmetric(a in sentence(15), b in sentence(15)) {
        for metric in [Metric::Lcs, Metric::Ed, Metric::Bleu] {
            let scorer = Scorer::new(metric, None);
            let ab = consistency_score(&a, &b, &scorer).unwrap().score;
            prop_assert!(ab >= scorer.score(&a, &b));
            prop_assert_eq!(ab, consistency_score(&b, &a, &scorer).unwrap().score);
            prop_assert!(ab <= 1.0 + 1e-12);
            prop_assert!((consistency_score(&a, &a, &scorer).unwrap().score - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn learned_threshold_maximises_f(samples in prop::collection::vec((0.7f64..1.0, any::<bool>()), 2..60)) {
        prop_assume!(samples.iter().any(|s| s.1) && samples.iter().any(|s| !s.1));
        let labeled: Vec<LabeledScores> = samples
            .iter()
            .map(|&(s, c)| LabeledScores { scores: [(Metric::Lcs, s)].into(), consistent: c })
            .collect();
        let set = learn_thresholds(&labeled, 0.01).unwrap();
        let e = set.entries[&Metric::Lcs];
        prop_assert!((0.8 - 1e-9..=1.0 + 1e-9).contains(&e.threshold));
        for k in 0..=20 {
            let t = 0.8 + k as f64 * 0.01;
            prop_assert!(f_measure(&samples, t) <= e.f_measure.unwrap() + 1e-12);
        }
    }

    #[test]
    fn histogram_buckets_are_monotone(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(bucket(lo) <= bucket(hi));
        prop_assert!(bucket(hi) < 21);
    }

    #[test]
    fn lexicon_model_stays_normalised(corpus in prop::collection::vec((sentence(6), sentence(6)), 1..20)) {
        let model = train_lexicon(&corpus, 5).unwrap();
        prop_assert!(model.max_normalization_drift() <= 1e-9);
    }

    #[test]
    fn translated_span_covers_links(targets in prop::collection::btree_set(0usize..10, 1..4), len in 10usize..12) {
        let t: Vec<String> = (0..len).map(|i| format!("t{i}")).collect();
        let table = AlignmentTable::new(
            targets.iter().map(|&j| Link { source: 0, target: j, confidence: 1.0 }).collect(),
        );
        let span = get_translated_word(0, &table, &t).unwrap();
        prop_assert_eq!(span.start, *targets.iter().next().unwrap());
        prop_assert_eq!(span.end, targets.iter().next_back().unwrap() + 1);
        prop_assert_eq!(span.low_confidence, targets.len() != span.end - span.start);
        prop_assert!(get_translated_word(1, &table, &t).is_none());
    }

    #[test]
    fn map_back_edits_one_span(s in sentence(8), k in 0usize..8, replacement in "[a-z]{3}") {
        let k = k % s.len();
        let mut s_r = s.clone();
        s_r[k] = format!("r{replacement}");
        let t_s: Vec<String> = s.iter().map(|w| w.to_uppercase()).collect();
        let t_sr: Vec<String> = s_r.iter().map(|w| w.to_uppercase()).collect();
        let out = map_back(&t_s, &t_sr, &s, &s_r, &diagonal(s.len()), &diagonal(s.len())).unwrap();
        prop_assert_eq!(out, t_s);
    }

    #[test]
    fn mutants_are_single_eligible_edits(idx in prop::collection::vec(0usize..12, 2..8)) {
        const WORDS: [&str; 12] = ["the", "good", "big", "man", "cat", "cats", "likes", "two", "nice", "dog", "large", "very"];
        let sentence: Vec<&str> = idx.iter().map(|&i| WORDS[i]).collect();
        let corpus = SimilarityCorpus::from_pairs(
            [("good", "nice"), ("big", "large"), ("cat", "dog"), ("cat", "cats"), ("man", "two")]
                .into_iter()
                .map(|(a, b)| SimilarPair { word_a: a.into(), word_b: b.into(), sim_model1: 0.95, sim_model2: 0.95 }),
            0.9,
        ).unwrap();
        let tagger = LexiconTagger::new();
        let tagged = pos_tag(&sentence.join(" "), &tagger).unwrap();
        let batch = generate_mutants(&tagged, &corpus, 5, &tagger, FilterMode::Sentence).unwrap();
        prop_assert!(batch.mutants.len() <= 5);
        prop_assert_eq!(batch.generated, batch.mutants.len() + batch.rejected);
        for m in &batch.mutants {
            let toks = m.tokens();
            let changed: Vec<usize> = (0..toks.len()).filter(|&i| toks[i] != tagged.tokens[i]).collect();
            prop_assert_eq!(changed, vec![m.mutated_index]);
            let tag = &tagged.tags[m.mutated_index];
            prop_assert!(tag.starts_with("NN") || tag.starts_with("JJ") || tag == "CD");
            prop_assert_eq!(tagger.tag(&toks).unwrap(), tagged.tags.clone());
        }
    }
}
