//! Context-similar word replacement with structural filtering.

use serde::{Deserialize, Serialize};

use crate::embedding::SimilarityCorpus;
use crate::error::{Error, Result};
use crate::tagger::{is_replaceable_tag, PosTagger, TaggedSentence};

/// How much of the re-tagged mutant must match the original tags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    /// Only the replaced position.
    Word,
    /// Every position.
    #[default]
    Sentence,
}

impl std::str::FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "word" => Ok(FilterMode::Word),
            "sentence" => Ok(FilterMode::Sentence),
            other => Err(Error::Config(format!("unknown filter mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantSentence {
    pub original: TaggedSentence,
    pub mutated_index: usize,
    pub original_word: String,
    pub replacement_word: String,
    pub passed_filter: bool,
}

impl MutantSentence {
    pub fn tokens(&self) -> Vec<String> {
        let mut toks = self.original.tokens.clone();
        toks[self.mutated_index] = self.replacement_word.clone();
        toks
    }
}

/// Mutants that passed the filter, plus how many candidates were examined.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MutantBatch {
    pub mutants: Vec<MutantSentence>,
    pub generated: usize,
    pub rejected: usize,
}

/// Re-tags the mutant and compares against the original tags.
/// A tagger failure rejects the mutant.
pub fn structural_filter(
    s: &TaggedSentence,
    mutant: &MutantSentence,
    tagger: &dyn PosTagger,
    mode: FilterMode,
) -> bool {
    let tags = match tagger.tag(&mutant.tokens()) {
        Ok(tags) if tags.len() == s.tags.len() => tags,
        Ok(tags) => {
            log::warn!(
                "tagger returned {} tags for {} tokens; mutant rejected",
                tags.len(),
                s.tags.len()
            );
            return false;
        }
        Err(e) => {
            log::warn!("tagger failed on mutant: {e}; mutant rejected");
            return false;
        }
    };
    match mode {
        FilterMode::Word => tags[mutant.mutated_index] == s.tags[mutant.mutated_index],
        FilterMode::Sentence => tags == s.tags,
    }
}

fn replacements(corpus: &SimilarityCorpus, word: &str) -> Vec<String> {
    let direct = corpus.lookup(word);
    if !direct.is_empty() {
        return direct.into_iter().map(|(w, _)| w).collect();
    }
    // Capitalised sentence-initial words fall back to the lowercase entry and
    // carry their capitalisation over ("Two" -> "Six").
    let lower = word.to_lowercase();
    if lower == word {
        return Vec::new();
    }
    corpus
        .lookup(&lower)
        .into_iter()
        .map(|(w, _)| capitalize(&w))
        .collect()
}

fn capitalize(w: &str) -> String {
    let mut chars = w.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Scans tokens left to right. Every noun, adjective or number is replaced by
/// each of its corpus partners in lookup order; candidates that survive the
/// structural filter are kept until `max_mutants` have been collected.
pub fn generate_mutants(
    s: &TaggedSentence,
    corpus: &SimilarityCorpus,
    max_mutants: usize,
    tagger: &dyn PosTagger,
    mode: FilterMode,
) -> Result<MutantBatch> {
    if max_mutants == 0 {
        return Err(Error::InvalidInput("max_mutants must be at least 1".into()));
    }
    let mut batch = MutantBatch::default();
    for (i, (tok, tag)) in s.tokens.iter().zip(&s.tags).enumerate() {
        if !is_replaceable_tag(tag) {
            continue;
        }
        for replacement in replacements(corpus, tok) {
            if replacement == *tok {
                continue;
            }
            let mut m = MutantSentence {
                original: s.clone(),
                mutated_index: i,
                original_word: tok.clone(),
                replacement_word: replacement,
                passed_filter: false,
            };
            batch.generated += 1;
            m.passed_filter = structural_filter(s, &m, tagger, mode);
            if m.passed_filter {
                batch.mutants.push(m);
                if batch.mutants.len() == max_mutants {
                    return Ok(batch);
                }
            } else {
                batch.rejected += 1;
            }
        }
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::SimilarPair;
    use crate::tagger::{pos_tag, LexiconTagger};

    fn corpus(pairs: &[(&str, &str, f64)]) -> SimilarityCorpus {
        SimilarityCorpus::from_pairs(
            pairs.iter().map(|&(a, b, s)| SimilarPair {
                word_a: a.into(),
                word_b: b.into(),
                sim_model1: s,
                sim_model2: s,
            }),
            0.9,
        )
        .unwrap()
    }

    #[test]
    fn replaces_nouns() {
        let t = LexiconTagger::new();
        let s = pos_tag("boys play", &t).unwrap();
        let batch =
            generate_mutants(&s, &corpus(&[("boys", "girls", 0.95)]), 5, &t, FilterMode::Sentence)
                .unwrap();
        assert_eq!(batch.mutants.len(), 1);
        assert_eq!(batch.mutants[0].tokens(), ["girls", "play"]);
        assert_eq!(batch.generated, 1);
    }

    #[test]
    fn no_eligible_positions() {
        let t = LexiconTagger::new();
        let s = pos_tag("he is here", &t).unwrap();
        let c = corpus(&[("he", "she", 0.99), ("is", "was", 0.99)]);
        let batch = generate_mutants(&s, &c, 5, &t, FilterMode::Sentence).unwrap();
        assert!(batch.mutants.is_empty());
        assert_eq!(batch.generated, 0);
    }

    #[test]
    fn truncates_in_position_then_similarity_order() {
        let t = LexiconTagger::new();
        let s = pos_tag("good boys like cats", &t).unwrap();
        let c = corpus(&[
            ("cats", "dogs", 0.99),
            ("boys", "girls", 0.92),
            ("boys", "kids", 0.97),
            ("good", "nice", 0.91),
        ]);
        let one = generate_mutants(&s, &c, 1, &t, FilterMode::Sentence).unwrap();
        assert_eq!(one.mutants.len(), 1);
        assert_eq!(one.mutants[0].replacement_word, "nice");

        let all = generate_mutants(&s, &c, 5, &t, FilterMode::Sentence).unwrap();
        let order: Vec<_> = all.mutants.iter().map(|m| m.replacement_word.as_str()).collect();
        assert_eq!(order, ["nice", "kids", "girls", "dogs"]);
        assert!(generate_mutants(&s, &c, 0, &t, FilterMode::Sentence).is_err());
    }

    #[test]
    fn filter_rejects_a_good_another() {
        let t = LexiconTagger::new();
        let s = pos_tag("a good one", &t).unwrap();
        let m = MutantSentence {
            original: s.clone(),
            mutated_index: 2,
            original_word: "one".into(),
            replacement_word: "another".into(),
            passed_filter: false,
        };
        assert!(!structural_filter(&s, &m, &t, FilterMode::Sentence));
        assert!(!structural_filter(&s, &m, &t, FilterMode::Word));

        let batch = generate_mutants(&s, &corpus(&[("another", "one", 0.93)]), 5, &t, FilterMode::Sentence)
            .unwrap();
        assert!(batch.mutants.is_empty());
        assert_eq!((batch.generated, batch.rejected), (1, 1));
    }

    #[test]
    fn filter_modes_differ_on_context_shift() {
        // The replaced word keeps its tag but its neighbour is retagged.
        struct Shifty;
        impl PosTagger for Shifty {
            fn tag(&self, tokens: &[String]) -> Result<Vec<String>> {
                let mut tags = vec!["NNS".to_string(), "VBP".into(), "RB".into()];
                if tokens[0] == "dogs" {
                    tags[2] = "JJ".into();
                }
                Ok(tags)
            }
        }
        let toks = vec!["cats".to_string(), "run".into(), "fast".into()];
        let s = TaggedSentence::new(toks, vec!["NNS".into(), "VBP".into(), "RB".into()]).unwrap();
        let m = MutantSentence {
            original: s.clone(),
            mutated_index: 0,
            original_word: "cats".into(),
            replacement_word: "dogs".into(),
            passed_filter: false,
        };
        assert!(structural_filter(&s, &m, &Shifty, FilterMode::Word));
        assert!(!structural_filter(&s, &m, &Shifty, FilterMode::Sentence));
    }

    #[test]
    fn filter_rejects_cd_to_noun() {
        let t = LexiconTagger::new();
        let s = pos_tag("4 cats", &t).unwrap();
        let m = MutantSentence {
            original: s.clone(),
            mutated_index: 0,
            original_word: "4".into(),
            replacement_word: "some".into(),
            passed_filter: false,
        };
        assert!(!structural_filter(&s, &m, &t, FilterMode::Word));
    }

    #[test]
    fn tagger_failure_rejects() {
        struct Broken;
        impl PosTagger for Broken {
            fn tag(&self, _: &[String]) -> Result<Vec<String>> {
                Err(Error::Tagger("down".into()))
            }
        }
        let s = TaggedSentence::new(vec!["cats".into()], vec!["NNS".into()]).unwrap();
        let m = MutantSentence {
            original: s.clone(),
            mutated_index: 0,
            original_word: "cats".into(),
            replacement_word: "dogs".into(),
            passed_filter: false,
        };
        assert!(!structural_filter(&s, &m, &Broken, FilterMode::Sentence));
    }

    #[test]
    fn capitalised_initial_word_uses_lowercase_entry() {
        let t = LexiconTagger::new();
        let s = pos_tag("Two earthquakes", &t).unwrap();
        let batch = generate_mutants(&s, &corpus(&[("six", "two", 0.95)]), 5, &t, FilterMode::Sentence)
            .unwrap();
        assert_eq!(batch.mutants[0].tokens(), ["Six", "earthquakes"]);
    }
}
