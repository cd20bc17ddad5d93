//! Metamorphic consistency testing and black-box repair for machine
//! translation systems.

pub mod aligner;
pub mod diff;
pub mod embedding;
pub mod error;
pub mod metrics;
pub mod mutation;
pub mod oracle;
pub mod pipeline;
pub mod repair;
pub mod tagger;
pub mod text;
pub mod translator;

pub use aligner::{AlignmentTable, Aligner, LexiconAligner, LexiconModel, PrecomputedAligner};
pub use diff::{DiffSlices, Slice};
pub use embedding::{Embeddings, SimilarPair, SimilarityCorpus};
pub use error::{Error, Result};
pub use metrics::{IdfTable, Metric, Scorer};
pub use mutation::{FilterMode, MutantBatch, MutantSentence};
pub use oracle::{ConsistencyReport, ConsistencyScore, ThresholdSet};
pub use repair::{Candidate, CandidateSet, Origin, RepairMode, RepairOutcome, RepairStatus};
pub use tagger::{LexiconTagger, PosTagger, TaggedSentence};
pub use text::{LanguageProfile, Tokenization};
pub use translator::{TranslateError, TranslationRecord, TranslatorClient, TranslatorProfile};
pub use pipeline::{run_pipeline, Pipeline, RunConfig, RunSummary, Stage};
