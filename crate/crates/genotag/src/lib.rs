//! Part-of-speech disambiguation for inflected languages, built around the
//! genotype: the set of tags a word form can bear according to
//! morphological analysis. Negative constraints remove illegal readings
//! next to unambiguous anchor words, and n-gram decision tables estimated
//! over genotype sequences (never over word forms) resolve what remains,
//! each decision scored by a binomial strength measure.
//!
//! The [`pipeline`] module composes the operators in any user-chosen
//! order; the `genotag` binary exposes the train/tag/eval/stats workflow.

pub mod constraints;
pub mod error;
pub mod eval;
pub mod morphology;
pub mod pipeline;
pub mod preprocess;
pub mod stats;
pub mod synth;
pub mod tag;

pub use error::{Error, Result};
pub use morphology::{AnalyzedToken, Lexicon, ProperNounDict};
pub use pipeline::{Resources, Schedule};
pub use stats::{Decision, DecisionTable, Model};
pub use tag::{Genotype, Tag, TagPattern, TagsetMap};
