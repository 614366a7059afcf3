//! Corpus engineering and MT evaluation toolkit for Ge'ez-script languages.
//!
//! The crate covers the full desk workflow for building and judging
//! English–Tigrinya (or other Ethiopic-script) translation data:
//!
//! * [`script_norm`] — Ethiopic script classification and canonicalization.
//! * [`subword`] — deterministic BPE subword tokenizer with a SentencePiece-
//!   style word-boundary marker and protected affix boundaries.
//! * [`corpus`] — parallel-corpus ingestion, cleaning, alignment auditing,
//!   deterministic splitting, and per-domain statistics.
//! * [`metrics`] — corpus BLEU and chrF with exposed components.
//! * [`stats_sig`] — paired bootstrap significance with Bonferroni correction.
//! * [`report`] — benchmark score tables and baseline-vs-candidate reports.
//!
//! Everything randomized (splits, resampling) runs on the pinned PRNG in
//! [`rng`], so results reproduce bit for bit across machines and across
//! faithful reimplementations.

pub mod corpus;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod script_norm;
pub mod stats_sig;
pub mod subword;

/// Serialized tokenizer model format version.
pub const MODEL_FORMAT_VERSION: &str = "1";
