//! Corpus-level BLEU and chrF with every intermediate component exposed.
//!
//! Both scorers aggregate integer n-gram counts per segment and apply the
//! score formula once at the end, so parallel or resampled evaluation (see
//! the significance module) reproduces the sequential result exactly.

mod bleu;
mod chrf;

pub use bleu::{corpus_bleu, BleuScore, BleuSegmentStats};
pub use chrf::{corpus_chrf, corpus_chrf_with, ChrfScore, ChrfSegmentStats, DEFAULT_BETA, DEFAULT_MAX_N};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Which metric a score or comparison refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Bleu,
    Chrf,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Bleu => "bleu",
            MetricKind::Chrf => "chrf",
        })
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bleu" => Ok(MetricKind::Bleu),
            "chrf" => Ok(MetricKind::Chrf),
            other => Err(format!("unknown metric {other:?} (expected bleu or chrf)")),
        }
    }
}

/// Errors shared by both scorers.
#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("hypothesis and reference lists differ in length ({hyps} vs {refs})")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("cannot score an empty corpus")]
    Empty,
}

pub(crate) fn check_paired(hyps: &[impl AsRef<str>], refs: &[impl AsRef<str>]) -> Result<(), MetricsError> {
    if hyps.len() != refs.len() {
        return Err(MetricsError::LengthMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// BLEU's tokenization: detach every Unicode punctuation character (including
/// ፡ and ።) as its own token, then split on whitespace. Language-agnostic so
/// Ethiopic and Latin punctuation are treated symmetrically.
pub fn tokenize_for_bleu(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else if crate::script_norm::is_punctuation(c) {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(c.to_string());
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
