//! Corpus chrF: character n-gram F-score (β weights recall), robust for
//! morphologically rich languages where word-level BLEU is too coarse.

use super::{check_paired, MetricsError};
use serde::Serialize;
use std::collections::HashMap;

pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_MAX_N: usize = 6;

/// chrF result with per-order F-scores exposed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChrfScore {
    pub score: f64,
    pub beta: f64,
    pub max_n: usize,
    /// F-scores for orders 1..=k, where k is the highest order with any
    /// n-gram in hypothesis or reference; the score is their mean × 100.
    pub per_order_f: Vec<f64>,
}

/// Integer character n-gram statistics for one segment pair, whitespace
/// removed. Summing over segments and calling [`ChrfSegmentStats::score`]
/// reproduces `corpus_chrf` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChrfSegmentStats {
    pub matched: Vec<u64>,
    pub hyp_totals: Vec<u64>,
    pub ref_totals: Vec<u64>,
}

impl ChrfSegmentStats {
    pub fn empty(max_n: usize) -> Self {
        Self {
            matched: vec![0; max_n],
            hyp_totals: vec![0; max_n],
            ref_totals: vec![0; max_n],
        }
    }

    pub fn of(hypothesis: &str, reference: &str, max_n: usize) -> Self {
        let hyp: Vec<char> = hypothesis.chars().filter(|c| !c.is_whitespace()).collect();
        let reference: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
        let mut stats = Self::empty(max_n);
        for n in 1..=max_n {
            let hyp_counts = ngram_counts(&hyp, n);
            let ref_counts = ngram_counts(&reference, n);
            for (gram, count) in &hyp_counts {
                stats.matched[n - 1] += (*count).min(ref_counts.get(gram).copied().unwrap_or(0));
            }
            stats.hyp_totals[n - 1] = hyp_counts.values().sum();
            stats.ref_totals[n - 1] = ref_counts.values().sum();
        }
        stats
    }

    pub fn add(&mut self, other: &Self) {
        for n in 0..self.matched.len() {
            self.matched[n] += other.matched[n];
            self.hyp_totals[n] += other.hyp_totals[n];
            self.ref_totals[n] += other.ref_totals[n];
        }
    }

    /// Apply the chrF formula to aggregated counts. Orders with no n-grams on
    /// either side are excluded from the average; a per-order F with a zero
    /// denominator is 0.
    pub fn score(&self, beta: f64) -> ChrfScore {
        let beta_sq = beta * beta;
        let mut per_order_f = Vec::new();
        for n in 0..self.matched.len() {
            if self.hyp_totals[n] == 0 && self.ref_totals[n] == 0 {
                break; // n-gram presence is contiguous from order 1
            }
            let precision = if self.hyp_totals[n] > 0 {
                self.matched[n] as f64 / self.hyp_totals[n] as f64
            } else {
                0.0
            };
            let recall = if self.ref_totals[n] > 0 {
                self.matched[n] as f64 / self.ref_totals[n] as f64
            } else {
                0.0
            };
            let denominator = beta_sq * precision + recall;
            per_order_f.push(if denominator > 0.0 {
                (1.0 + beta_sq) * precision * recall / denominator
            } else {
                0.0
            });
        }
        let score = if per_order_f.is_empty() {
            0.0
        } else {
            100.0 * per_order_f.iter().sum::<f64>() / per_order_f.len() as f64
        };
        ChrfScore {
            score,
            beta,
            max_n: self.matched.len(),
            per_order_f,
        }
    }
}

fn ngram_counts(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut counts = HashMap::new();
    if chars.len() >= n {
        for window in chars.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// chrF with the standard published defaults (β = 2, n = 1..6).
pub fn corpus_chrf(
    hypotheses: &[impl AsRef<str>],
    references: &[impl AsRef<str>],
) -> Result<ChrfScore, MetricsError> {
    corpus_chrf_with(hypotheses, references, DEFAULT_BETA, DEFAULT_MAX_N)
}

/// chrF with explicit recall weight and maximum n-gram order.
pub fn corpus_chrf_with(
    hypotheses: &[impl AsRef<str>],
    references: &[impl AsRef<str>],
    beta: f64,
    max_n: usize,
) -> Result<ChrfScore, MetricsError> {
    check_paired(hypotheses, references)?;
    let mut total = ChrfSegmentStats::empty(max_n);
    for (hyp, reference) in hypotheses.iter().zip(references) {
        total.add(&ChrfSegmentStats::of(hyp.as_ref(), reference.as_ref(), max_n));
    }
    Ok(total.score(beta))
}

impl ChrfScore {
    pub fn render_text(&self) -> String {
        format!("chrF = {:.2}", self.score)
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "metric": "chrf",
            "score": self.score,
            "beta": self.beta,
            "max_n": self.max_n,
            "per_order_f": self.per_order_f,
        })
        .to_string()
    }
}
