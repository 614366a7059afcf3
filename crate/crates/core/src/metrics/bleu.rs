//! Corpus BLEU: geometric mean of clipped n-gram precisions (n = 1..4) times
//! a brevity penalty, scaled to [0, 100].

use super::{check_paired, tokenize_for_bleu, MetricsError};
use serde::Serialize;
use std::collections::HashMap;

pub const MAX_ORDER: usize = 4;

/// BLEU result with all components needed to audit the score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuScore {
    pub score: f64,
    /// Clipped precisions for n = 1..4, after smoothing.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_length: u64,
    pub ref_length: u64,
}

/// Integer n-gram statistics for one hypothesis/reference pair.
///
/// Summing these over any multiset of segments and applying
/// [`BleuSegmentStats::score`] reproduces `corpus_bleu` on that multiset
/// exactly; the bootstrap resampler relies on this.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BleuSegmentStats {
    pub clipped: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuSegmentStats {
    pub fn of(hypothesis: &str, reference: &str) -> Self {
        let hyp = tokenize_for_bleu(hypothesis);
        let reference = tokenize_for_bleu(reference);
        let mut stats = BleuSegmentStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let hyp_counts = ngram_counts(&hyp, n);
            let ref_counts = ngram_counts(&reference, n);
            for (gram, count) in &hyp_counts {
                let matched = (*count).min(ref_counts.get(gram).copied().unwrap_or(0));
                stats.clipped[n - 1] += matched;
                stats.totals[n - 1] += count;
            }
        }
        stats
    }

    pub fn add(&mut self, other: &Self) {
        for n in 0..MAX_ORDER {
            self.clipped[n] += other.clipped[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Apply the BLEU formula to aggregated counts.
    ///
    /// Smoothing: a corpus-level precision of zero is floored at
    /// 1/(2·hyp_ngram_count) for that order so the geometric mean never
    /// collapses to 0 on small corpora. An order where the hypothesis corpus
    /// has no n-grams at all (every segment shorter than n) is vacuous and
    /// counts as precision 1, which keeps score(X, X) = 100 even for
    /// corpora of very short segments.
    pub fn score(&self) -> BleuScore {
        let mut precisions = [0.0f64; MAX_ORDER];
        for (n, precision) in precisions.iter_mut().enumerate() {
            *precision = if self.totals[n] == 0 {
                1.0
            } else if self.clipped[n] > 0 {
                self.clipped[n] as f64 / self.totals[n] as f64
            } else {
                1.0 / (2.0 * self.totals[n] as f64)
            };
        }
        let brevity_penalty = if self.hyp_len >= self.ref_len {
            1.0
        } else if self.hyp_len == 0 {
            0.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        };
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
        let score = if self.hyp_len == 0 {
            0.0
        } else {
            100.0 * brevity_penalty * log_mean.exp()
        };
        BleuScore {
            score,
            precisions,
            brevity_penalty,
            hyp_length: self.hyp_len,
            ref_length: self.ref_len,
        }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Score a corpus of hypothesis/reference pairs (single reference per
/// segment, paired by index).
pub fn corpus_bleu(
    hypotheses: &[impl AsRef<str>],
    references: &[impl AsRef<str>],
) -> Result<BleuScore, MetricsError> {
    check_paired(hypotheses, references)?;
    let mut total = BleuSegmentStats::default();
    for (hyp, reference) in hypotheses.iter().zip(references) {
        total.add(&BleuSegmentStats::of(hyp.as_ref(), reference.as_ref()));
    }
    Ok(total.score())
}

impl BleuScore {
    /// One-line rendering, two decimals.
    pub fn render_text(&self) -> String {
        format!("BLEU = {:.2}", self.score)
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "metric": "bleu",
            "score": self.score,
            "precisions": self.precisions,
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
        })
        .to_string()
    }
}
