//! Paired bootstrap significance testing with Bonferroni correction.
//!
//! The underlying comparison is the field-standard paired bootstrap: resample
//! segment indices with replacement, score both systems on each resample
//! against the same references, and read the two-sided p-value off the
//! distribution of score deltas. Resample indices come from the pinned
//! splitmix64 generator (see [`crate::rng`]), drawn row by row —
//! `n_resamples × n` calls of `next_below(n)` in order — so runs are
//! bit-reproducible.
//!
//! Per-segment n-gram statistics are integer counts computed once and summed
//! per resample, which makes the resampled scores identical to re-scoring
//! the resampled corpora from scratch.

use crate::metrics::{
    BleuSegmentStats, ChrfSegmentStats, MetricKind, MetricsError, DEFAULT_BETA, DEFAULT_MAX_N,
};
use crate::rng::SplitMix64;
use serde::Serialize;

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Outcome of one paired comparison.
///
/// Invariants hold at every stage: `significant == (p_value < adjusted_alpha)`
/// and `adjusted_alpha == alpha / m` for the current correction family size
/// (m = 1 until [`apply_correction`] runs).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceResult {
    pub metric_name: String,
    pub score_a: f64,
    pub score_b: f64,
    pub delta: f64,
    pub p_value: f64,
    pub n_resamples: usize,
    pub seed: u64,
    pub alpha: f64,
    pub adjusted_alpha: f64,
    pub significant: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SignificanceError {
    #[error("alpha must be in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("correction family size must be >= 1, got {0}")]
    InvalidFamilySize(usize),
    #[error("paired bootstrap needs at least 2 segments, got {0}")]
    TooFewSegments(usize),
    #[error("n_resamples must be >= 1")]
    NoResamples,
    #[error("input lists differ in length: a={a}, b={b}, refs={refs}")]
    LengthMismatch { a: usize, b: usize, refs: usize },
    #[error("cannot apply a correction to an empty result list")]
    EmptyResults,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Bonferroni-adjusted significance threshold: exactly `alpha / m`.
pub fn bonferroni(alpha: f64, m: usize) -> Result<f64, SignificanceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SignificanceError::InvalidAlpha(alpha));
    }
    if m < 1 {
        return Err(SignificanceError::InvalidFamilySize(m));
    }
    Ok(alpha / m as f64)
}

/// Compare two systems' outputs against shared references with a paired
/// bootstrap. Two-sided p-value: `min(1, 2·min(frac(Δ ≤ 0), frac(Δ ≥ 0)))`
/// over the resampled deltas Δ = score_b − score_a.
///
/// The result carries `alpha = 0.05` uncorrected (family size 1); run
/// [`apply_correction`] or [`SignificanceResult::corrected`] afterwards.
pub fn paired_bootstrap(
    hyp_a: &[impl AsRef<str>],
    hyp_b: &[impl AsRef<str>],
    refs: &[impl AsRef<str>],
    metric: MetricKind,
    n_resamples: usize,
    seed: u64,
) -> Result<SignificanceResult, SignificanceError> {
    if hyp_a.len() != hyp_b.len() || hyp_a.len() != refs.len() {
        return Err(SignificanceError::LengthMismatch {
            a: hyp_a.len(),
            b: hyp_b.len(),
            refs: refs.len(),
        });
    }
    if hyp_a.len() < 2 {
        return Err(SignificanceError::TooFewSegments(hyp_a.len()));
    }
    if n_resamples < 1 {
        return Err(SignificanceError::NoResamples);
    }

    let n = refs.len();
    let mut rng = SplitMix64::new(seed);
    let scorer = SegmentScorer::new(hyp_a, hyp_b, refs, metric);
    let (score_a, score_b) = scorer.full_scores();

    let mut non_positive = 0usize;
    let mut non_negative = 0usize;
    let mut indices = vec![0usize; n];
    for _ in 0..n_resamples {
        for slot in indices.iter_mut() {
            *slot = rng.next_below(n as u64) as usize;
        }
        let (a, b) = scorer.resampled_scores(&indices);
        let delta = b - a;
        if delta <= 0.0 {
            non_positive += 1;
        }
        if delta >= 0.0 {
            non_negative += 1;
        }
    }
    let tail = non_positive.min(non_negative) as f64 / n_resamples as f64;
    let p_value = (2.0 * tail).min(1.0);

    let alpha = DEFAULT_ALPHA;
    Ok(SignificanceResult {
        metric_name: metric.to_string(),
        score_a,
        score_b,
        delta: score_b - score_a,
        p_value,
        n_resamples,
        seed,
        alpha,
        adjusted_alpha: alpha,
        significant: p_value < alpha,
    })
}

impl SignificanceResult {
    /// Re-threshold this result for a correction family of size `m`.
    pub fn corrected(mut self, alpha: f64, m: usize) -> Result<Self, SignificanceError> {
        let adjusted = bonferroni(alpha, m)?;
        self.alpha = alpha;
        self.adjusted_alpha = adjusted;
        self.significant = self.p_value < adjusted;
        Ok(self)
    }

    /// One-line rendering; significant comparisons are starred.
    pub fn render_text(&self) -> String {
        format!(
            "{}: a={:.2} b={:.2} delta={:+.2} p={:.4} (alpha/m={:.4}){}",
            self.metric_name,
            self.score_a,
            self.score_b,
            self.delta,
            self.p_value,
            self.adjusted_alpha,
            if self.significant { " *" } else { "" }
        )
    }
}

/// Bonferroni-correct a family of comparisons: every result gets
/// `adjusted_alpha = alpha / len` and a recomputed significance flag.
/// Input order is preserved.
pub fn apply_correction(
    results: &[SignificanceResult],
    alpha: f64,
) -> Result<Vec<SignificanceResult>, SignificanceError> {
    if results.is_empty() {
        return Err(SignificanceError::EmptyResults);
    }
    let m = results.len();
    results
        .iter()
        .map(|r| r.clone().corrected(alpha, m))
        .collect()
}

/// Pre-tokenized per-segment statistics for both systems.
enum SegmentScorer {
    Bleu(Vec<BleuSegmentStats>, Vec<BleuSegmentStats>),
    Chrf(Vec<ChrfSegmentStats>, Vec<ChrfSegmentStats>),
}

impl SegmentScorer {
    fn new(
        hyp_a: &[impl AsRef<str>],
        hyp_b: &[impl AsRef<str>],
        refs: &[impl AsRef<str>],
        metric: MetricKind,
    ) -> Self {
        match metric {
            MetricKind::Bleu => SegmentScorer::Bleu(
                hyp_a
                    .iter()
                    .zip(refs)
                    .map(|(h, r)| BleuSegmentStats::of(h.as_ref(), r.as_ref()))
                    .collect(),
                hyp_b
                    .iter()
                    .zip(refs)
                    .map(|(h, r)| BleuSegmentStats::of(h.as_ref(), r.as_ref()))
                    .collect(),
            ),
            MetricKind::Chrf => SegmentScorer::Chrf(
                hyp_a
                    .iter()
                    .zip(refs)
                    .map(|(h, r)| ChrfSegmentStats::of(h.as_ref(), r.as_ref(), DEFAULT_MAX_N))
                    .collect(),
                hyp_b
                    .iter()
                    .zip(refs)
                    .map(|(h, r)| ChrfSegmentStats::of(h.as_ref(), r.as_ref(), DEFAULT_MAX_N))
                    .collect(),
            ),
        }
    }

    fn full_scores(&self) -> (f64, f64) {
        match self {
            SegmentScorer::Bleu(a, b) => {
                let sum = |stats: &[BleuSegmentStats]| {
                    let mut total = BleuSegmentStats::default();
                    for s in stats {
                        total.add(s);
                    }
                    total.score().score
                };
                (sum(a), sum(b))
            }
            SegmentScorer::Chrf(a, b) => {
                let sum = |stats: &[ChrfSegmentStats]| {
                    let mut total = ChrfSegmentStats::empty(DEFAULT_MAX_N);
                    for s in stats {
                        total.add(s);
                    }
                    total.score(DEFAULT_BETA).score
                };
                (sum(a), sum(b))
            }
        }
    }

    fn resampled_scores(&self, indices: &[usize]) -> (f64, f64) {
        match self {
            SegmentScorer::Bleu(a, b) => {
                let sum = |stats: &[BleuSegmentStats]| {
                    let mut total = BleuSegmentStats::default();
                    for &i in indices {
                        total.add(&stats[i]);
                    }
                    total.score().score
                };
                (sum(a), sum(b))
            }
            SegmentScorer::Chrf(a, b) => {
                let sum = |stats: &[ChrfSegmentStats]| {
                    let mut total = ChrfSegmentStats::empty(DEFAULT_MAX_N);
                    for &i in indices {
                        total.add(&stats[i]);
                    }
                    total.score(DEFAULT_BETA).score
                };
                (sum(a), sum(b))
            }
        }
    }
}
