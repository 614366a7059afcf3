//! Parallel-corpus ingestion, cleaning, alignment auditing, deterministic
//! splitting, and per-domain statistics.

mod io;

pub use io::{read_moses, read_tsv, write_tsv};

use crate::rng::{shuffle, SplitMix64};
use crate::script_norm::{script_profile, ConfigError, NormalizationConfig, Normalizer};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Corpus domain tags, mirroring the benchmark's four domains plus a
/// catch-all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Religious,
    News,
    Health,
    Education,
    Other,
}

impl Domain {
    pub const ALL: [Domain; 5] = [
        Domain::Religious,
        Domain::News,
        Domain::Health,
        Domain::Education,
        Domain::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Domain::Religious => "religious",
            Domain::News => "news",
            Domain::Health => "health",
            Domain::Education => "education",
            Domain::Other => "other",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Domain {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "religious" => Ok(Domain::Religious),
            "news" => Ok(Domain::News),
            "health" => Ok(Domain::Health),
            "education" => Ok(Domain::Education),
            "other" => Ok(Domain::Other),
            other => Err(format!("unknown domain tag {other:?}")),
        }
    }
}

/// One aligned sentence pair; the atom of every pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub id: u64,
    pub source_text: String,
    pub target_text: String,
    pub domain: Option<Domain>,
}

/// Cleaning thresholds, all overridable. `max_tokens` mirrors the 128-token
/// sequence cap common in NMT fine-tuning; the ratio and purity defaults are
/// workable starting points, not calibrated constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub max_tokens: usize,
    pub min_tokens: usize,
    pub max_length_ratio: f64,
    pub min_target_ethiopic_fraction: f64,
    pub require_numeral_consistency: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            max_tokens: 128,
            min_tokens: 1,
            max_length_ratio: 3.0,
            min_target_ethiopic_fraction: 0.5,
            require_numeral_consistency: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.max_length_ratio < 1.0 {
            return Err(CorpusError::InvalidFilterConfig(format!(
                "max_length_ratio must be >= 1, got {}",
                self.max_length_ratio
            )));
        }
        if !(0.0..=1.0).contains(&self.min_target_ethiopic_fraction) {
            return Err(CorpusError::InvalidFilterConfig(format!(
                "min_target_ethiopic_fraction must be in [0,1], got {}",
                self.min_target_ethiopic_fraction
            )));
        }
        if self.min_tokens > self.max_tokens {
            return Err(CorpusError::InvalidFilterConfig(format!(
                "min_tokens {} exceeds max_tokens {}",
                self.min_tokens, self.max_tokens
            )));
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self, CorpusError> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| CorpusError::InvalidFilterConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What `clean` did and why: every removal is accounted for, and a pair that
/// fails several filters counts once in `removed_count` but once per filter
/// in `per_filter_counts`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub input_count: usize,
    pub kept_count: usize,
    pub removed_count: usize,
    pub per_filter_counts: BTreeMap<String, usize>,
    pub removed_ids: Vec<u64>,
}

/// Per-domain corpus statistics in the shape of the benchmark manifest.
/// The synthetic "total" row carries summed counts and blank averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainManifest {
    pub domain: String,
    pub source_label: String,
    pub sentence_count: usize,
    pub avg_len_source: Option<f64>,
    pub avg_len_target: Option<f64>,
    pub notes: String,
}

/// Alignment audit verdict; a suspect pair carries every failed check name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "verdict", content = "reasons")]
pub enum Verdict {
    Aligned,
    Suspect(Vec<String>),
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: invalid UTF-8 at byte offset {byte_offset}")]
    InvalidUtf8 { path: String, byte_offset: usize },
    #[error("line {line}: expected 2 or 3 TAB-separated columns, found {columns}")]
    MalformedRow { line: usize, columns: usize },
    #[error("line {line}: {message}")]
    InvalidDomain { line: usize, message: String },
    #[error("line counts differ: source has {source_lines} lines, target has {target_lines}")]
    LineCountMismatch {
        source_lines: usize,
        target_lines: usize,
    },
    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),
    #[error("invalid filter config: {0}")]
    InvalidFilterConfig(String),
    #[error(transparent)]
    NormConfig(#[from] ConfigError),
}

const FILTER_NON_EMPTY: &str = "non_empty";
const FILTER_TOKEN_BOUNDS: &str = "token_bounds";
const FILTER_LENGTH_RATIO: &str = "length_ratio";
const FILTER_SCRIPT_PURITY: &str = "script_purity";
const FILTER_NUMERAL_CONSISTENCY: &str = "numeral_consistency";

/// Normalize both sides of every pair and drop pairs failing any filter.
/// Kept pairs carry their normalized text, preserve input order, and survive
/// a second pass unchanged (normalization is idempotent).
pub fn clean(
    pairs: &[SentencePair],
    cfg: &FilterConfig,
    norm: &NormalizationConfig,
) -> Result<(Vec<SentencePair>, CleaningReport), CorpusError> {
    cfg.validate()?;
    let normalizer = Normalizer::new(norm)?;
    let mut kept = Vec::with_capacity(pairs.len());
    let mut report = CleaningReport {
        input_count: pairs.len(),
        kept_count: 0,
        removed_count: 0,
        per_filter_counts: BTreeMap::new(),
        removed_ids: Vec::new(),
    };
    for pair in pairs {
        let normalized = SentencePair {
            id: pair.id,
            source_text: normalizer.apply(&pair.source_text),
            target_text: normalizer.apply(&pair.target_text),
            domain: pair.domain,
        };
        let failures = failed_filters(&normalized, cfg, true);
        if failures.is_empty() {
            kept.push(normalized);
        } else {
            report.removed_count += 1;
            report.removed_ids.push(pair.id);
            for name in failures {
                *report.per_filter_counts.entry(name.to_string()).or_insert(0) += 1;
            }
        }
    }
    report.kept_count = kept.len();
    Ok((kept, report))
}

/// Run the lighter alignment checks (length ratio, numeral consistency) on a
/// single pair, for auditing gold sets.
pub fn verify_alignment(
    pair: &SentencePair,
    cfg: &FilterConfig,
    norm: &NormalizationConfig,
) -> Result<Verdict, CorpusError> {
    cfg.validate()?;
    let normalizer = Normalizer::new(norm)?;
    let normalized = SentencePair {
        id: pair.id,
        source_text: normalizer.apply(&pair.source_text),
        target_text: normalizer.apply(&pair.target_text),
        domain: pair.domain,
    };
    let failures: Vec<String> = failed_filters(&normalized, cfg, false)
        .into_iter()
        .map(String::from)
        .collect();
    Ok(if failures.is_empty() {
        Verdict::Aligned
    } else {
        Verdict::Suspect(failures)
    })
}

/// Evaluate filters on an already-normalized pair. `full` enables the
/// cleaning-only filters on top of the alignment checks.
fn failed_filters(pair: &SentencePair, cfg: &FilterConfig, full: bool) -> Vec<&'static str> {
    let src_tokens = pair.source_text.split_whitespace().count();
    let tgt_tokens = pair.target_text.split_whitespace().count();
    let mut failures = Vec::new();

    if full {
        if src_tokens == 0 || tgt_tokens == 0 {
            failures.push(FILTER_NON_EMPTY);
        }
        if src_tokens < cfg.min_tokens
            || src_tokens > cfg.max_tokens
            || tgt_tokens < cfg.min_tokens
            || tgt_tokens > cfg.max_tokens
        {
            failures.push(FILTER_TOKEN_BOUNDS);
        }
    }

    let (longer, shorter) = (src_tokens.max(tgt_tokens), src_tokens.min(tgt_tokens));
    let ratio_bad = if shorter == 0 {
        longer > 0
    } else {
        longer as f64 / shorter as f64 > cfg.max_length_ratio
    };
    if ratio_bad {
        failures.push(FILTER_LENGTH_RATIO);
    }

    if full {
        let profile = script_profile(&pair.target_text);
        if profile.ethiopic_fraction < cfg.min_target_ethiopic_fraction {
            failures.push(FILTER_SCRIPT_PURITY);
        }
    }

    if cfg.require_numeral_consistency {
        let mut src_runs = digit_runs(&pair.source_text);
        let mut tgt_runs = digit_runs(&pair.target_text);
        src_runs.sort_unstable();
        tgt_runs.sort_unstable();
        if src_runs != tgt_runs {
            failures.push(FILTER_NUMERAL_CONSISTENCY);
        }
    }

    failures
}

/// Extract maximal ASCII digit runs, treating "," and "،" as grouping
/// separators when flanked by digits on both sides ("2,500" → "2500").
pub fn digit_runs(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut runs = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() {
            current.push(c);
        } else if (c == ',' || c == '\u{060C}')
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
        {
            // grouping separator inside a run: skip it
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
        i += 1;
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

/// The (train, valid, test) partitions produced by [`split`].
pub type SplitSets = (Vec<SentencePair>, Vec<SentencePair>, Vec<SentencePair>);

/// Deterministically shuffle and partition into (train, valid, test).
///
/// The shuffle is a Fisher–Yates pass over the input driven by the pinned
/// splitmix64 generator (see [`crate::rng`]); the valid and test partitions
/// take `floor(n·ratio)` pairs each and the remainder goes to train.
pub fn split(
    pairs: Vec<SentencePair>,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<SplitSets, CorpusError> {
    let (train_ratio, valid_ratio, test_ratio) = ratios;
    for (name, r) in [
        ("train", train_ratio),
        ("valid", valid_ratio),
        ("test", test_ratio),
    ] {
        if !r.is_finite() || r <= 0.0 {
            return Err(CorpusError::InvalidRatios(format!(
                "{name} ratio must be positive, got {r}"
            )));
        }
    }
    let sum = train_ratio + valid_ratio + test_ratio;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CorpusError::InvalidRatios(format!(
            "ratios must sum to 1, got {sum}"
        )));
    }

    let mut shuffled = pairs;
    shuffle(&mut shuffled, &mut SplitMix64::new(seed));
    let n = shuffled.len();
    let valid_size = (n as f64 * valid_ratio).floor() as usize;
    let test_size = (n as f64 * test_ratio).floor() as usize;
    let train_size = n - valid_size - test_size;

    let test = shuffled.split_off(train_size + valid_size);
    let valid = shuffled.split_off(train_size);
    Ok((shuffled, valid, test))
}

/// One manifest per domain present (untagged pairs fold into "other"), in
/// fixed domain order, plus a "total" row with summed counts and blank
/// averages. Averages are whitespace-token means rounded half-up to one
/// decimal.
pub fn compute_stats(pairs: &[SentencePair]) -> Vec<DomainManifest> {
    let mut counts: BTreeMap<&'static str, (usize, u64, u64)> = BTreeMap::new();
    for pair in pairs {
        let domain = pair.domain.unwrap_or(Domain::Other).as_str();
        let entry = counts.entry(domain).or_insert((0, 0, 0));
        entry.0 += 1;
        entry.1 += pair.source_text.split_whitespace().count() as u64;
        entry.2 += pair.target_text.split_whitespace().count() as u64;
    }
    let round1 = |total: u64, n: usize| (total as f64 * 10.0 / n as f64).round() / 10.0;
    let mut manifests = Vec::new();
    for domain in Domain::ALL {
        if let Some(&(n, src_total, tgt_total)) = counts.get(domain.as_str()) {
            manifests.push(DomainManifest {
                domain: domain.as_str().to_string(),
                source_label: String::new(),
                sentence_count: n,
                avg_len_source: Some(round1(src_total, n)),
                avg_len_target: Some(round1(tgt_total, n)),
                notes: String::new(),
            });
        }
    }
    manifests.push(DomainManifest {
        domain: "total".to_string(),
        source_label: String::new(),
        sentence_count: pairs.len(),
        avg_len_source: None,
        avg_len_target: None,
        notes: String::new(),
    });
    manifests
}

/// Output format for manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestFormat {
    Text,
    Tsv,
    Json,
}

/// Render manifests. Text mode mirrors the benchmark table: capitalized
/// domain, thousands-separated counts, "EN / TI" averages, "–" for blanks.
pub fn render_manifests(manifests: &[DomainManifest], format: ManifestFormat) -> String {
    match format {
        ManifestFormat::Json => {
            let mut s = serde_json::to_string_pretty(manifests).expect("manifests serialize");
            s.push('\n');
            s
        }
        ManifestFormat::Tsv => {
            let mut out = String::from("domain\tsource\tsentences\tavg_len_source\tavg_len_target\tnotes\n");
            for m in manifests {
                let avg = |v: Option<f64>| v.map(|x| format!("{x:.1}")).unwrap_or_default();
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    m.domain,
                    m.source_label,
                    m.sentence_count,
                    avg(m.avg_len_source),
                    avg(m.avg_len_target),
                    m.notes
                ));
            }
            out
        }
        ManifestFormat::Text => {
            let mut out = String::from("Domain\tSource\t# Sents\tAvg Len (EN/TI)\tNotes\n");
            for m in manifests {
                let avg = match (m.avg_len_source, m.avg_len_target) {
                    (Some(s), Some(t)) => format!("{s:.1} / {t:.1}"),
                    _ => "–".to_string(),
                };
                let dash_if_empty = |s: &str| {
                    if s.is_empty() {
                        "–".to_string()
                    } else {
                        s.to_string()
                    }
                };
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    capitalize(&m.domain),
                    dash_if_empty(&m.source_label),
                    group_thousands(m.sentence_count),
                    avg,
                    dash_if_empty(&m.notes)
                ));
            }
            out
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}
