//! Benchmark score tables and baseline-vs-candidate comparison reports.

use crate::metrics::MetricKind;
use crate::stats_sig::SignificanceResult;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::path::Path;

/// Translation direction of a scored system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    EnToTi,
    TiToEn,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::EnToTi => "en_to_ti",
            Direction::TiToEn => "ti_to_en",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en_to_ti" => Ok(Direction::EnToTi),
            "ti_to_en" => Ok(Direction::TiToEn),
            other => Err(format!(
                "unknown direction {other:?} (expected en_to_ti or ti_to_en)"
            )),
        }
    }
}

/// One scored cell: a system's metric value for a direction and domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub system: String,
    pub direction: Direction,
    #[serde(default = "default_domain")]
    pub domain: String,
    pub metric: MetricKind,
    pub value: f64,
}

fn default_domain() -> String {
    "in-domain".to_string()
}

/// One comparison row; significance is attached when a bootstrap ran.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub direction: Direction,
    pub metric: MetricKind,
    pub baseline_value: f64,
    pub candidate_value: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub significance: Option<SignificanceResult>,
}

/// Baseline-vs-candidate report. Unmatched entries (keys present on only one
/// side) are listed, never silently dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub baseline: String,
    pub candidate: String,
    pub rows: Vec<ComparisonRow>,
    pub unmatched: Vec<ScoreEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("duplicate entry for (system={system:?}, direction={direction}, metric={metric})")]
    DuplicateKey {
        system: String,
        direction: Direction,
        metric: MetricKind,
    },
    #[error("no entries given")]
    Empty,
    #[error("entry file I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not parse entries: {0}")]
    Parse(String),
}

/// Output format shared by tables and comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
    Json,
}

/// One rendered table row: a (system, direction) line with optional cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub system: String,
    pub direction: Direction,
    pub bleu: Option<f64>,
    pub chrf: Option<f64>,
}

/// Group entries into rows by system then direction (insertion order) with
/// BLEU and chrF columns. Missing cells render as "–".
pub fn build_table(entries: &[ScoreEntry], format: ReportFormat) -> Result<String, ReportError> {
    let rows = collect_rows(entries)?;
    Ok(match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
        ReportFormat::Tsv | ReportFormat::Text => {
            let mut out = String::from("System\tDirection\tBLEU\tchrF\n");
            for row in &rows {
                let cell = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or("–".into());
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    row.system,
                    row.direction,
                    cell(row.bleu),
                    cell(row.chrf)
                ));
            }
            out
        }
    })
}

/// The structured form of [`build_table`], for callers that want the cells.
pub fn collect_rows(entries: &[ScoreEntry]) -> Result<Vec<TableRow>, ReportError> {
    if entries.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut seen: HashSet<(String, Direction, MetricKind)> = HashSet::new();
    let mut rows: Vec<TableRow> = Vec::new();
    for entry in entries {
        let key = (entry.system.clone(), entry.direction, entry.metric);
        if !seen.insert(key) {
            return Err(ReportError::DuplicateKey {
                system: entry.system.clone(),
                direction: entry.direction,
                metric: entry.metric,
            });
        }
        let row = match rows
            .iter_mut()
            .find(|r| r.system == entry.system && r.direction == entry.direction)
        {
            Some(row) => row,
            None => {
                rows.push(TableRow {
                    system: entry.system.clone(),
                    direction: entry.direction,
                    bleu: None,
                    chrf: None,
                });
                rows.last_mut().expect("just pushed")
            }
        };
        match entry.metric {
            MetricKind::Bleu => row.bleu = Some(entry.value),
            MetricKind::Chrf => row.chrf = Some(entry.value),
        }
    }
    Ok(rows)
}

/// Pair baseline and candidate entries by (direction, metric) and compute
/// deltas (candidate − baseline). Row order follows the baseline side;
/// entries without a partner end up in `unmatched`.
pub fn compare(
    baseline_entries: &[ScoreEntry],
    candidate_entries: &[ScoreEntry],
) -> Result<ComparisonReport, ReportError> {
    if baseline_entries.is_empty() || candidate_entries.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut rows = Vec::new();
    let mut used_candidates = vec![false; candidate_entries.len()];
    let mut unmatched = Vec::new();
    for base in baseline_entries {
        let partner = candidate_entries.iter().enumerate().find(|(i, c)| {
            !used_candidates[*i] && c.direction == base.direction && c.metric == base.metric
        });
        match partner {
            Some((i, candidate)) => {
                used_candidates[i] = true;
                rows.push(ComparisonRow {
                    direction: base.direction,
                    metric: base.metric,
                    baseline_value: base.value,
                    candidate_value: candidate.value,
                    delta: candidate.value - base.value,
                    significance: None,
                });
            }
            None => unmatched.push(base.clone()),
        }
    }
    for (i, candidate) in candidate_entries.iter().enumerate() {
        if !used_candidates[i] {
            unmatched.push(candidate.clone());
        }
    }
    Ok(ComparisonReport {
        baseline: baseline_entries[0].system.clone(),
        candidate: candidate_entries[0].system.clone(),
        rows,
        unmatched,
    })
}

impl ComparisonReport {
    /// Render the report; significant rows (when significance is attached)
    /// carry a trailing `*`.
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            ReportFormat::Tsv | ReportFormat::Text => {
                let mut out = format!(
                    "Comparison: {} (baseline) vs {} (candidate)\n",
                    self.baseline, self.candidate
                );
                out.push_str("Direction\tMetric\tBaseline\tCandidate\tDelta\n");
                for row in &self.rows {
                    let star = match &row.significance {
                        Some(s) if s.significant => " *",
                        _ => "",
                    };
                    out.push_str(&format!(
                        "{}\t{}\t{:.2}\t{:.2}\t{:+.2}{}\n",
                        row.direction,
                        row.metric,
                        row.baseline_value,
                        row.candidate_value,
                        row.delta,
                        star
                    ));
                }
                for entry in &self.unmatched {
                    out.push_str(&format!(
                        "unmatched\t{}\t{}\t{}\t{:.2}\n",
                        entry.system, entry.direction, entry.metric, entry.value
                    ));
                }
                out
            }
        }
    }
}

/// Read entries from a JSON array or a 5-column TSV
/// (system, direction, domain, metric, value), chosen by file extension.
pub fn read_entries(path: impl AsRef<Path>) -> Result<Vec<ScoreEntry>, ReportError> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "tsv") {
        parse_entries_tsv(&content)
    } else {
        serde_json::from_str(&content).map_err(|e| ReportError::Parse(e.to_string()))
    }
}

pub fn parse_entries_tsv(content: &str) -> Result<Vec<ScoreEntry>, ReportError> {
    let mut entries = Vec::new();
    for (index, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [system, direction, domain, metric, value] = fields.as_slice() else {
            return Err(ReportError::Parse(format!(
                "line {}: expected 5 TAB-separated fields, found {}",
                index + 1,
                fields.len()
            )));
        };
        let parse = |what: &str, err: String| {
            ReportError::Parse(format!("line {}: bad {what}: {err}", index + 1))
        };
        entries.push(ScoreEntry {
            system: system.to_string(),
            direction: direction
                .parse()
                .map_err(|e: String| parse("direction", e))?,
            domain: domain.to_string(),
            metric: metric.parse().map_err(|e: String| parse("metric", e))?,
            value: value
                .parse()
                .map_err(|e: std::num::ParseFloatError| parse("value", e.to_string()))?,
        });
    }
    Ok(entries)
}
