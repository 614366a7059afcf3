//! Parallel-corpus file formats: TSV (source TAB target [TAB domain]) and
//! Moses two-file (line-aligned `name.en` / `name.ti`).

use super::{CorpusError, Domain, SentencePair};
use std::path::Path;

fn read_utf8(path: &Path) -> Result<String, CorpusError> {
    let bytes = std::fs::read(path)?;
    String::from_utf8(bytes).map_err(|e| CorpusError::InvalidUtf8 {
        path: path.display().to_string(),
        byte_offset: e.utf8_error().valid_up_to(),
    })
}

/// Read a TSV corpus: one pair per line, columns source TAB target and an
/// optional domain tag. Blank-vs-blank rows (a lone TAB) are preserved;
/// a row with the wrong column count is an error naming the line.
pub fn read_tsv(path: impl AsRef<Path>) -> Result<Vec<SentencePair>, CorpusError> {
    let content = read_utf8(path.as_ref())?;
    let mut pairs = Vec::new();
    for (index, line) in content.lines().enumerate() {
        let columns: Vec<&str> = line.split('\t').collect();
        let (source, target, domain) = match columns.as_slice() {
            [source, target] => (*source, *target, None),
            [source, target, tag] => {
                let domain: Domain = tag.parse().map_err(|message| CorpusError::InvalidDomain {
                    line: index + 1,
                    message,
                })?;
                (*source, *target, Some(domain))
            }
            other => {
                return Err(CorpusError::MalformedRow {
                    line: index + 1,
                    columns: other.len(),
                })
            }
        };
        pairs.push(SentencePair {
            id: pairs.len() as u64,
            source_text: source.to_string(),
            target_text: target.to_string(),
            domain,
        });
    }
    Ok(pairs)
}

/// Read a Moses-style pair of line-aligned files.
pub fn read_moses(
    source_path: impl AsRef<Path>,
    target_path: impl AsRef<Path>,
) -> Result<Vec<SentencePair>, CorpusError> {
    let source = read_utf8(source_path.as_ref())?;
    let target = read_utf8(target_path.as_ref())?;
    let source_lines: Vec<&str> = source.lines().collect();
    let target_lines: Vec<&str> = target.lines().collect();
    if source_lines.len() != target_lines.len() {
        return Err(CorpusError::LineCountMismatch {
            source_lines: source_lines.len(),
            target_lines: target_lines.len(),
        });
    }
    Ok(source_lines
        .into_iter()
        .zip(target_lines)
        .enumerate()
        .map(|(id, (source_text, target_text))| SentencePair {
            id: id as u64,
            source_text: source_text.to_string(),
            target_text: target_text.to_string(),
            domain: None,
        })
        .collect())
}

/// Write pairs as TSV, emitting the domain column only for tagged pairs.
pub fn write_tsv(pairs: &[SentencePair], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let mut out = String::new();
    for pair in pairs {
        out.push_str(&pair.source_text);
        out.push('\t');
        out.push_str(&pair.target_text);
        if let Some(domain) = pair.domain {
            out.push('\t');
            out.push_str(domain.as_str());
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
