//! Deterministic BPE subword tokenizer with script normalization and
//! protected morpheme boundaries.
//!
//! Conventions, pinned for reproducibility:
//!
//! * Words are whitespace-delimited after normalization; the word-boundary
//!   marker U+2581 fuses with the word's first character to form one base
//!   symbol ("▁ሰ" is a single symbol, and a one-character word has no pairs).
//!   Detokenization is therefore lossless: concatenate pieces, turn markers
//!   into spaces, drop the leading space.
//! * The base vocabulary holds, for every character observed in training,
//!   both the bare character and its marker-fused form, so any string over
//!   the training alphabet round-trips with zero `<unk>`.
//! * Merges never cross a whitespace boundary or a protected affix boundary.
//!   Affix boundaries come from an optional prefix/suffix lexicon: per word,
//!   the longest matching prefix and longest matching suffix (at most one of
//!   each, never overlapping, always leaving a non-empty stem) become hard
//!   split points.
//! * Characters unseen in training encode as `<unk>` (id 0) and decode as the
//!   literal piece `<unk>`.

mod train;
mod io;

pub use train::{train_bpe, BpeTrainConfig};

use crate::script_norm::{ConfigError, NormalizationConfig, Normalizer};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

/// The SentencePiece-compatible word-boundary marker.
pub const BOUNDARY_MARKER: char = '\u{2581}';

pub const UNK_TOKEN: &str = "<unk>";
pub const PAD_TOKEN: &str = "<pad>";
pub const BOS_TOKEN: &str = "<s>";
pub const EOS_TOKEN: &str = "</s>";

/// Ids of the four special tokens; always the four lowest ids, in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialIds {
    pub unk: u32,
    pub pad: u32,
    pub bos: u32,
    pub eos: u32,
}

impl Default for SpecialIds {
    fn default() -> Self {
        Self {
            unk: 0,
            pad: 1,
            bos: 2,
            eos: 3,
        }
    }
}

/// A protected affix: a surface form plus the side of the word it binds to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affix {
    pub form: String,
    pub side: AffixSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixSide {
    Prefix,
    Suffix,
}

/// Errors from training, coding, or (de)serializing tokenizer models.
#[derive(Debug, thiserror::Error)]
pub enum TokenizerError {
    #[error("training corpus is empty (no non-whitespace characters after normalization)")]
    EmptyCorpus,
    #[error("vocab_size {got} is smaller than the {specials} special tokens")]
    VocabTooSmall { got: usize, specials: usize },
    #[error("unknown token id {id} (vocabulary has {vocab_size} entries)")]
    UnknownId { id: u32, vocab_size: usize },
    #[error("model file version {found:?} is not supported (expected {expected:?})")]
    VersionMismatch { found: String, expected: String },
    #[error("model invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
}

/// A trained, immutable subword tokenizer.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    version: String,
    normalizer: Normalizer,
    /// id → token, dense from 0.
    tokens: Vec<String>,
    /// token → id.
    ids: HashMap<String, u32>,
    merges: Vec<(String, String)>,
    /// pair → index in `merges`, for priority-ordered encoding.
    merge_ranks: HashMap<(String, String), u32>,
    specials: SpecialIds,
    boundary_marker: char,
    protected_affixes: Vec<Affix>,
}

/// Parallel ids/pieces for one encoded segment.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TokenSequence {
    pub ids: Vec<u32>,
    pub pieces: Vec<String>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

impl TokenizerModel {
    pub(crate) fn from_parts(
        norm_cfg: &NormalizationConfig,
        tokens: Vec<String>,
        merges: Vec<(String, String)>,
        protected_affixes: Vec<Affix>,
    ) -> Result<Self, TokenizerError> {
        let normalizer = Normalizer::new(norm_cfg)?;
        let mut ids = HashMap::with_capacity(tokens.len());
        for (id, token) in tokens.iter().enumerate() {
            if ids.insert(token.clone(), id as u32).is_some() {
                return Err(TokenizerError::InvariantViolation(format!(
                    "duplicate vocabulary token {token:?}"
                )));
            }
        }
        let merge_ranks = merges
            .iter()
            .enumerate()
            .map(|(rank, pair)| (pair.clone(), rank as u32))
            .collect();
        Ok(Self {
            version: crate::MODEL_FORMAT_VERSION.to_string(),
            normalizer,
            tokens,
            ids,
            merges,
            merge_ranks,
            specials: SpecialIds::default(),
            boundary_marker: BOUNDARY_MARKER,
            protected_affixes,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn normalization(&self) -> &NormalizationConfig {
        self.normalizer.config()
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn specials(&self) -> SpecialIds {
        self.specials
    }

    pub fn protected_affixes(&self) -> &[Affix] {
        &self.protected_affixes
    }

    pub fn boundary_marker(&self) -> char {
        self.boundary_marker
    }

    pub fn token_to_id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn id_to_token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Iterate (token, id) in id order.
    pub fn vocab(&self) -> impl Iterator<Item = (&str, u32)> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(id, token)| (token.as_str(), id as u32))
    }

    /// Encode one segment. Total: unseen characters become `<unk>`.
    pub fn encode(&self, text: &str) -> TokenSequence {
        let normalized = self.normalizer.apply(text);
        let mut seq = TokenSequence::default();
        for word in normalized.split_whitespace() {
            for segment in &mut self.word_symbols(word) {
                self.apply_merges(segment);
                for symbol in segment {
                    match self.ids.get(symbol.as_str()) {
                        Some(&id) => {
                            seq.ids.push(id);
                            seq.pieces.push(std::mem::take(symbol));
                        }
                        None => {
                            seq.ids.push(self.specials.unk);
                            seq.pieces.push(UNK_TOKEN.to_string());
                        }
                    }
                }
            }
        }
        seq
    }

    /// Decode a sequence of ids back to text.
    pub fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError> {
        let mut out = String::new();
        for &id in ids {
            let token = self
                .id_to_token(id)
                .ok_or(TokenizerError::UnknownId {
                    id,
                    vocab_size: self.tokens.len(),
                })?;
            for c in token.chars() {
                out.push(if c == self.boundary_marker { ' ' } else { c });
            }
        }
        Ok(out.strip_prefix(' ').unwrap_or(&out).to_string())
    }

    /// Decode a [`TokenSequence`] (uses its ids).
    pub fn decode_sequence(&self, tokens: &TokenSequence) -> Result<String, TokenizerError> {
        self.decode(&tokens.ids)
    }

    /// Fraction of emitted token ids equal to `<unk>` over all encodings.
    /// A corpus that emits no tokens at all (only whitespace) rates 0.
    pub fn oov_rate(&self, corpus: &[impl AsRef<str>]) -> Result<f64, TokenizerError> {
        if corpus.is_empty() {
            return Err(TokenizerError::EmptyCorpus);
        }
        let mut total = 0u64;
        let mut unknown = 0u64;
        for line in corpus {
            let seq = self.encode(line.as_ref());
            total += seq.ids.len() as u64;
            unknown += seq.ids.iter().filter(|&&id| id == self.specials.unk).count() as u64;
        }
        if total == 0 {
            return Ok(0.0);
        }
        Ok(unknown as f64 / total as f64)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TokenizerError> {
        io::save_model(self, path.as_ref())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TokenizerError> {
        io::load_model(path.as_ref())
    }

    /// Byte-stable JSON rendering of the model.
    pub fn to_json(&self) -> String {
        io::model_to_json(self)
    }

    pub fn from_json(json: &str) -> Result<Self, TokenizerError> {
        io::model_from_json(json)
    }

    /// Split a word into protected segments and their initial symbols: the
    /// first segment's first character carries the boundary marker.
    pub(crate) fn word_symbols(&self, word: &str) -> Vec<Vec<String>> {
        word_symbols(word, &self.protected_affixes, self.boundary_marker)
    }

    /// Apply merges within one segment: always the lowest-index applicable
    /// merge first, until none applies.
    fn apply_merges(&self, symbols: &mut Vec<String>) {
        while symbols.len() >= 2 {
            let mut best: Option<(u32, usize)> = None;
            for i in 0..symbols.len() - 1 {
                let pair = (symbols[i].clone(), symbols[i + 1].clone());
                if let Some(&rank) = self.merge_ranks.get(&pair) {
                    if best.map_or(true, |(r, _)| rank < r) {
                        best = Some((rank, i));
                    }
                }
            }
            let Some((rank, _)) = best else { break };
            let (left, right) = &self.merges[rank as usize];
            merge_in_place(symbols, left, right);
        }
    }
}

/// Replace every non-overlapping adjacent (left, right) occurrence with the
/// concatenation, scanning left to right.
pub(crate) fn merge_in_place(symbols: &mut Vec<String>, left: &str, right: &str) {
    let mut read = 0;
    let mut write = 0;
    while read < symbols.len() {
        if read + 1 < symbols.len() && symbols[read] == left && symbols[read + 1] == right {
            let mut merged = std::mem::take(&mut symbols[read]);
            merged.push_str(&symbols[read + 1]);
            symbols[write] = merged;
            read += 2;
        } else {
            if read != write {
                symbols[write] = std::mem::take(&mut symbols[read]);
            }
            read += 1;
        }
        write += 1;
    }
    symbols.truncate(write);
}

/// Segment a word at protected affix boundaries and split into base symbols.
pub(crate) fn word_symbols(word: &str, affixes: &[Affix], marker: char) -> Vec<Vec<String>> {
    let mut segments: Vec<&str> = Vec::with_capacity(3);
    let mut stem = word;

    let prefix = affixes
        .iter()
        .filter(|a| a.side == AffixSide::Prefix)
        .filter(|a| !a.form.is_empty() && stem.starts_with(&a.form) && a.form.len() < stem.len())
        .max_by_key(|a| a.form.len());
    if let Some(p) = prefix {
        segments.push(&stem[..p.form.len()]);
        stem = &stem[p.form.len()..];
    }

    let suffix = affixes
        .iter()
        .filter(|a| a.side == AffixSide::Suffix)
        .filter(|a| !a.form.is_empty() && stem.ends_with(&a.form) && a.form.len() < stem.len())
        .max_by_key(|a| a.form.len());
    let tail = if let Some(s) = suffix {
        let cut = stem.len() - s.form.len();
        let tail = &stem[cut..];
        stem = &stem[..cut];
        Some(tail)
    } else {
        None
    };

    segments.push(stem);
    if let Some(tail) = tail {
        segments.push(tail);
    }

    segments
        .iter()
        .enumerate()
        .map(|(seg_index, segment)| {
            segment
                .chars()
                .enumerate()
                .map(|(char_index, c)| {
                    if seg_index == 0 && char_index == 0 {
                        let mut s = String::with_capacity(marker.len_utf8() + c.len_utf8());
                        s.push(marker);
                        s.push(c);
                        s
                    } else {
                        c.to_string()
                    }
                })
                .collect()
        })
        .collect()
}
