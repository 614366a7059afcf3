//! Tokenizer model (de)serialization.
//!
//! The on-disk format is UTF-8 JSON with sorted keys and fixed formatting,
//! so identical models serialize byte-identically. Loading re-validates the
//! model invariants rather than trusting the file.

use super::{
    Affix, SpecialIds, TokenizerError, TokenizerModel, BOS_TOKEN, EOS_TOKEN, PAD_TOKEN, UNK_TOKEN,
};
use crate::script_norm::NormalizationConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Wire form of a model. Field order is alphabetical; serde_json preserves
/// struct field order, which makes the output key-sorted and byte-stable.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    boundary_marker: String,
    merges: Vec<(String, String)>,
    normalization: NormalizationConfig,
    protected_affixes: Vec<Affix>,
    specials: BTreeMap<String, u32>,
    version: String,
    vocab: Vec<(String, u32)>,
}

pub(super) fn model_to_json(model: &TokenizerModel) -> String {
    let file = ModelFile {
        boundary_marker: model.boundary_marker().to_string(),
        merges: model.merges().to_vec(),
        normalization: model.normalization().clone(),
        protected_affixes: model.protected_affixes().to_vec(),
        specials: BTreeMap::from([
            (UNK_TOKEN.to_string(), model.specials().unk),
            (PAD_TOKEN.to_string(), model.specials().pad),
            (BOS_TOKEN.to_string(), model.specials().bos),
            (EOS_TOKEN.to_string(), model.specials().eos),
        ]),
        version: model.version().to_string(),
        vocab: model.vocab().map(|(t, id)| (t.to_string(), id)).collect(),
    };
    let mut json = serde_json::to_string_pretty(&file).expect("model serializes");
    json.push('\n');
    json
}

pub(super) fn model_from_json(json: &str) -> Result<TokenizerModel, TokenizerError> {
    let file: ModelFile = serde_json::from_str(json)?;
    if file.version != crate::MODEL_FORMAT_VERSION {
        return Err(TokenizerError::VersionMismatch {
            found: file.version,
            expected: crate::MODEL_FORMAT_VERSION.to_string(),
        });
    }
    let invariant = |msg: String| TokenizerError::InvariantViolation(msg);

    if file.boundary_marker.chars().count() != 1 {
        return Err(invariant(format!(
            "boundary_marker must be a single codepoint, got {:?}",
            file.boundary_marker
        )));
    }

    // Ids must be dense from 0 and in file order.
    let mut tokens = Vec::with_capacity(file.vocab.len());
    for (index, (token, id)) in file.vocab.iter().enumerate() {
        if *id as usize != index {
            return Err(invariant(format!(
                "vocab ids must be dense and ordered: token {token:?} has id {id}, expected {index}"
            )));
        }
        tokens.push(token.clone());
    }

    // The four specials occupy the four lowest ids, in order.
    let expected_specials = [UNK_TOKEN, PAD_TOKEN, BOS_TOKEN, EOS_TOKEN];
    for (expected_id, name) in expected_specials.iter().enumerate() {
        match file.specials.get(*name) {
            Some(&id) if id as usize == expected_id => {}
            Some(&id) => {
                return Err(invariant(format!(
                    "special {name} must have id {expected_id}, found {id}"
                )))
            }
            None => return Err(invariant(format!("special {name} missing"))),
        }
        if tokens.get(expected_id).map(String::as_str) != Some(*name) {
            return Err(invariant(format!(
                "vocab entry {expected_id} must be the special {name}"
            )));
        }
    }
    if file.specials.len() != expected_specials.len() {
        return Err(invariant("specials must contain exactly four entries".into()));
    }

    // Every merge concatenation must be a vocabulary token, duplicate-free.
    let token_set: std::collections::HashSet<&str> =
        tokens.iter().map(String::as_str).collect();
    let mut seen_merges = std::collections::HashSet::new();
    for (left, right) in &file.merges {
        let concat = format!("{left}{right}");
        if !token_set.contains(concat.as_str()) {
            return Err(invariant(format!(
                "merge ({left:?}, {right:?}) produces {concat:?}, which is not in the vocabulary"
            )));
        }
        if !seen_merges.insert((left.as_str(), right.as_str())) {
            return Err(invariant(format!("duplicate merge ({left:?}, {right:?})")));
        }
    }

    let model = TokenizerModel::from_parts(
        &file.normalization,
        tokens,
        file.merges,
        file.protected_affixes,
    )?;
    debug_assert_eq!(model.specials(), SpecialIds::default());
    Ok(model)
}

pub(super) fn save_model(model: &TokenizerModel, path: &Path) -> Result<(), TokenizerError> {
    std::fs::write(path, model_to_json(model))?;
    Ok(())
}

pub(super) fn load_model(path: &Path) -> Result<TokenizerModel, TokenizerError> {
    model_from_json(&std::fs::read_to_string(path)?)
}
