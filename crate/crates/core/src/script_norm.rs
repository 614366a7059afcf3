//! Ge'ez (Ethiopic) script classification and text normalization.
//!
//! Tigrinya shares the Ethiopic script with Amharic and Tigre, and real-world
//! corpora mix variant character series (ሐ/ኀ vs ሀ, ሠ vs ሰ, ዐ vs አ, ፀ vs ጸ)
//! that downstream tokenization should not have to distinguish. This module
//! folds text onto a canonical form and measures script composition so the
//! corpus filters can spot wrong-language or wrong-script segments.
//!
//! The default folding table ships as a data file (`data/geez_norm.json`),
//! not as code: sources disagree on which variant series to merge, so the
//! table is a best-effort default meant to be overridden per project.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

/// Built-in normalization config (see `data/geez_norm.json`).
const DEFAULT_CONFIG_JSON: &str = include_str!("../data/geez_norm.json");

/// Script class of a single codepoint. Every codepoint gets exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScriptClass {
    Ethiopic,
    Latin,
    Digit,
    Punctuation,
    Whitespace,
    Other,
}

/// Classify one codepoint.
///
/// Ethiopic covers the blocks U+1200–U+137F, U+1380–U+139F and U+2D80–U+2DDF,
/// except that Ethiopic punctuation (U+1360–U+1368, which includes the word
/// separator ፡ and full stop ።) classifies as punctuation like every other
/// Unicode P* character. Latin covers the Basic Latin letters plus the Latin-1
/// and Latin Extended letter blocks; digits are ASCII 0–9.
pub fn classify_char(c: char) -> ScriptClass {
    if c.is_whitespace() {
        return ScriptClass::Whitespace;
    }
    if is_punctuation(c) {
        return ScriptClass::Punctuation;
    }
    match c as u32 {
        0x1200..=0x137F | 0x1380..=0x139F | 0x2D80..=0x2DDF => ScriptClass::Ethiopic,
        0x30..=0x39 => ScriptClass::Digit,
        _ if is_latin_letter(c) => ScriptClass::Latin,
        _ => ScriptClass::Other,
    }
}

/// True for every Unicode punctuation character (general category P*).
pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

fn is_latin_letter(c: char) -> bool {
    if c.is_ascii_alphabetic() {
        return true;
    }
    match c as u32 {
        // Latin-1 letters, minus × and ÷.
        0xC0..=0xFF => c as u32 != 0xD7 && c as u32 != 0xF7,
        // Latin Extended-A/B and Latin Extended Additional.
        0x100..=0x24F | 0x1E00..=0x1EFF => true,
        _ => false,
    }
}

/// Script composition of a text, over non-whitespace characters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScriptProfile {
    pub total_chars: usize,
    pub ethiopic_fraction: f64,
    pub latin_fraction: f64,
    pub digit_fraction: f64,
    pub punct_fraction: f64,
    pub other_fraction: f64,
}

/// Count script classes over the non-whitespace characters of `text`.
///
/// An empty (or all-whitespace) text yields `total_chars == 0` and all-zero
/// fractions; otherwise the five fractions sum to 1.
pub fn script_profile(text: &str) -> ScriptProfile {
    let mut counts = [0usize; 5]; // ethiopic, latin, digit, punct, other
    let mut total = 0usize;
    for c in text.chars() {
        match classify_char(c) {
            ScriptClass::Whitespace => continue,
            ScriptClass::Ethiopic => counts[0] += 1,
            ScriptClass::Latin => counts[1] += 1,
            ScriptClass::Digit => counts[2] += 1,
            ScriptClass::Punctuation => counts[3] += 1,
            ScriptClass::Other => counts[4] += 1,
        }
        total += 1;
    }
    let frac = |n: usize| {
        if total == 0 {
            0.0
        } else {
            n as f64 / total as f64
        }
    };
    ScriptProfile {
        total_chars: total,
        ethiopic_fraction: frac(counts[0]),
        latin_fraction: frac(counts[1]),
        digit_fraction: frac(counts[2]),
        punct_fraction: frac(counts[3]),
        other_fraction: frac(counts[4]),
    }
}

/// Errors from validating or loading a [`NormalizationConfig`].
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("char_map rule {index} maps '{rule_source}' to itself")]
    IdentityRule { index: usize, rule_source: char },
    #[error(
        "char_map target '{target}' (rule {index}) is not a fixed point: it is itself remapped to '{remapped}'"
    )]
    TargetNotFixed {
        index: usize,
        target: char,
        remapped: char,
    },
    #[error("char_map rule {index} involves a whitespace, control, or combining-mark character")]
    NonPrintableRule { index: usize },
    #[error("char_map entry {index}: expected a single codepoint, got {got:?}")]
    NotSingleCodepoint { index: usize, got: String },
    #[error("failed to read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse config: {0}")]
    Parse(#[from] serde_json::Error),
}

/// How to canonicalize text before tokenization or filtering.
///
/// Stages run in a fixed order: control stripping, then Unicode canonical
/// composition (NFC), then the character map (once per character, first
/// matching rule wins), then whitespace collapsing. Stripping precedes
/// composition because a zero-width character between a base and a combining
/// mark would otherwise block NFC on the first pass and admit it on the
/// second, breaking idempotence. Composition precedes the map so precomposed
/// and decomposed spellings hit the same rules.
///
/// A valid config makes `normalize` idempotent: the validator requires the
/// map to be acyclic, closed in one pass (every target is a fixed point),
/// and free of whitespace, control, and combining-mark characters. One
/// residual edge is out of contract: a rule target that canonically composes
/// with a stray combining mark following it in the input (impossible for
/// Ethiopic targets, which have no canonical compositions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConfig {
    #[serde(with = "char_map_serde")]
    pub char_map: Vec<(char, char)>,
    pub collapse_whitespace: bool,
    pub strip_controls: bool,
    pub unicode_canonicalization: bool,
}

impl NormalizationConfig {
    /// Config that changes nothing.
    pub fn identity() -> Self {
        Self {
            char_map: Vec::new(),
            collapse_whitespace: false,
            strip_controls: false,
            unicode_canonicalization: false,
        }
    }

    /// The shipped Ge'ez folding table (variant series ሐ/ኀ→ሀ, ሠ→ሰ, ዐ→አ,
    /// ፀ→ጸ) with all stages enabled. A best-effort default: override it with
    /// a project-specific table where the merges are too aggressive.
    pub fn default_geez() -> Self {
        serde_json::from_str(DEFAULT_CONFIG_JSON).expect("embedded default config is valid JSON")
    }

    pub fn from_json(json: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Check the char_map invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let effective = |c: char| -> Option<char> {
            self.char_map
                .iter()
                .find(|(src, _)| *src == c)
                .map(|(_, dst)| *dst)
        };
        for (i, (src, dst)) in self.char_map.iter().enumerate() {
            if src == dst {
                return Err(ConfigError::IdentityRule {
                    index: i,
                    rule_source: *src,
                });
            }
            let unmappable = |c: char| {
                c.is_whitespace()
                    || c.is_control()
                    || matches!(
                        get_general_category(c),
                        GeneralCategory::NonspacingMark
                            | GeneralCategory::SpacingMark
                            | GeneralCategory::EnclosingMark
                    )
            };
            if unmappable(*src) || unmappable(*dst) {
                return Err(ConfigError::NonPrintableRule { index: i });
            }
            if let Some(remapped) = effective(*dst) {
                if remapped != *dst {
                    return Err(ConfigError::TargetNotFixed {
                        index: i,
                        target: *dst,
                        remapped,
                    });
                }
            }
        }
        Ok(())
    }
}

mod char_map_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &[(char, char)], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[String; 2]> = map
            .iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect();
        serde::Serialize::serialize(&pairs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(char, char)>, D::Error> {
        let pairs: Vec<[String; 2]> = Deserialize::deserialize(d)?;
        pairs
            .into_iter()
            .enumerate()
            .map(|(i, [a, b])| {
                let single = |s: &str| -> Result<char, D::Error> {
                    let mut it = s.chars();
                    match (it.next(), it.next()) {
                        (Some(c), None) => Ok(c),
                        _ => Err(D::Error::custom(format!(
                            "char_map entry {i}: expected a single codepoint, got {s:?}"
                        ))),
                    }
                };
                Ok((single(&a)?, single(&b)?))
            })
            .collect()
    }
}

/// A validated, precompiled normalizer. Build once, apply to many strings.
#[derive(Debug, Clone)]
pub struct Normalizer {
    cfg: NormalizationConfig,
    map: HashMap<char, char>,
}

impl Normalizer {
    pub fn new(cfg: &NormalizationConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut map = HashMap::with_capacity(cfg.char_map.len());
        for (src, dst) in &cfg.char_map {
            // First rule wins when sources repeat.
            map.entry(*src).or_insert(*dst);
        }
        Ok(Self {
            cfg: cfg.clone(),
            map,
        })
    }

    pub fn config(&self) -> &NormalizationConfig {
        &self.cfg
    }

    /// Apply all enabled stages. Idempotent for any validated config.
    pub fn apply(&self, text: &str) -> String {
        let stripped: String = if self.cfg.strip_controls {
            text.chars().filter(|&c| !is_stripped_control(c)).collect()
        } else {
            text.to_string()
        };
        let composed: String = if self.cfg.unicode_canonicalization {
            stripped.nfc().collect()
        } else {
            stripped
        };
        let mapped = composed.chars().map(|c| *self.map.get(&c).unwrap_or(&c));
        if self.cfg.collapse_whitespace {
            collapse_whitespace(mapped)
        } else {
            mapped.collect()
        }
    }
}

/// Normalize `text` under `cfg`.
///
/// Validates the config on every call; for repeated use build a
/// [`Normalizer`] once instead.
pub fn normalize(text: &str, cfg: &NormalizationConfig) -> Result<String, ConfigError> {
    Ok(Normalizer::new(cfg)?.apply(text))
}

/// Zero-width and non-whitespace control characters removed by strip_controls.
/// Whitespace controls (\t, \n, \r, …) are left for the collapse stage so line
/// breaks become spaces rather than silently joining words.
fn is_stripped_control(c: char) -> bool {
    (c.is_control() && !c.is_whitespace())
        || matches!(c, '\u{200B}' | '\u{200C}' | '\u{200D}' | '\u{2060}' | '\u{FEFF}')
}

/// Collapse whitespace runs to a single U+0020 and trim the ends.
fn collapse_whitespace(chars: impl Iterator<Item = char>) -> String {
    let mut out = String::new();
    let mut pending_space = false;
    for c in chars {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

impl fmt::Display for ScriptClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ScriptClass::Ethiopic => "ethiopic",
            ScriptClass::Latin => "latin",
            ScriptClass::Digit => "digit",
            ScriptClass::Punctuation => "punctuation",
            ScriptClass::Whitespace => "whitespace",
            ScriptClass::Other => "other",
        };
        f.write_str(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classify_basics() {
        assert_eq!(classify_char('ሀ'), ScriptClass::Ethiopic); // U+1200
        assert_eq!(classify_char('a'), ScriptClass::Latin);
        assert_eq!(classify_char('።'), ScriptClass::Punctuation); // U+1362
        assert_eq!(classify_char('፡'), ScriptClass::Punctuation); // U+1361
        assert_eq!(classify_char('7'), ScriptClass::Digit);
        assert_eq!(classify_char(' '), ScriptClass::Whitespace);
        assert_eq!(classify_char('\t'), ScriptClass::Whitespace);
        assert_eq!(classify_char(','), ScriptClass::Punctuation);
        assert_eq!(classify_char('–'), ScriptClass::Punctuation); // en dash
        assert_eq!(classify_char('✓'), ScriptClass::Other);
        assert_eq!(classify_char('é'), ScriptClass::Latin);
        assert_eq!(classify_char('ⶀ'), ScriptClass::Ethiopic); // U+2D80
    }

    #[test]
    fn ethiopic_digits_are_ethiopic() {
        // Ethiopic numerals are No, not Nd, and sit inside the main block.
        assert_eq!(classify_char('፩'), ScriptClass::Ethiopic); // U+1369
    }

    #[test]
    fn profile_homogeneous() {
        let p = script_profile("ሀሀሀሀ");
        assert_eq!(p.total_chars, 4);
        assert_eq!(p.ethiopic_fraction, 1.0);
    }

    #[test]
    fn profile_mixed_counts() {
        let p = script_profile("ab12");
        assert_eq!(p.latin_fraction, 0.5);
        assert_eq!(p.digit_fraction, 0.5);
    }

    #[test]
    fn profile_tigrinya_sample() {
        let p = script_profile("ነባሪ ኣየር");
        assert_eq!(p.total_chars, 6); // whitespace excluded
        assert_eq!(p.ethiopic_fraction, 1.0);
    }

    #[test]
    fn profile_empty() {
        let p = script_profile("");
        assert_eq!(p.total_chars, 0);
        assert_eq!(p.ethiopic_fraction, 0.0);
        assert_eq!(p.other_fraction, 0.0);
    }

    #[test]
    fn profile_fractions_sum_to_one() {
        for text in ["ሰላም, world 123 – ✓", "ነባሪ ኣየር ኣብ ሓደ", "a።b"] {
            let p = script_profile(text);
            let sum = p.ethiopic_fraction
                + p.latin_fraction
                + p.digit_fraction
                + p.punct_fraction
                + p.other_fraction;
            assert!((sum - 1.0).abs() < 1e-9, "{text}: sum {sum}");
        }
    }

    #[test]
    fn normalize_single_rule() {
        let cfg = NormalizationConfig {
            char_map: vec![('ሠ', 'ሰ')],
            collapse_whitespace: true,
            strip_controls: true,
            unicode_canonicalization: true,
        };
        assert_eq!(normalize("ሠናይ", &cfg).unwrap(), "ሰናይ");
    }

    #[test]
    fn normalize_empty() {
        assert_eq!(normalize("", &NormalizationConfig::default_geez()).unwrap(), "");
    }

    #[test]
    fn normalize_collapses_and_trims() {
        let cfg = NormalizationConfig::default_geez();
        // ዓ also folds to ኣ under the default table.
        assert_eq!(normalize("  ሰላም \t ዓለም\n", &cfg).unwrap(), "ሰላም ኣለም");
    }

    #[test]
    fn normalize_strips_zero_width() {
        let cfg = NormalizationConfig::default_geez();
        assert_eq!(normalize("ሰ\u{200B}ላም\u{FEFF}", &cfg).unwrap(), "ሰላም");
    }

    #[test]
    fn stripping_precedes_composition() {
        // A zero-width space between base and combining mark must not block
        // composition, or a second pass would produce a different string.
        let cfg = NormalizationConfig::default_geez();
        let out = normalize("e\u{200B}\u{0301}", &cfg).unwrap();
        assert_eq!(out, "é");
        assert_eq!(normalize(&out, &cfg).unwrap(), out);
    }

    #[test]
    fn validate_rejects_combining_mark_rules() {
        let cfg = NormalizationConfig {
            char_map: vec![('A', '\u{0301}')],
            ..NormalizationConfig::identity()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::NonPrintableRule { .. })
        ));
    }

    #[test]
    fn normalize_applies_nfc_first() {
        let cfg = NormalizationConfig {
            char_map: vec![('é', 'e')],
            collapse_whitespace: false,
            strip_controls: false,
            unicode_canonicalization: true,
        };
        // Decomposed e + combining acute must hit the precomposed rule.
        assert_eq!(normalize("e\u{0301}", &cfg).unwrap(), "e");
    }

    #[test]
    fn default_table_folds_variants() {
        let cfg = NormalizationConfig::default_geez();
        assert_eq!(normalize("ሐደ", &cfg).unwrap(), "ሀደ");
        assert_eq!(normalize("ዓለም", &cfg).unwrap(), "ኣለም");
        assert_eq!(normalize("ፀሓይ", &cfg).unwrap(), "ጸሃይ");
    }

    #[test]
    fn validate_rejects_identity_rule() {
        let cfg = NormalizationConfig {
            char_map: vec![('ሀ', 'ሀ')],
            ..NormalizationConfig::identity()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::IdentityRule { .. })
        ));
    }

    #[test]
    fn validate_rejects_open_chain() {
        // a→b, b→c: target 'b' is not a fixed point.
        let cfg = NormalizationConfig {
            char_map: vec![('a', 'b'), ('b', 'c')],
            ..NormalizationConfig::identity()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::TargetNotFixed { .. })
        ));
    }

    #[test]
    fn validate_rejects_cycle() {
        let cfg = NormalizationConfig {
            char_map: vec![('a', 'b'), ('b', 'a')],
            ..NormalizationConfig::identity()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn validate_rejects_whitespace_rules() {
        let cfg = NormalizationConfig {
            char_map: vec![(' ', 'x')],
            ..NormalizationConfig::identity()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::NonPrintableRule { .. })
        ));
    }

    #[test]
    fn config_file_round_trip() {
        let cfg = NormalizationConfig::default_geez();
        let json = cfg.to_json();
        let back = NormalizationConfig::from_json(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn config_rejects_multichar_entry() {
        let err = NormalizationConfig::from_json(
            r#"{"unicode_canonicalization":true,"strip_controls":true,
                "collapse_whitespace":true,"char_map":[["ab","c"]]}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn normalize_idempotent_on_fixtures() {
        let cfg = NormalizationConfig::default_geez();
        let norm = Normalizer::new(&cfg).unwrap();
        // 100 deterministic pseudo-random fixture strings over a mixed pool.
        let pool: Vec<char> = "ሀሁሂሐሑሓኀሠሡሰሱዐዑአኣፀፁጸሹቃልab CdeF12,።፡–\u{200B}\t\n  é"
            .chars()
            .collect();
        let mut rng = crate::rng::SplitMix64::new(9);
        for _ in 0..100 {
            let len = rng.next_below(40) as usize;
            let s: String = (0..len)
                .map(|_| pool[rng.next_below(pool.len() as u64) as usize])
                .collect();
            let once = norm.apply(&s);
            assert_eq!(norm.apply(&once), once, "not idempotent for {s:?}");
        }
    }

    proptest! {
        #[test]
        fn classification_is_total(c in any::<char>()) {
            // Must not panic, and returns exactly one class by construction.
            let _ = classify_char(c);
        }

        #[test]
        fn normalize_idempotent_prop(s in "\\PC{0,64}") {
            let norm = Normalizer::new(&NormalizationConfig::default_geez()).unwrap();
            let once = norm.apply(&s);
            prop_assert_eq!(norm.apply(&once), once);
        }

        #[test]
        fn normalize_introduces_no_foreign_chars(s in "\\PC{0,64}") {
            let cfg = NormalizationConfig::default_geez();
            let norm = Normalizer::new(&cfg).unwrap();
            let out = norm.apply(&s);
            let targets: std::collections::HashSet<char> =
                cfg.char_map.iter().map(|(_, t)| *t).collect();
            // NFC may re-compose original characters; compare against the
            // composed input, which is what the pipeline actually maps.
            let composed: std::collections::HashSet<char> =
                unicode_normalization::UnicodeNormalization::nfc(s.as_str()).collect();
            for c in out.chars() {
                prop_assert!(
                    c == ' ' || targets.contains(&c) || composed.contains(&c),
                    "unexpected char {:?}", c
                );
            }
        }
    }
}
