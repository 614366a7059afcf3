//! Greedy BPE training.
//!
//! The loop is the textbook algorithm: count adjacent symbol pairs over the
//! word multiset, merge the most frequent pair, repeat until the vocabulary
//! target is reached or no pair clears the frequency threshold. Ties break by
//! lexicographic order of the (left, right) pair under codepoint ordering, so
//! training is a pure function of its inputs. Pair counts update
//! incrementally (subtract a word's pairs, rewrite the word, re-add) instead
//! of rescanning the corpus each round.

use super::{word_symbols, Affix, TokenizerError, TokenizerModel, BOUNDARY_MARKER};
use super::{BOS_TOKEN, EOS_TOKEN, PAD_TOKEN, UNK_TOKEN};
use crate::script_norm::{NormalizationConfig, Normalizer};
use std::collections::{BTreeSet, HashMap, HashSet};

/// Training parameters.
///
/// `seed` is recorded for provenance and does not influence the output:
/// training has no stochastic step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeTrainConfig {
    pub vocab_size: usize,
    pub min_pair_frequency: u64,
    pub seed: u64,
}

impl Default for BpeTrainConfig {
    fn default() -> Self {
        Self {
            vocab_size: 8000,
            min_pair_frequency: 2,
            seed: 42,
        }
    }
}

type Pair = (String, String);

struct Word {
    /// Protected segments; merges never cross segment boundaries.
    segments: Vec<Vec<String>>,
    freq: u64,
}

impl Word {
    fn count_pairs_into(&self, counts: &mut HashMap<Pair, u64>, sign_add: bool) {
        for segment in &self.segments {
            for pair in segment.windows(2) {
                let key = (pair[0].clone(), pair[1].clone());
                if sign_add {
                    *counts.entry(key).or_insert(0) += self.freq;
                } else if let Some(c) = counts.get_mut(&key) {
                    *c -= self.freq;
                    if *c == 0 {
                        counts.remove(&key);
                    }
                }
            }
        }
    }
}

/// Train a BPE model over `corpus` (line order is part of the input contract
/// but does not affect the result; only the word multiset does).
pub fn train_bpe(
    corpus: &[impl AsRef<str>],
    cfg: &BpeTrainConfig,
    norm: &NormalizationConfig,
    affixes: &[Affix],
) -> Result<TokenizerModel, TokenizerError> {
    let specials = [UNK_TOKEN, PAD_TOKEN, BOS_TOKEN, EOS_TOKEN];
    if cfg.vocab_size < specials.len() {
        return Err(TokenizerError::VocabTooSmall {
            got: cfg.vocab_size,
            specials: specials.len(),
        });
    }
    if corpus.is_empty() {
        return Err(TokenizerError::EmptyCorpus);
    }
    let normalizer = Normalizer::new(norm)?;

    // Collect the word multiset and the observed alphabet.
    let mut word_freqs: HashMap<String, u64> = HashMap::new();
    let mut alphabet: BTreeSet<char> = BTreeSet::new();
    for line in corpus {
        for word in normalizer.apply(line.as_ref()).split_whitespace() {
            *word_freqs.entry(word.to_string()).or_insert(0) += 1;
            alphabet.extend(word.chars());
        }
    }
    if alphabet.is_empty() {
        return Err(TokenizerError::EmptyCorpus);
    }

    // Base vocabulary: specials, bare characters, marker-fused characters.
    let mut tokens: Vec<String> = specials.iter().map(|s| s.to_string()).collect();
    let mut seen: HashSet<String> = tokens.iter().cloned().collect();
    for &c in &alphabet {
        let t = c.to_string();
        if seen.insert(t.clone()) {
            tokens.push(t);
        }
    }
    for &c in &alphabet {
        let mut t = String::new();
        t.push(BOUNDARY_MARKER);
        t.push(c);
        if seen.insert(t.clone()) {
            tokens.push(t);
        }
    }

    // Deterministic word order is not required for correctness (counting is
    // order-free), but keeps iteration reproducible for debugging.
    let mut words: Vec<Word> = {
        let mut entries: Vec<(String, u64)> = word_freqs.into_iter().collect();
        entries.sort_unstable();
        entries
            .into_iter()
            .map(|(word, freq)| Word {
                segments: word_symbols(&word, affixes, BOUNDARY_MARKER),
                freq,
            })
            .collect()
    };

    let mut pair_counts: HashMap<Pair, u64> = HashMap::new();
    let mut pair_words: HashMap<Pair, HashSet<usize>> = HashMap::new();
    for (index, word) in words.iter().enumerate() {
        word.count_pairs_into(&mut pair_counts, true);
        for segment in &word.segments {
            for pair in segment.windows(2) {
                pair_words
                    .entry((pair[0].clone(), pair[1].clone()))
                    .or_default()
                    .insert(index);
            }
        }
    }

    let mut merges: Vec<Pair> = Vec::new();
    let mut merged_pairs: HashSet<Pair> = HashSet::new();

    while tokens.len() < cfg.vocab_size {
        // Most frequent pair; ties by lexicographically smallest (left, right).
        let best = pair_counts
            .iter()
            .filter(|(pair, count)| **count >= cfg.min_pair_frequency && !merged_pairs.contains(pair))
            .map(|(pair, count)| (*count, pair.clone()))
            .fold(None::<(u64, Pair)>, |best, (count, pair)| match best {
                None => Some((count, pair)),
                Some((bc, bp)) => {
                    if count > bc || (count == bc && pair < bp) {
                        Some((count, pair))
                    } else {
                        Some((bc, bp))
                    }
                }
            });
        let Some((_, pair)) = best else { break };

        let new_token = format!("{}{}", pair.0, pair.1);
        if seen.insert(new_token.clone()) {
            tokens.push(new_token);
        }
        merges.push(pair.clone());
        merged_pairs.insert(pair.clone());

        // Rewrite every word that may contain the pair, updating counts.
        let affected = pair_words.remove(&pair).unwrap_or_default();
        for index in affected {
            let word = &mut words[index];
            word.count_pairs_into(&mut pair_counts, false);
            for segment in &mut word.segments {
                super::merge_in_place(segment, &pair.0, &pair.1);
            }
            let word = &words[index];
            word.count_pairs_into(&mut pair_counts, true);
            for segment in &word.segments {
                for window in segment.windows(2) {
                    pair_words
                        .entry((window[0].clone(), window[1].clone()))
                        .or_default()
                        .insert(index);
                }
            }
        }
    }

    TokenizerModel::from_parts(norm, tokens, merges, affixes.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity() -> NormalizationConfig {
        NormalizationConfig::identity()
    }

    /// Independent brute-force oracle: recount every adjacent pair from
    /// scratch at each step and pick (max count, lexicographically smallest).
    /// Mirrors only the *specification* of a step, not the trainer's
    /// incremental bookkeeping.
    fn oracle_merges(corpus: &[&str], merge_rounds: usize, min_freq: u64) -> Vec<(String, String)> {
        let mut words: Vec<Vec<Vec<String>>> = corpus
            .iter()
            .flat_map(|line| line.split_whitespace())
            .map(|w| word_symbols(w, &[], BOUNDARY_MARKER))
            .collect();
        let mut merges = Vec::new();
        for _ in 0..merge_rounds {
            let mut counts: HashMap<(String, String), u64> = HashMap::new();
            for word in &words {
                for segment in word {
                    for pair in segment.windows(2) {
                        *counts
                            .entry((pair[0].clone(), pair[1].clone()))
                            .or_insert(0) += 1;
                    }
                }
            }
            let best = counts
                .into_iter()
                .filter(|(_, c)| *c >= min_freq)
                .map(|(pair, count)| (count, pair))
                .fold(None::<(u64, (String, String))>, |acc, (c, p)| match acc {
                    None => Some((c, p)),
                    Some((bc, bp)) if c > bc || (c == bc && p < bp) => Some((c, p)),
                    acc => acc,
                });
            let Some((_, pair)) = best else { break };
            for word in &mut words {
                for segment in word.iter_mut() {
                    super::super::merge_in_place(segment, &pair.0, &pair.1);
                }
            }
            merges.push(pair);
        }
        merges
    }

    #[test]
    fn ababab_matches_pair_count_oracle() {
        // Base vocab: 4 specials + {a,b} + {▁a,▁b} = 8; +2 merges = 10.
        let cfg = BpeTrainConfig {
            vocab_size: 10,
            min_pair_frequency: 1,
            seed: 42,
        };
        let corpus = ["ababab"];
        let model = train_bpe(&corpus, &cfg, &identity(), &[]).unwrap();
        let expect = vec![
            ("a".to_string(), "b".to_string()),
            ("ab".to_string(), "ab".to_string()),
        ];
        assert_eq!(model.merges(), expect.as_slice());
        assert_eq!(oracle_merges(&corpus, 2, 1), expect);
    }

    #[test]
    fn trainer_agrees_with_oracle_on_mixed_corpus() {
        let corpus = ["ሰላም ሰላም ዓለም", "ሰላሰላ ዓለም ዓለም", "ab ab abc"];
        let cfg = BpeTrainConfig {
            vocab_size: 60,
            min_pair_frequency: 2,
            seed: 42,
        };
        let model = train_bpe(&corpus, &cfg, &identity(), &[]).unwrap();
        let rounds = model.merges().len();
        assert_eq!(model.merges(), oracle_merges(&corpus, rounds + 1, 2));
    }

    #[test]
    fn single_char_corpus_has_no_merges() {
        for vocab_size in [4usize, 8, 100] {
            let cfg = BpeTrainConfig {
                vocab_size,
                min_pair_frequency: 1,
                seed: 42,
            };
            let model = train_bpe(&["x"], &cfg, &identity(), &[]).unwrap();
            assert!(model.merges().is_empty());
            assert!(model.token_to_id("▁x").is_some() || vocab_size < 6);
            // Specials always occupy ids 0..4 in order.
            assert_eq!(model.id_to_token(0), Some(UNK_TOKEN));
            assert_eq!(model.id_to_token(1), Some(PAD_TOKEN));
            assert_eq!(model.id_to_token(2), Some(BOS_TOKEN));
            assert_eq!(model.id_to_token(3), Some(EOS_TOKEN));
        }
    }

    #[test]
    fn empty_corpus_errors() {
        let none: [&str; 0] = [];
        assert!(matches!(
            train_bpe(&none, &BpeTrainConfig::default(), &identity(), &[]),
            Err(TokenizerError::EmptyCorpus)
        ));
        assert!(matches!(
            train_bpe(&["   \t  "], &BpeTrainConfig::default(), &identity(), &[]),
            Err(TokenizerError::EmptyCorpus)
        ));
    }

    #[test]
    fn vocab_size_below_specials_errors() {
        let cfg = BpeTrainConfig {
            vocab_size: 3,
            ..Default::default()
        };
        assert!(matches!(
            train_bpe(&["ab"], &cfg, &identity(), &[]),
            Err(TokenizerError::VocabTooSmall { .. })
        ));
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = ["ሰላም ዓለም ሰላም", "ab ab ba", "ቀጥታዊ ርክብ ኣለዎ"];
        let cfg = BpeTrainConfig {
            vocab_size: 64,
            min_pair_frequency: 1,
            seed: 42,
        };
        let a = train_bpe(&corpus, &cfg, &identity(), &[]).unwrap();
        let b = train_bpe(&corpus, &cfg, &identity(), &[]).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn merges_stop_below_min_frequency() {
        // Every pair occurs once; threshold 2 ⇒ no merges even with room.
        let cfg = BpeTrainConfig {
            vocab_size: 1000,
            min_pair_frequency: 2,
            seed: 42,
        };
        let model = train_bpe(&["abcdef"], &cfg, &identity(), &[]).unwrap();
        assert!(model.merges().is_empty());
    }

    #[test]
    fn every_observed_char_is_in_vocab() {
        let corpus = ["ነባሪ ኣየር ኣብ ሓደ", "climate 42"];
        let model = train_bpe(&corpus, &BpeTrainConfig::default(), &identity(), &[]).unwrap();
        for line in corpus {
            for c in line.chars().filter(|c| !c.is_whitespace()) {
                assert!(
                    model.token_to_id(&c.to_string()).is_some(),
                    "missing char {c:?}"
                );
                assert!(
                    model.token_to_id(&format!("▁{c}")).is_some(),
                    "missing fused form for {c:?}"
                );
            }
        }
    }

    #[test]
    fn merge_concatenations_are_in_vocab() {
        let corpus = ["abab abab cdcd", "ababcd"];
        let cfg = BpeTrainConfig {
            vocab_size: 40,
            min_pair_frequency: 1,
            seed: 42,
        };
        let model = train_bpe(&corpus, &cfg, &identity(), &[]).unwrap();
        assert!(!model.merges().is_empty());
        for (left, right) in model.merges() {
            assert!(model.token_to_id(&format!("{left}{right}")).is_some());
        }
        // Duplicate-free merge list.
        let set: HashSet<_> = model.merges().iter().collect();
        assert_eq!(set.len(), model.merges().len());
    }
}
