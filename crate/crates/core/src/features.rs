//! Character n-gram and word featurization.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Pools, Sentence, CHARSET};
use crate::{Error, Label, Result, NUM_LABELS};

/// Number of accepted characters, and the size of the unigram space.
pub const CHARSET_SIZE: usize = 40;

/// Position of `c` in [`CHARSET`].
pub fn char_index(c: char) -> Option<usize> {
    CHARSET.chars().position(|x| x == c)
}

pub fn charset_char(i: usize) -> Option<char> {
    CHARSET.chars().nth(i)
}

/// Sliding windows of `n` characters with stride one. Spaces are included.
pub fn char_ngrams(text: &str, n: usize) -> impl Iterator<Item = &str> + '_ {
    let bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).chain([text.len()]).collect();
    let count = if n == 0 { 0 } else { bounds.len().saturating_sub(n) };
    (0..count).map(move |i| &text[bounds[i]..bounds[i + n]])
}

pub fn extract_char_ngrams(text: &str, n: usize) -> Vec<&str> {
    char_ngrams(text, n).collect()
}

/// Splits on spaces and drops empty tokens.
pub fn word_tokenize(text: &str) -> Vec<&str> {
    text.split(' ').filter(|w| !w.is_empty()).collect()
}

/// Token table ranked by descending corpus frequency, ties broken by
/// lexicographic order. Index 0 is the most frequent token.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl Vocabulary {
    /// Ranks every distinct token; `cap` keeps only the top entries.
    pub fn from_counts(counts: BTreeMap<String, u64>, cap: Option<usize>) -> Self {
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        // BTreeMap iteration is already lexicographic, so a stable sort by
        // count keeps the tie order.
        ranked.sort_by(|a, b| b.1.cmp(&a.1));
        if let Some(cap) = cap {
            ranked.truncate(cap);
        }
        Self::from_tokens(ranked.into_iter().map(|(t, _)| t).collect())
    }

    /// Builds from tokens listed in index order.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Self { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).map(|&i| i as usize)
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Counts in-vocabulary tokens; unknown tokens are ignored.
    pub fn vectorize<'a, I>(&self, tokens: I, normalize: bool) -> FeatureVector
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut hits: Vec<u32> = tokens.into_iter().filter_map(|t| self.index.get(t).copied()).collect();
        hits.sort_unstable();
        let mut entries: Vec<(u32, f64)> = Vec::new();
        for h in hits {
            match entries.last_mut() {
                Some((i, c)) if *i == h => *c += 1.0,
                _ => entries.push((h, 1.0)),
            }
        }
        let mut v = FeatureVector { dim: self.len(), entries };
        if normalize {
            v.l1_normalize();
        }
        v
    }
}

fn count_tokens<'a>(tokens: impl Iterator<Item = &'a str>, counts: &mut BTreeMap<String, u64>) {
    for t in tokens {
        if let Some(c) = counts.get_mut(t) {
            *c += 1;
        } else {
            counts.insert(String::from(t), 1);
        }
    }
}

/// Character n-gram vocabulary of a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramVocabulary {
    pub n: usize,
    pub vocab: Vocabulary,
}

impl NgramVocabulary {
    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn get(&self, ngram: &str) -> Option<usize> {
        self.vocab.get(ngram)
    }
}

pub fn build_ngram_vocab(corpus: &[Sentence], n: usize) -> NgramVocabulary {
    build_ngram_vocab_capped(corpus.iter().map(Sentence::text), n, None)
}

pub fn build_ngram_vocab_capped<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    n: usize,
    cap: Option<usize>,
) -> NgramVocabulary {
    let mut counts = BTreeMap::new();
    for t in texts {
        count_tokens(char_ngrams(t, n), &mut counts);
    }
    NgramVocabulary { n, vocab: Vocabulary::from_counts(counts, cap) }
}

pub fn vectorize(text: &str, vocab: &NgramVocabulary, normalize: bool) -> FeatureVector {
    vocab.vocab.vectorize(char_ngrams(text, vocab.n), normalize)
}

/// Word vocabulary; rank 1 is the most frequent word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordVocabulary {
    pub vocab: Vocabulary,
}

impl WordVocabulary {
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.vocab.get(word).map(|i| i + 1)
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }
}

pub fn build_word_vocab(corpus: &[Sentence]) -> WordVocabulary {
    build_word_vocab_capped(corpus.iter().map(Sentence::text), None)
}

pub fn build_word_vocab_capped<'a>(texts: impl IntoIterator<Item = &'a str>, cap: Option<usize>) -> WordVocabulary {
    let mut counts = BTreeMap::new();
    for t in texts {
        count_tokens(word_tokenize(t).into_iter(), &mut counts);
    }
    WordVocabulary { vocab: Vocabulary::from_counts(counts, cap) }
}

/// Bag-of-words vector; index = rank − 1.
pub fn vectorize_words(text: &str, vocab: &WordVocabulary, normalize: bool) -> FeatureVector {
    vocab.vocab.vectorize(word_tokenize(text), normalize)
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// Builds from `(index, value)` pairs in any order; duplicates are summed
    /// and zeros dropped.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(u32, f64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            if i as usize >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i as usize + 1 });
            }
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        Ok(Self { dim, entries })
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32, *v))
            .collect();
        Self { dim: values.len(), entries }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|&(i, v)| (i as usize, v))
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(index as u32), |e| e.0)
            .map_or(0.0, |p| self.entries[p].1)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Divides by the entry sum; a zero vector stays zero.
    pub fn l1_normalize(&mut self) {
        let total = self.sum();
        if total != 0.0 {
            for e in &mut self.entries {
                e.1 /= total;
            }
        }
    }

    /// Dot product with a dense weight row of the same dimension.
    #[inline]
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i as usize]).sum()
    }

    /// `dense += alpha * self`
    #[inline]
    pub fn add_scaled_to(&self, alpha: f64, dense: &mut [f64]) {
        for &(i, v) in &self.entries {
            dense[i as usize] += alpha * v;
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum()
    }

    /// Squared Euclidean distance, summed in ascending index order.
    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() || j < b.len() {
            let d = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    i += 1;
                    j += 1;
                    x.1 - y.1
                }
                (Some(x), Some(y)) if x.0 < y.0 => {
                    i += 1;
                    x.1
                }
                (Some(x), None) => {
                    i += 1;
                    x.1
                }
                (_, Some(y)) => {
                    j += 1;
                    -y.1
                }
                (None, None) => unreachable!(),
            };
            acc += d * d;
        }
        acc
    }
}

/// Per-language character counts over the 40-character alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct CharProfile {
    /// `raw[label][char]`
    pub raw: [[u64; CHARSET_SIZE]; NUM_LABELS],
    /// Each character column divided by its total over all labels.
    pub normalized: [[f64; CHARSET_SIZE]; NUM_LABELS],
}

impl CharProfile {
    pub fn count(&self, label: Label, c: char) -> u64 {
        char_index(c).map_or(0, |i| self.raw[label.index()][i])
    }

    /// Characters ordered by total frequency, most frequent first.
    pub fn chars_by_frequency(&self) -> Vec<char> {
        let mut order: Vec<usize> = (0..CHARSET_SIZE).collect();
        let total = |c: usize| -> u64 { self.raw.iter().map(|r| r[c]).sum() };
        order.sort_by(|&a, &b| total(b).cmp(&total(a)).then(a.cmp(&b)));
        order.into_iter().filter_map(charset_char).collect()
    }
}

pub fn char_frequency_profile(pools: &Pools) -> CharProfile {
    let mut raw = [[0u64; CHARSET_SIZE]; NUM_LABELS];
    for (label, sentences) in pools {
        for s in sentences {
            for c in s.text().chars() {
                if let Some(i) = char_index(c) {
                    raw[label.index()][i] += 1;
                }
            }
        }
    }
    let mut normalized = [[0.0; CHARSET_SIZE]; NUM_LABELS];
    for c in 0..CHARSET_SIZE {
        let total: u64 = raw.iter().map(|r| r[c]).sum();
        if total > 0 {
            for l in 0..NUM_LABELS {
                normalized[l][c] = raw[l][c] as f64 / total as f64;
            }
        }
    }
    CharProfile { raw, normalized }
}
