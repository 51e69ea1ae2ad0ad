//! Sentence extraction, character cleaning and dataset construction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::{rng, Error, Label, Result, NUM_LABELS};

/// The 40 accepted characters: 26 ASCII letters, 13 Nordic letters, space.
pub const CHARSET: &str = "abcdefghijklmnopqrstuvwxyzáäåæéíðóöøúýþ ";

/// Cleaned sentences shorter than this are dropped at ingestion; a single
/// character carries no bigram.
pub const MIN_SENTENCE_CHARS: usize = 2;

/// Abbreviations that never end a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "ca.", "kl.", "bl.a.", "f.eks.", "etc.", "nr.", "dr.", "mr.", "t.d.", "o.s.frv.", "mrs.",
    "st.", "jf.", "evt.", "osv.", "m.fl.", "m.m.", "pga.", "t.ex.", "s.k.", "o.l.", "f.x.",
];

pub fn is_accepted(c: char) -> bool {
    matches!(c, 'a'..='z' | ' ')
        || matches!(
            c,
            'á' | 'ä' | 'å' | 'æ' | 'é' | 'í' | 'ð' | 'ó' | 'ö' | 'ø' | 'ú' | 'ý' | 'þ'
        )
}

/// Guard list consulted by [`extract_sentences`]. Entries are lowercase and
/// include the trailing period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations {
    entries: Vec<String>,
}

impl Default for Abbreviations {
    fn default() -> Self {
        Self {
            entries: DEFAULT_ABBREVIATIONS.iter().map(|s| String::from(*s)).collect(),
        }
    }
}

impl Abbreviations {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Adds one abbreviation per non-blank line; `#` starts a comment line.
    pub fn extend_from_text(&mut self, text: &str) {
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut entry = line.to_lowercase();
            if !entry.ends_with('.') {
                entry.push('.');
            }
            if !self.entries.contains(&entry) {
                self.entries.push(entry);
            }
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        let lower = word.to_lowercase();
        self.entries.iter().any(|e| *e == lower)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Splits raw text into sentences with the default abbreviation list.
pub fn extract_sentences(raw: &str) -> Vec<String> {
    extract_sentences_with(raw, &Abbreviations::default())
}

/// Splits on line breaks, then after `.`, `!` or `?` when followed by
/// whitespace, unless the period closes a guarded abbreviation.
pub fn extract_sentences_with(raw: &str, abbreviations: &Abbreviations) -> Vec<String> {
    let mut out = Vec::new();
    for line in raw.lines() {
        let mut start = 0;
        let mut word_start = 0;
        let mut chars = line.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c.is_whitespace() {
                word_start = i + c.len_utf8();
                continue;
            }
            if !matches!(c, '.' | '!' | '?') {
                continue;
            }
            let followed_by_space = matches!(chars.peek(), Some((_, n)) if n.is_whitespace());
            if !followed_by_space {
                continue;
            }
            let end = i + c.len_utf8();
            let word = line[word_start..end].trim_start_matches(|c: char| !c.is_alphanumeric());
            if c == '.' && abbreviations.contains(word) {
                continue;
            }
            push_trimmed(&mut out, &line[start..end]);
            start = end;
        }
        push_trimmed(&mut out, &line[start..]);
    }
    out
}

fn push_trimmed(out: &mut Vec<String>, fragment: &str) {
    let t = fragment.trim();
    if !t.is_empty() {
        out.push(String::from(t));
    }
}

/// Lowercases, replaces every character outside [`CHARSET`] by a space,
/// collapses space runs and strips leading spaces. A trailing space survives.
pub fn clean_sentence(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().flat_map(char::to_lowercase) {
        let c = if is_accepted(c) { c } else { ' ' };
        if c == ' ' && (out.is_empty() || out.ends_with(' ')) {
            continue;
        }
        out.push(c);
    }
    out
}

/// A cleaned, labeled sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    text: String,
    label: Label,
    length: usize,
}

impl Sentence {
    /// Cleans `raw`; `None` if fewer than [`MIN_SENTENCE_CHARS`] remain.
    pub fn from_raw(label: Label, raw: &str) -> Option<Sentence> {
        let text = clean_sentence(raw);
        let length = text.chars().count();
        (length >= MIN_SENTENCE_CHARS).then_some(Sentence { text, label, length })
    }

    /// Wraps text that is already clean; fails if any character is outside
    /// the charset or the text is empty.
    pub fn from_clean(label: Label, text: &str) -> Result<Sentence> {
        if text.is_empty() || !text.chars().all(is_accepted) {
            return Err(Error::InvalidConfig("sentence text is not cleaned"));
        }
        Ok(Sentence {
            length: text.chars().count(),
            text: String::from(text),
            label,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// Number of characters in the cleaned text.
    pub fn length(&self) -> usize {
        self.length
    }
}

/// Sentences grouped by language.
pub type Pools = BTreeMap<Label, Vec<Sentence>>;

/// Ordered sentence collection.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub sentences: Vec<Sentence>,
    pub seed: u64,
}

impl Dataset {
    pub fn new(sentences: Vec<Sentence>, seed: u64) -> Self {
        Self { sentences, seed }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Sentence> {
        self.sentences.iter()
    }

    pub fn per_class_count(&self) -> [usize; NUM_LABELS] {
        let mut counts = [0; NUM_LABELS];
        for s in &self.sentences {
            counts[s.label().index()] += 1;
        }
        counts
    }

    pub fn is_stratified(&self) -> bool {
        let c = self.per_class_count();
        c.iter().all(|&x| x == c[0])
    }

    pub fn labels(&self) -> Vec<Label> {
        self.sentences.iter().map(Sentence::label).collect()
    }

    pub fn to_pools(&self) -> Pools {
        let mut pools = Pools::new();
        for s in &self.sentences {
            pools.entry(s.label()).or_default().push(s.clone());
        }
        pools
    }

    /// Concatenates two datasets, keeping `self`'s seed.
    pub fn concat(&self, other: &Dataset) -> Dataset {
        let mut sentences = self.sentences.clone();
        sentences.extend(other.sentences.iter().cloned());
        Dataset::new(sentences, self.seed)
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Sentence;
    type IntoIter = core::slice::Iter<'a, Sentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}

/// Draws exactly `n_per_class` sentences per label without replacement.
/// Chosen sentences keep their pool order; labels appear in canonical order.
pub fn stratified_sample(pool: &Pools, n_per_class: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::seeded(seed);
    let mut sentences = Vec::with_capacity(n_per_class * NUM_LABELS);
    for label in Label::ALL {
        let available = pool.get(&label).map_or(&[][..], Vec::as_slice);
        if available.len() < n_per_class {
            return Err(Error::InsufficientData {
                label,
                available: available.len(),
                requested: n_per_class,
            });
        }
        let mut picked = rand::seq::index::sample(&mut rng, available.len(), n_per_class).into_vec();
        picked.sort_unstable();
        sentences.extend(picked.into_iter().map(|i| available[i].clone()));
    }
    Ok(Dataset::new(sentences, seed))
}

/// Per-label split: each label contributes `floor(ratio * n_label)` sentences
/// to train and the rest to test. Both halves keep the input order.
pub fn train_test_split(d: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    let mut rng = rng::seeded(seed);
    let mut in_train = alloc::vec![false; d.len()];
    for label in Label::ALL {
        let mut idx: Vec<usize> = d
            .sentences
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label() == label)
            .map(|(i, _)| i)
            .collect();
        // guard against 0.8 * 10 landing at 7.999...
        let n_train = crate::math::floor(ratio * idx.len() as f64 + 1e-9) as usize;
        idx.shuffle(&mut rng);
        for &i in &idx[..n_train] {
            in_train[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (s, t) in d.sentences.iter().zip(in_train) {
        if t {
            train.push(s.clone());
        } else {
            test.push(s.clone());
        }
    }
    Ok((Dataset::new(train, seed), Dataset::new(test, seed)))
}

/// Runs raw text for one label through extraction and cleaning.
pub fn pool_from_raw_text(label: Label, raw: &str, abbreviations: &Abbreviations) -> Vec<Sentence> {
    extract_sentences_with(raw, abbreviations)
        .iter()
        .filter_map(|s| Sentence::from_raw(label, s))
        .collect()
}

/// Result of reading a `<code>\t<sentence>` file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TsvImport {
    pub pools: Pools,
    /// Rows whose label code is not one of the six.
    pub unknown_label_rows: usize,
    /// Rows whose sentence cleaned down to fewer than two characters.
    pub dropped_short: usize,
}

/// Parses labeled raw sentences, one `<code>\t<text>` record per line.
/// Blank lines are ignored; line numbers in errors are 1-based.
pub fn parse_labeled_raw(text: &str) -> Result<TsvImport> {
    let mut import = TsvImport::default();
    for (n, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(code), Some(raw), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::MalformedRow(n + 1));
        };
        let Some(label) = Label::from_code(code) else {
            import.unknown_label_rows += 1;
            continue;
        };
        match Sentence::from_raw(label, raw) {
            Some(s) => import.pools.entry(label).or_default().push(s),
            None => import.dropped_short += 1,
        }
    }
    Ok(import)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use std::string::ToString;

    const HESBJERG_RAW: &str =
        "Hesbjerg er dannet ved sammenlægning af de 2 gårde Store Hesbjerg og Lille Hesbjerg i 1822.";
    const HESBJERG_CLEAN: &str =
        "hesbjerg er dannet ved sammenlægning af de gårde store hesbjerg og lille hesbjerg i ";

    fn sentences(label: Label, n: usize) -> Vec<Sentence> {
        (0..n)
            .map(|i| Sentence::from_raw(label, &std::format!("{} s{}", label.code(), "x".repeat(i + 1))).unwrap())
            .collect()
    }

    #[test]
    fn charset_has_forty_characters() {
        assert_eq!(CHARSET.chars().count(), 40);
        assert!(CHARSET.chars().all(is_accepted));
    }

    #[test]
    fn extract_sentences_examples() {
        assert!(extract_sentences("").is_empty());
        assert_eq!(extract_sentences("A b. C d!\nE f"), vec!["A b.", "C d!", "E f"]);
        assert_eq!(
            extract_sentences("Han kom ca. kl. fem. Det var sent."),
            vec!["Han kom ca. kl. fem.", "Det var sent."]
        );
    }

    #[test]
    fn abbreviation_guard_is_case_insensitive_and_extensible() {
        assert_eq!(extract_sentences("Se Dr. Hansen. Ok"), vec!["Se Dr. Hansen.", "Ok"]);
        assert_eq!(extract_sentences("Se fx. dette. Ok").len(), 3);
        let mut abbr = Abbreviations::default();
        abbr.extend_from_text("# comment\nfx\n");
        assert_eq!(extract_sentences_with("Se fx. dette. Ok", &abbr).len(), 2);
    }

    #[test]
    fn split_requires_trailing_whitespace() {
        assert_eq!(extract_sentences("version 1.2 er ude"), vec!["version 1.2 er ude"]);
        assert_eq!(extract_sentences("Hvad?! Nej."), vec!["Hvad?!", "Nej."]);
        assert_eq!(extract_sentences("a\r\nb"), vec!["a", "b"]);
    }

    #[test]
    fn clean_sentence_examples() {
        assert_eq!(clean_sentence(HESBJERG_RAW), HESBJERG_CLEAN);
        assert_eq!(clean_sentence(""), "");
        assert_eq!(clean_sentence("ABC123"), "abc ");
        assert_eq!(clean_sentence("  Þú ÐÖ"), "þú ðö");
        assert_eq!(clean_sentence("Москва er by"), "er by");
    }

    #[test]
    fn stratified_sample_identity_and_determinism() {
        let mut pool = Pools::new();
        for l in Label::ALL {
            pool.insert(l, sentences(l, 5));
        }
        let d = stratified_sample(&pool, 5, 7).unwrap();
        assert_eq!(d.len(), 30);
        assert!(d.is_stratified());

        let mut big = Pools::new();
        for l in Label::ALL {
            big.insert(l, sentences(l, 100));
        }
        let a = stratified_sample(&big, 10, 42).unwrap();
        let b = stratified_sample(&big, 10, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_class_count(), [10; 6]);
    }

    #[test]
    fn stratified_sample_insufficient() {
        let mut pool = Pools::new();
        for l in Label::ALL {
            pool.insert(l, sentences(l, if l == Label::Dk { 3 } else { 10 }));
        }
        assert_eq!(
            stratified_sample(&pool, 5, 1),
            Err(Error::InsufficientData { label: Label::Dk, available: 3, requested: 5 })
        );
    }

    #[test]
    fn split_counts() {
        let mut s = Vec::new();
        for l in Label::ALL {
            s.extend(sentences(l, 10));
        }
        let d = Dataset::new(s, 0);
        let (train, test) = train_test_split(&d, 0.8, 3).unwrap();
        assert_eq!(train.per_class_count(), [8; 6]);
        assert_eq!(test.per_class_count(), [2; 6]);
        assert_eq!(train_test_split(&d, 1.0, 3), Err(Error::InvalidRatio(1.0)));
        assert!(train_test_split(&d, 0.0, 3).is_err());
        assert!(train_test_split(&d, f64::NAN, 3).is_err());
    }

    #[test]
    fn split_counts_at_full_scale() {
        // 50K per label, as in the large dataset
        let s: Vec<Sentence> = Label::ALL
            .iter()
            .flat_map(|&l| core::iter::repeat_n(Sentence::from_raw(l, "ab").unwrap(), 50_000))
            .collect();
        let d = Dataset::new(s, 0);
        let (train, test) = train_test_split(&d, 0.8, 42).unwrap();
        assert_eq!(train.per_class_count(), [40_000; 6]);
        assert_eq!(test.per_class_count(), [10_000; 6]);
    }

    #[test]
    fn raw_text_with_only_digits_yields_empty_pool() {
        assert!(pool_from_raw_text(Label::Fo, "1822.", &Abbreviations::default()).is_empty());
    }

    #[test]
    fn labeled_rows() {
        let imp = parse_labeled_raw("dk\tJeg kan ikke lide æg.").unwrap();
        let dk = &imp.pools[&Label::Dk];
        assert_eq!(dk.len(), 1);
        assert_eq!(dk[0].text(), "jeg kan ikke lide æg ");

        let imp = parse_labeled_raw("xx\tfoo\n").unwrap();
        assert_eq!(imp.unknown_label_rows, 1);
        assert!(imp.pools.is_empty());

        assert_eq!(parse_labeled_raw("dk foo"), Err(Error::MalformedRow(1)));
        assert_eq!(parse_labeled_raw("sv\tok\ndk\ta\tb"), Err(Error::MalformedRow(2)));
        assert_eq!("dk".to_string(), Label::Dk.to_string());
    }
}
