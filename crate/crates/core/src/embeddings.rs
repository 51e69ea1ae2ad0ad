//! CBOW and skip-gram embeddings trained with negative sampling, and a
//! supervised averaged-embedding classifier.
//!
//! Skip-gram input vectors are the mean of a word's own row and the rows of
//! its hashed subword n-grams. Only buckets actually hit by the training
//! vocabulary get a row, so the matrix stays proportional to the corpus rather
//! than to `bucket_count`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::corpus::{Dataset, Sentence};
use crate::features::{word_tokenize, Vocabulary};
use crate::label::argmax;
use crate::math::{axpy, dot, exp, ln, pow};
use crate::neural::softmax;
use crate::{rng, Error, Label, Result, NUM_LABELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingMode {
    Cbow,
    Skipgram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConfig {
    pub mode: EmbeddingMode,
    pub dim: usize,
    /// Maximum context radius; each position samples its radius from `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial rate, decayed linearly to zero over all epochs.
    pub learning_rate: f64,
    pub subword_min: usize,
    pub subword_max: usize,
    pub bucket_count: u32,
    pub min_count: u64,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            mode: EmbeddingMode::Skipgram,
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.05,
            subword_min: 3,
            subword_max: 6,
            bucket_count: 1 << 20,
            min_count: 1,
            seed: 42,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("embedding dim must be at least 1"));
        }
        if self.window == 0 || self.negatives == 0 {
            return Err(Error::InvalidConfig("window and negatives must be at least 1"));
        }
        if self.subword_min == 0 || self.subword_min > self.subword_max {
            return Err(Error::InvalidConfig("subword range must satisfy 1 <= min <= max"));
        }
        if self.bucket_count == 0 {
            return Err(Error::InvalidConfig("bucket_count must be positive"));
        }
        Ok(())
    }
}

/// 32-bit FNV-1a over the UTF-8 bytes.
pub fn fnv1a(s: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in s.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

/// Character n-grams of `<word>` for every order in `min..=max`, ordered by
/// order then position, followed by the full marked token when it is not
/// already present.
pub fn subword_ngrams(word: &str, min: usize, max: usize) -> Vec<String> {
    assert!(!word.is_empty(), "subword_ngrams needs a non-empty word");
    let mut marked = String::with_capacity(word.len() + 2);
    marked.push('<');
    marked.push_str(word);
    marked.push('>');
    let mut out: Vec<String> = Vec::new();
    for n in min..=max {
        for g in crate::features::char_ngrams(&marked, n) {
            if !out.iter().any(|o| o == g) {
                out.push(String::from(g));
            }
        }
    }
    if !out.contains(&marked) {
        out.push(marked);
    }
    out
}

/// Trained word table. Rows `0..V` belong to words; skip-gram matrices append
/// one row per subword bucket listed in `buckets`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub mode: EmbeddingMode,
    pub dim: usize,
    pub subword_min: usize,
    pub subword_max: usize,
    pub bucket_count: u32,
    pub words: Vocabulary,
    /// Sorted bucket ids; bucket `buckets[k]` owns input row `V + k`.
    pub buckets: Vec<u32>,
    /// Input vectors, row-major.
    pub input: Vec<f64>,
    /// Output (context) vectors for the `V` words, row-major.
    pub output: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn rows(&self) -> usize {
        self.input.len() / self.dim
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.input[r * self.dim..(r + 1) * self.dim]
    }

    pub fn output_row(&self, w: usize) -> &[f64] {
        &self.output[w * self.dim..(w + 1) * self.dim]
    }

    fn bucket_rows(&self, word: &str) -> Vec<usize> {
        subword_ngrams(word, self.subword_min, self.subword_max)
            .iter()
            .filter_map(|g| {
                let b = fnv1a(g) % self.bucket_count;
                self.buckets.binary_search(&b).ok().map(|k| self.words.len() + k)
            })
            .collect()
    }

    /// Input rows averaged into the representation of `word`.
    pub fn input_rows(&self, word: &str) -> Vec<usize> {
        let mut rows: Vec<usize> = self.words.get(word).into_iter().collect();
        if self.mode == EmbeddingMode::Skipgram && !word.is_empty() {
            rows.extend(self.bucket_rows(word));
        }
        rows
    }

    fn mean_of_rows(&self, rows: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &r in rows {
            axpy(1.0, self.row(r), &mut v);
        }
        let k = rows.len() as f64;
        v.iter_mut().for_each(|x| *x /= k);
        v
    }

    /// Vector of an in-vocabulary word.
    pub fn word_vector(&self, word: &str) -> Option<Vec<f64>> {
        self.words.get(word)?;
        Some(self.mean_of_rows(&self.input_rows(word)))
    }

    /// Skip-gram only: composes a vector for an unseen word from whatever
    /// subword buckets it shares with the training vocabulary.
    pub fn compose_oov(&self, word: &str) -> Option<Vec<f64>> {
        if self.mode != EmbeddingMode::Skipgram || word.is_empty() {
            return None;
        }
        let rows = self.bucket_rows(word);
        (!rows.is_empty()).then(|| self.mean_of_rows(&rows))
    }

    /// Sigmoid score of `context` given `center` under the trained model.
    pub fn pair_score(&self, center: &str, context: &str) -> Option<f64> {
        let h = self.word_vector(center)?;
        let c = self.words.get(context)?;
        Some(sigmoid(dot(&h, self.output_row(c))))
    }
}

/// Mean of the vectors of in-vocabulary words; zero when none is known.
pub fn sentence_embedding(text: &str, emb: &EmbeddingMatrix) -> Vec<f64> {
    let mut acc = vec![0.0; emb.dim];
    let mut known = 0usize;
    for w in word_tokenize(text) {
        if let Some(v) = emb.word_vector(w) {
            axpy(1.0, &v, &mut acc);
            known += 1;
        }
    }
    if known > 0 {
        acc.iter_mut().for_each(|x| *x /= known as f64);
    }
    acc
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

/// Per-epoch mean negative-sampling loss recorded during training.
pub type LossHistory = Vec<f64>;

pub fn train_skipgram(corpus: &[Sentence], cfg: &EmbeddingConfig) -> Result<EmbeddingMatrix> {
    if cfg.mode != EmbeddingMode::Skipgram {
        return Err(Error::InvalidConfig("train_skipgram needs mode = skipgram"));
    }
    train_embeddings(corpus, cfg).map(|(m, _)| m)
}

pub fn train_cbow(corpus: &[Sentence], cfg: &EmbeddingConfig) -> Result<EmbeddingMatrix> {
    if cfg.mode != EmbeddingMode::Cbow {
        return Err(Error::InvalidConfig("train_cbow needs mode = cbow"));
    }
    train_embeddings(corpus, cfg).map(|(m, _)| m)
}

/// Trains either objective and returns the per-epoch loss alongside.
pub fn train_embeddings(corpus: &[Sentence], cfg: &EmbeddingConfig) -> Result<(EmbeddingMatrix, LossHistory)> {
    cfg.validate()?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for s in corpus {
        for w in word_tokenize(s.text()) {
            *counts.entry(String::from(w)).or_insert(0) += 1;
        }
    }
    counts.retain(|_, c| *c >= cfg.min_count);
    let freqs: BTreeMap<String, u64> = counts.clone();
    let words = Vocabulary::from_counts(counts, None);
    if words.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let v = words.len();
    let dim = cfg.dim;

    let mut buckets: Vec<u32> = Vec::new();
    if cfg.mode == EmbeddingMode::Skipgram {
        for w in words.tokens() {
            for g in subword_ngrams(w, cfg.subword_min, cfg.subword_max) {
                buckets.push(fnv1a(&g) % cfg.bucket_count);
            }
        }
        buckets.sort_unstable();
        buckets.dedup();
    }

    let mut rng = rng::seeded(cfg.seed);
    let rows = v + buckets.len();
    let bound = 1.0 / dim as f64;
    let input: Vec<f64> = (0..rows * dim).map(|_| rng.random_range(-bound..bound)).collect();
    let mut m = EmbeddingMatrix {
        mode: cfg.mode,
        dim,
        subword_min: cfg.subword_min,
        subword_max: cfg.subword_max,
        bucket_count: cfg.bucket_count,
        words,
        buckets,
        input,
        output: vec![0.0; v * dim],
    };

    let word_rows: Vec<Vec<usize>> = m.words.tokens().iter().map(|w| m.input_rows(w)).collect();
    let weights: Vec<f64> = m.words.tokens().iter().map(|w| pow(freqs[w] as f64, 0.75)).collect();
    let negative_dist = WeightedIndex::new(&weights).map_err(|_| Error::EmptyVocabulary)?;
    let stream: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| word_tokenize(s.text()).iter().filter_map(|w| m.words.get(w)).collect())
        .collect();
    let total_tokens: usize = stream.iter().map(Vec::len).sum();
    let total_steps = (total_tokens * cfg.epochs).max(1) as f64;

    let mut history = Vec::with_capacity(cfg.epochs);
    let mut step = 0usize;
    let mut grad_h = vec![0.0; dim];
    let mut hidden = vec![0.0; dim];
    let mut ctx_rows: Vec<usize> = Vec::new();
    for _ in 0..cfg.epochs {
        let (mut loss_sum, mut updates) = (0.0, 0usize);
        for sentence in &stream {
            for (i, &center) in sentence.iter().enumerate() {
                let lr = cfg.learning_rate * (1.0 - step as f64 / total_steps);
                step += 1;
                let radius = rng.random_range(1..=cfg.window);
                let lo = i.saturating_sub(radius);
                let hi = (i + radius).min(sentence.len() - 1);
                match cfg.mode {
                    EmbeddingMode::Skipgram => {
                        for c in lo..=hi {
                            if c == i {
                                continue;
                            }
                            loss_sum += sgns_update(
                                &mut m, &word_rows[center], sentence[c], cfg.negatives, &negative_dist,
                                lr, &mut rng, &mut hidden, &mut grad_h,
                            );
                            updates += 1;
                        }
                    }
                    EmbeddingMode::Cbow => {
                        ctx_rows.clear();
                        for c in lo..=hi {
                            if c != i {
                                ctx_rows.extend_from_slice(&word_rows[sentence[c]]);
                            }
                        }
                        if ctx_rows.is_empty() {
                            continue;
                        }
                        loss_sum += sgns_update(
                            &mut m, &ctx_rows, center, cfg.negatives, &negative_dist, lr, &mut rng,
                            &mut hidden, &mut grad_h,
                        );
                        updates += 1;
                    }
                }
            }
        }
        history.push(if updates > 0 { loss_sum / updates as f64 } else { 0.0 });
    }
    Ok((m, history))
}

/// One negative-sampling step: the mean of `rows` predicts `target` against
/// `negatives` sampled words. Returns the binary logistic loss.
#[allow(clippy::too_many_arguments)]
fn sgns_update(
    m: &mut EmbeddingMatrix,
    rows: &[usize],
    target: usize,
    negatives: usize,
    dist: &WeightedIndex<f64>,
    lr: f64,
    rng: &mut rng::Rng,
    hidden: &mut [f64],
    grad_h: &mut [f64],
) -> f64 {
    let dim = m.dim;
    hidden.fill(0.0);
    for &r in rows {
        axpy(1.0, &m.input[r * dim..(r + 1) * dim], hidden);
    }
    let k = rows.len() as f64;
    hidden.iter_mut().for_each(|x| *x /= k);
    grad_h.fill(0.0);

    let mut loss = 0.0;
    for n in 0..=negatives {
        let (word, positive) = if n == 0 {
            (target, true)
        } else {
            let w = dist.sample(rng);
            if w == target {
                continue;
            }
            (w, false)
        };
        let out = &mut m.output[word * dim..(word + 1) * dim];
        let p = sigmoid(dot(out, hidden));
        loss -= ln(if positive { p } else { 1.0 - p }.max(1e-300));
        let g = lr * (if positive { 1.0 } else { 0.0 } - p);
        axpy(g, out, grad_h);
        axpy(g, hidden, out);
    }
    for &r in rows {
        axpy(1.0 / k, grad_h, &mut m.input[r * dim..(r + 1) * dim]);
    }
    loss
}

/// Token source for the supervised classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    Words,
    /// Character n-grams of each `<word>` with orders in `min..=max`; the
    /// bare boundary markers are not features.
    CharNgrams { min: usize, max: usize },
}

impl FeatureMode {
    pub fn tokens(&self, text: &str) -> Vec<String> {
        let words = word_tokenize(text);
        match *self {
            FeatureMode::Words => words.into_iter().map(String::from).collect(),
            FeatureMode::CharNgrams { min, max } => {
                let mut out = Vec::new();
                for w in words {
                    let marked = alloc::format!("<{w}>");
                    for n in min..=max {
                        out.extend(
                            crate::features::char_ngrams(&marked, n)
                                .filter(|g| *g != "<" && *g != ">")
                                .map(String::from),
                        );
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedConfig {
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SupervisedConfig {
    fn default() -> Self {
        Self { dim: 100, epochs: 5, learning_rate: 0.1, seed: 42 }
    }
}

/// Softmax over the averaged feature embedding: `p = softmax(W·mean(E[f]) + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FastTextClassifier {
    pub feature_mode: FeatureMode,
    pub features: Vocabulary,
    pub dim: usize,
    /// Feature embeddings, `features.len() × dim`, row-major.
    pub input: Vec<f64>,
    /// One row of `dim` weights per label, in label order.
    pub output: Vec<f64>,
    pub bias: [f64; NUM_LABELS],
}

/// Gradient of the cross-entropy loss for one example.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedGradient {
    /// `(feature row, gradient)` for each distinct feature in the example.
    pub input: Vec<(usize, Vec<f64>)>,
    pub output: Vec<f64>,
    pub bias: [f64; NUM_LABELS],
}

impl FastTextClassifier {
    pub fn feature_ids(&self, text: &str) -> Vec<usize> {
        self.feature_mode.tokens(text).iter().filter_map(|t| self.features.get(t)).collect()
    }

    fn hidden(&self, ids: &[usize]) -> Vec<f64> {
        let mut h = vec![0.0; self.dim];
        if ids.is_empty() {
            return h;
        }
        for &i in ids {
            axpy(1.0, &self.input[i * self.dim..(i + 1) * self.dim], &mut h);
        }
        let k = ids.len() as f64;
        h.iter_mut().for_each(|x| *x /= k);
        h
    }

    fn posterior_of_hidden(&self, h: &[f64]) -> [f64; NUM_LABELS] {
        let mut z = self.bias;
        for (k, zk) in z.iter_mut().enumerate() {
            *zk += dot(&self.output[k * self.dim..(k + 1) * self.dim], h);
        }
        let p = softmax(&z);
        let mut out = [0.0; NUM_LABELS];
        out.copy_from_slice(&p);
        out
    }

    pub fn posterior_ids(&self, ids: &[usize]) -> [f64; NUM_LABELS] {
        self.posterior_of_hidden(&self.hidden(ids))
    }

    /// Cross-entropy loss and its exact gradient for one example.
    pub fn loss_and_gradient(&self, ids: &[usize], label: Label) -> (f64, SupervisedGradient) {
        let h = self.hidden(ids);
        let p = self.posterior_of_hidden(&h);
        let y = label.index();
        let loss = -ln(p[y].max(1e-12));
        let mut dz = p;
        dz[y] -= 1.0;
        let mut output = vec![0.0; NUM_LABELS * self.dim];
        let mut dh = vec![0.0; self.dim];
        for k in 0..NUM_LABELS {
            axpy(dz[k], &h, &mut output[k * self.dim..(k + 1) * self.dim]);
            axpy(dz[k], &self.output[k * self.dim..(k + 1) * self.dim], &mut dh);
        }
        let mut per_row: BTreeMap<usize, f64> = BTreeMap::new();
        for &i in ids {
            *per_row.entry(i).or_insert(0.0) += 1.0 / ids.len() as f64;
        }
        let input = per_row
            .into_iter()
            .map(|(i, share)| (i, dh.iter().map(|g| g * share).collect()))
            .collect();
        (loss, SupervisedGradient { input, output, bias: dz })
    }

    fn apply(&mut self, g: &SupervisedGradient, lr: f64) {
        for (i, gi) in &g.input {
            axpy(-lr, gi, &mut self.input[i * self.dim..(i + 1) * self.dim]);
        }
        axpy(-lr, &g.output, &mut self.output);
        for (b, gb) in self.bias.iter_mut().zip(g.bias) {
            *b -= lr * gb;
        }
    }
}

/// Trains by per-sentence SGD with a linearly decaying rate; the sentence
/// order is reshuffled every epoch from the seed.
pub fn train_fasttext_supervised(
    train: &Dataset,
    cfg: &SupervisedConfig,
    feature_mode: FeatureMode,
) -> Result<FastTextClassifier> {
    if cfg.dim == 0 {
        return Err(Error::InvalidConfig("embedding dim must be at least 1"));
    }
    if let FeatureMode::CharNgrams { min, max } = feature_mode {
        if min == 0 || min > max {
            return Err(Error::InvalidConfig("char n-gram range must satisfy 1 <= min <= max"));
        }
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let tokenized: Vec<Vec<String>> = train.iter().map(|s| feature_mode.tokens(s.text())).collect();
    for toks in &tokenized {
        for t in toks {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
    }
    let features = Vocabulary::from_counts(counts, None);
    if features.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut rng = rng::seeded(cfg.seed);
    let bound = 1.0 / cfg.dim as f64;
    let input = (0..features.len() * cfg.dim).map(|_| rng.random_range(-bound..bound)).collect();
    let mut model = FastTextClassifier {
        feature_mode,
        dim: cfg.dim,
        input,
        output: vec![0.0; NUM_LABELS * cfg.dim],
        bias: [0.0; NUM_LABELS],
        features,
    };
    let examples: Vec<(Vec<usize>, Label)> = tokenized
        .iter()
        .zip(train.iter())
        .map(|(toks, s)| (toks.iter().filter_map(|t| model.features.get(t)).collect(), s.label()))
        .collect();

    let total = (examples.len() * cfg.epochs).max(1) as f64;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut step = 0usize;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &e in &order {
            let lr = cfg.learning_rate * (1.0 - step as f64 / total);
            step += 1;
            let (ids, label) = &examples[e];
            let (_, g) = model.loss_and_gradient(ids, *label);
            model.apply(&g, lr);
        }
    }
    Ok(model)
}

/// Most probable label and the full posterior; ties go to the earlier label.
pub fn predict_fasttext(model: &FastTextClassifier, text: &str) -> (Label, [f64; NUM_LABELS]) {
    let p = model.posterior_ids(&model.feature_ids(text));
    (Label::ALL[argmax(&p)], p)
}
