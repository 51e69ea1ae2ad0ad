//! The `NDSL1` model container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic "NDSL1" | kind tag (string) | feature spec (string) | payload
//! ```
//!
//! Strings are a `u64` byte length followed by UTF-8; float arrays are a
//! `u64` count followed by IEEE-754 bit patterns, so a load reproduces every
//! parameter bit for bit. The payload layout depends on the kind tag.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use ndsl_core::classifiers::{KnnModel, LogRegConfig, LogRegModel, NbModel, SvmConfig, SvmModel};
use ndsl_core::embeddings::{EmbeddingMatrix, EmbeddingMode, FastTextClassifier, FeatureMode};
use ndsl_core::features::{FeatureVector, NgramVocabulary, Vocabulary, WordVocabulary};
use ndsl_core::neural::{CnnModel, DenseLayer, MlpModel};
use ndsl_core::pipeline::{Classifier, FeatureSpec, Featurizer, Model, ModelSpec};
use ndsl_core::{Label, NUM_LABELS};

use crate::formats::write_text;
use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"NDSL1";

const FEATURIZER_NGRAM: u8 = 0;
const FEATURIZER_WORDS: u8 = 1;
const FEATURIZER_EMBEDDING: u8 = 2;

// ---------------------------------------------------------------- writing

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u64(&mut self, v: u64) {
        self.0.write_u64::<LE>(v).expect("writing to a Vec cannot fail");
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.0.write_f64::<LE>(v).expect("writing to a Vec cannot fail");
    }

    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }

    fn f64s(&mut self, v: &[f64]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.f64(x));
    }

    fn u32s(&mut self, v: &[u32]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.0.write_u32::<LE>(x).expect("writing to a Vec cannot fail"));
    }

    fn vocab(&mut self, v: &Vocabulary) {
        self.usize(v.len());
        v.tokens().iter().for_each(|t| self.str(t));
    }

    fn vector(&mut self, v: &FeatureVector) {
        self.usize(v.dim());
        self.usize(v.nnz());
        for &(i, x) in v.entries() {
            self.0.write_u32::<LE>(i).expect("writing to a Vec cannot fail");
            self.f64(x);
        }
    }

    fn labels6(&mut self, v: &[f64; NUM_LABELS]) {
        v.iter().for_each(|&x| self.f64(x));
    }
}

fn write_featurizer(w: &mut Writer, f: &Featurizer) {
    match f {
        Featurizer::Ngram { vocab, normalize } => {
            w.u8(FEATURIZER_NGRAM);
            w.usize(vocab.n);
            w.vocab(&vocab.vocab);
            w.u8(*normalize as u8);
        }
        Featurizer::Words { vocab, normalize } => {
            w.u8(FEATURIZER_WORDS);
            w.vocab(&vocab.vocab);
            w.u8(*normalize as u8);
        }
        Featurizer::Embedding { matrix } => {
            w.u8(FEATURIZER_EMBEDDING);
            w.u8(matches!(matrix.mode, EmbeddingMode::Skipgram) as u8);
            w.usize(matrix.dim);
            w.usize(matrix.subword_min);
            w.usize(matrix.subword_max);
            w.u64(matrix.bucket_count as u64);
            w.vocab(&matrix.words);
            w.u32s(&matrix.buckets);
            w.f64s(&matrix.input);
            w.f64s(&matrix.output);
        }
    }
}

fn write_classifier(w: &mut Writer, c: &Classifier) {
    match c {
        Classifier::Knn(m) => {
            w.usize(m.k);
            w.usize(m.dim);
            w.usize(m.points.len());
            for (p, l) in m.points.iter().zip(&m.labels) {
                w.vector(p);
                w.u8(l.index() as u8);
            }
        }
        Classifier::LogReg(m) => {
            w.usize(m.dim);
            w.f64s(&m.weights);
            w.f64(m.config.learning_rate);
            w.usize(m.config.epochs);
            w.u64(m.config.seed);
        }
        Classifier::Nb(m) => {
            w.f64(m.alpha);
            w.usize(m.dim);
            w.labels6(&m.log_priors);
            w.f64s(&m.log_likelihoods);
        }
        Classifier::Svm(m) => {
            w.usize(m.dim);
            w.f64s(&m.weights);
            w.labels6(&m.biases);
            w.f64(m.config.lambda);
            w.usize(m.config.epochs);
            w.u64(m.config.seed);
        }
        Classifier::Mlp(m) => {
            w.usize(m.layers.len());
            for l in &m.layers {
                w.usize(l.inputs);
                w.usize(l.outputs);
                w.f64s(&l.weights);
                w.f64s(&l.bias);
            }
        }
    }
}

/// Serializes any trained model.
pub fn encode_model(model: &Model) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(MAGIC);
    w.str(model.spec().name());
    w.str(&model.feature().to_string());
    match model {
        Model::Vector { featurizer, classifier, .. } => {
            write_featurizer(&mut w, featurizer);
            write_classifier(&mut w, classifier);
        }
        Model::Cnn(m) => {
            w.usize(m.gram);
            w.vocab(&m.vocab);
            w.usize(m.embed_dim);
            w.usize(m.filters);
            w.usize(m.kernel);
            w.usize(m.max_len);
            w.f64s(&m.embedding);
            w.f64s(&m.conv_w);
            w.f64s(&m.conv_b);
            w.f64s(&m.dense_w);
            w.f64s(&m.dense_b);
        }
        Model::FastText { model: m, .. } => {
            match m.feature_mode {
                FeatureMode::Words => w.u8(0),
                FeatureMode::CharNgrams { min, max } => {
                    w.u8(1);
                    w.usize(min);
                    w.usize(max);
                }
            }
            w.vocab(&m.features);
            w.usize(m.dim);
            w.f64s(&m.input);
            w.f64s(&m.output);
            w.labels6(&m.bias);
        }
    }
    w.0
}

// ---------------------------------------------------------------- reading

type Decode<T> = std::result::Result<T, String>;

struct Reader<'a>(Cursor<&'a [u8]>);

impl Reader<'_> {
    fn remaining(&self) -> usize {
        self.0.get_ref().len() - self.0.position() as usize
    }

    fn u8(&mut self) -> Decode<u8> {
        self.0.read_u8().map_err(|_| "truncated".to_string())
    }

    fn u64(&mut self) -> Decode<u64> {
        self.0.read_u64::<LE>().map_err(|_| "truncated".to_string())
    }

    fn usize(&mut self) -> Decode<usize> {
        usize::try_from(self.u64()?).map_err(|_| "size out of range".to_string())
    }

    /// A length prefix for `width`-byte items, checked against the bytes left.
    fn len(&mut self, width: usize) -> Decode<usize> {
        let n = self.usize()?;
        if n.checked_mul(width).is_none_or(|b| b > self.remaining()) {
            return Err("length prefix exceeds file size".into());
        }
        Ok(n)
    }

    fn f64(&mut self) -> Decode<f64> {
        self.0.read_f64::<LE>().map_err(|_| "truncated".to_string())
    }

    fn bool(&mut self) -> Decode<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(format!("bad boolean byte {b}")),
        }
    }

    fn str(&mut self) -> Decode<String> {
        let n = self.len(1)?;
        let mut buf = vec![0; n];
        self.0.read_exact(&mut buf).map_err(|_| "truncated".to_string())?;
        String::from_utf8(buf).map_err(|_| "string is not UTF-8".to_string())
    }

    fn f64s(&mut self) -> Decode<Vec<f64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    fn u32s(&mut self) -> Decode<Vec<u32>> {
        let n = self.len(4)?;
        (0..n).map(|_| self.0.read_u32::<LE>().map_err(|_| "truncated".to_string())).collect()
    }

    fn vocab(&mut self) -> Decode<Vocabulary> {
        let n = self.len(8)?;
        let tokens = (0..n).map(|_| self.str()).collect::<Decode<Vec<_>>>()?;
        let v = Vocabulary::from_tokens(tokens);
        // duplicate tokens would collapse in the index
        (v.tokens().iter().enumerate().all(|(i, t)| v.get(t) == Some(i)))
            .then_some(v)
            .ok_or_else(|| "vocabulary has duplicate tokens".to_string())
    }

    fn vector(&mut self) -> Decode<FeatureVector> {
        let dim = self.usize()?;
        let nnz = self.len(12)?;
        let mut pairs = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let i = self.0.read_u32::<LE>().map_err(|_| "truncated".to_string())?;
            pairs.push((i, self.f64()?));
        }
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0) || pairs.iter().any(|p| p.1 == 0.0) {
            return Err("sparse vector entries out of order".into());
        }
        let v = FeatureVector::from_pairs(dim, pairs).map_err(|e| e.to_string())?;
        Ok(v)
    }

    fn labels6(&mut self) -> Decode<[f64; NUM_LABELS]> {
        let mut out = [0.0; NUM_LABELS];
        for x in &mut out {
            *x = self.f64()?;
        }
        Ok(out)
    }

    fn label(&mut self) -> Decode<Label> {
        let i = self.u8()?;
        Label::from_index(i as usize).ok_or_else(|| format!("bad label index {i}"))
    }
}

fn expect_len(what: &str, found: usize, expected: usize) -> Decode<()> {
    if found == expected {
        Ok(())
    } else {
        Err(format!("{what} has {found} values, expected {expected}"))
    }
}

fn read_featurizer(r: &mut Reader) -> Decode<Featurizer> {
    Ok(match r.u8()? {
        FEATURIZER_NGRAM => {
            let n = r.usize()?;
            let vocab = r.vocab()?;
            Featurizer::Ngram { vocab: NgramVocabulary { n, vocab }, normalize: r.bool()? }
        }
        FEATURIZER_WORDS => {
            let vocab = r.vocab()?;
            Featurizer::Words { vocab: WordVocabulary { vocab }, normalize: r.bool()? }
        }
        FEATURIZER_EMBEDDING => {
            let mode = if r.bool()? { EmbeddingMode::Skipgram } else { EmbeddingMode::Cbow };
            let dim = r.usize()?;
            let subword_min = r.usize()?;
            let subword_max = r.usize()?;
            let bucket_count = u32::try_from(r.u64()?).map_err(|_| "bucket count out of range".to_string())?;
            let words = r.vocab()?;
            let buckets = r.u32s()?;
            let input = r.f64s()?;
            let output = r.f64s()?;
            if dim == 0 || bucket_count == 0 {
                return Err("embedding dim and bucket count must be positive".into());
            }
            expect_len("embedding input", input.len(), (words.len() + buckets.len()) * dim)?;
            expect_len("embedding output", output.len(), words.len() * dim)?;
            let matrix =
                EmbeddingMatrix { mode, dim, subword_min, subword_max, bucket_count, words, buckets, input, output };
            Featurizer::Embedding { matrix }
        }
        t => return Err(format!("unknown featurizer tag {t}")),
    })
}

fn read_classifier(r: &mut Reader, spec: ModelSpec, dim: usize) -> Decode<Classifier> {
    let check_dim = |d: usize| if d == dim { Ok(()) } else { Err(format!("classifier dim {d}, features {dim}")) };
    Ok(match spec {
        ModelSpec::Knn => {
            let k = r.usize()?;
            let d = r.usize()?;
            check_dim(d)?;
            let n = r.len(17)?;
            let (mut points, mut labels) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let p = r.vector()?;
                check_dim(p.dim())?;
                points.push(p);
                labels.push(r.label()?);
            }
            if k == 0 || k > n {
                return Err(format!("k = {k} with {n} stored points"));
            }
            Classifier::Knn(KnnModel { k, dim: d, points, labels })
        }
        ModelSpec::LogReg => {
            let d = r.usize()?;
            check_dim(d)?;
            let weights = r.f64s()?;
            expect_len("logreg weights", weights.len(), NUM_LABELS * (d + 1))?;
            let config = LogRegConfig { learning_rate: r.f64()?, epochs: r.usize()?, seed: r.u64()? };
            Classifier::LogReg(LogRegModel { dim: d, weights, config })
        }
        ModelSpec::Nb => {
            let alpha = r.f64()?;
            let d = r.usize()?;
            check_dim(d)?;
            let log_priors = r.labels6()?;
            let log_likelihoods = r.f64s()?;
            expect_len("nb likelihoods", log_likelihoods.len(), NUM_LABELS * d)?;
            Classifier::Nb(NbModel { alpha, dim: d, log_priors, log_likelihoods })
        }
        ModelSpec::Svm => {
            let d = r.usize()?;
            check_dim(d)?;
            let weights = r.f64s()?;
            expect_len("svm weights", weights.len(), NUM_LABELS * d)?;
            let biases = r.labels6()?;
            let config = SvmConfig { lambda: r.f64()?, epochs: r.usize()?, seed: r.u64()? };
            Classifier::Svm(SvmModel { dim: d, weights, biases, config })
        }
        ModelSpec::Mlp => {
            let n = r.len(32)?;
            let mut layers = Vec::with_capacity(n);
            let mut width = dim;
            for _ in 0..n {
                let (inputs, outputs) = (r.usize()?, r.usize()?);
                if inputs != width {
                    return Err(format!("mlp layer takes {inputs} inputs, previous width {width}"));
                }
                let weights = r.f64s()?;
                let bias = r.f64s()?;
                expect_len("mlp weights", weights.len(), inputs * outputs)?;
                expect_len("mlp bias", bias.len(), outputs)?;
                layers.push(DenseLayer { inputs, outputs, weights, bias });
                width = outputs;
            }
            if n < 2 || width != NUM_LABELS {
                return Err("mlp needs a hidden layer and six outputs".into());
            }
            Classifier::Mlp(MlpModel { layers })
        }
        ModelSpec::Cnn | ModelSpec::FastText => return Err("not a vector classifier".into()),
    })
}

fn read_cnn(r: &mut Reader) -> Decode<CnnModel> {
    let gram = r.usize()?;
    let vocab = r.vocab()?;
    let (embed_dim, filters, kernel, max_len) = (r.usize()?, r.usize()?, r.usize()?, r.usize()?);
    let m = CnnModel {
        gram,
        embed_dim,
        filters,
        kernel,
        max_len,
        embedding: r.f64s()?,
        conv_w: r.f64s()?,
        conv_b: r.f64s()?,
        dense_w: r.f64s()?,
        dense_b: r.f64s()?,
        vocab,
    };
    if gram == 0 || embed_dim == 0 || filters == 0 || kernel == 0 || kernel > max_len {
        return Err("cnn shape is invalid".into());
    }
    expect_len("cnn embedding", m.embedding.len(), m.vocab_rows() * embed_dim)?;
    expect_len("cnn filters", m.conv_w.len(), filters * kernel * embed_dim)?;
    expect_len("cnn filter bias", m.conv_b.len(), filters)?;
    expect_len("cnn dense weights", m.dense_w.len(), NUM_LABELS * filters)?;
    expect_len("cnn dense bias", m.dense_b.len(), NUM_LABELS)?;
    Ok(m)
}

fn read_fasttext(r: &mut Reader) -> Decode<FastTextClassifier> {
    let feature_mode = match r.u8()? {
        0 => FeatureMode::Words,
        1 => FeatureMode::CharNgrams { min: r.usize()?, max: r.usize()? },
        t => return Err(format!("unknown fasttext feature mode {t}")),
    };
    let features = r.vocab()?;
    let dim = r.usize()?;
    let input = r.f64s()?;
    let output = r.f64s()?;
    let bias = r.labels6()?;
    expect_len("fasttext input", input.len(), features.len() * dim)?;
    expect_len("fasttext output", output.len(), NUM_LABELS * dim)?;
    Ok(FastTextClassifier { feature_mode, features, dim, input, output, bias })
}

fn decode(bytes: &[u8]) -> Decode<Model> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err("missing NDSL1 header".into());
    }
    let mut r = Reader(Cursor::new(bytes));
    r.0.set_position(MAGIC.len() as u64);
    let spec: ModelSpec = r.str()?.parse().map_err(|_| "unknown kind tag".to_string())?;
    let feature: FeatureSpec = r.str()?.parse().map_err(|_| "unknown feature spec".to_string())?;
    let model = match spec {
        ModelSpec::Cnn => {
            let m = read_cnn(&mut r)?;
            if feature != FeatureSpec::Char(m.gram) {
                return Err("cnn gram order disagrees with the feature spec".into());
            }
            Model::Cnn(m)
        }
        ModelSpec::FastText => Model::FastText { feature, model: read_fasttext(&mut r)? },
        _ => {
            let featurizer = read_featurizer(&mut r)?;
            let classifier = read_classifier(&mut r, spec, featurizer.dim())?;
            Model::Vector { feature, featurizer, classifier }
        }
    };
    if r.remaining() != 0 {
        return Err(format!("{} trailing bytes", r.remaining()));
    }
    Ok(model)
}

/// Parses a model file image; `path` only labels errors.
pub fn decode_model(bytes: &[u8], path: &Path) -> Result<Model> {
    decode(bytes).map_err(|reason| Error::ModelFormat { path: path.to_path_buf(), reason })
}

pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    std::fs::write(path, encode_model(model)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_model(path: &Path) -> Result<Model> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    decode_model(&bytes, path)
}

/// Writes the model's token vocabulary as TSV, if it has one.
pub fn save_vocabulary(path: &Path, model: &Model) -> Result<bool> {
    let vocab = match model {
        Model::Vector { featurizer: Featurizer::Ngram { vocab, .. }, .. } => &vocab.vocab,
        Model::Vector { featurizer: Featurizer::Words { vocab, .. }, .. } => &vocab.vocab,
        Model::Vector { featurizer: Featurizer::Embedding { matrix }, .. } => &matrix.words,
        Model::Cnn(m) => &m.vocab,
        Model::FastText { model, .. } => &model.features,
    };
    write_text(path, &crate::formats::format_vocabulary(vocab))?;
    Ok(true)
}
