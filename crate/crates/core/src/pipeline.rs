//! Feature extractors and classifiers combined into a text → label model.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::classifiers::{
    knn_predict, logreg_predict, nb_predict, svm_predict, train_knn, train_logreg, train_nb, train_svm, Example,
    KnnModel, LogRegConfig, LogRegModel, NbModel, SvmConfig, SvmModel, DEFAULT_ALPHA, DEFAULT_K,
};
use crate::corpus::Dataset;
use crate::embeddings::{
    predict_fasttext, sentence_embedding, train_embeddings, train_fasttext_supervised, EmbeddingConfig,
    EmbeddingMatrix, EmbeddingMode, FastTextClassifier, FeatureMode, SupervisedConfig,
};
use crate::features::{
    build_ngram_vocab_capped, build_word_vocab_capped, vectorize, vectorize_words, FeatureVector, NgramVocabulary,
    WordVocabulary,
};
use crate::neural::{cnn_train, mlp_train, CnnConfig, CnnModel, MlpModel, TrainConfig};
use crate::{Error, Label, Result};

/// Input representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSpec {
    /// Character n-grams of the given order.
    Char(usize),
    /// Word counts.
    Bow,
    /// Mean CBOW word embedding.
    Cbow,
    /// Mean skip-gram word embedding.
    Skipgram,
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSpec::Char(n) => write!(f, "char{n}"),
            FeatureSpec::Bow => f.write_str("bow"),
            FeatureSpec::Cbow => f.write_str("cbow"),
            FeatureSpec::Skipgram => f.write_str("skipgram"),
        }
    }
}

impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bow" => Ok(FeatureSpec::Bow),
            "cbow" => Ok(FeatureSpec::Cbow),
            "skipgram" => Ok(FeatureSpec::Skipgram),
            _ => match s.strip_prefix("char").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if n >= 1 => Ok(FeatureSpec::Char(n)),
                _ => Err(Error::InvalidConfig("feature must be charN, bow, cbow or skipgram")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    Knn,
    LogReg,
    Nb,
    Svm,
    Mlp,
    Cnn,
    FastText,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 7] =
        [ModelSpec::Knn, ModelSpec::LogReg, ModelSpec::Nb, ModelSpec::Svm, ModelSpec::Mlp, ModelSpec::Cnn, ModelSpec::FastText];

    pub fn name(self) -> &'static str {
        match self {
            ModelSpec::Knn => "knn",
            ModelSpec::LogReg => "logreg",
            ModelSpec::Nb => "nb",
            ModelSpec::Svm => "svm",
            ModelSpec::Mlp => "mlp",
            ModelSpec::Cnn => "cnn",
            ModelSpec::FastText => "fasttext",
        }
    }

    /// Whether the vector models see L1-normalized frequencies by default.
    /// Naive Bayes needs raw counts.
    pub fn normalizes_by_default(self) -> bool {
        !matches!(self, ModelSpec::Nb)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelSpec::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or(Error::InvalidConfig("model must be knn, logreg, nb, svm, mlp, cnn or fasttext"))
    }
}

/// Rejects feature/model pairs that cannot be trained together.
pub fn check_compatible(feature: FeatureSpec, model: ModelSpec) -> Result<()> {
    match (model, feature) {
        (ModelSpec::Cnn, FeatureSpec::Char(_)) => Ok(()),
        (ModelSpec::Cnn, _) => Err(Error::InvalidConfig("cnn needs a character n-gram token sequence (charN)")),
        (ModelSpec::Nb, FeatureSpec::Cbow | FeatureSpec::Skipgram) => {
            Err(Error::InvalidConfig("nb needs non-negative counts, not embeddings"))
        }
        (ModelSpec::FastText, FeatureSpec::Cbow | FeatureSpec::Skipgram) => {
            Err(Error::InvalidConfig("fasttext learns its own embeddings; use bow or charN"))
        }
        _ => Ok(()),
    }
}

/// Every tunable of the pipeline. [`PipelineConfig::new`] fills in the
/// per-module defaults and threads `seed` through all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub feature: FeatureSpec,
    pub model: ModelSpec,
    pub seed: u64,
    /// `None` picks the model's default (see [`ModelSpec::normalizes_by_default`]).
    pub normalize: Option<bool>,
    pub vocab_cap: Option<usize>,
    pub knn_k: usize,
    pub logreg: LogRegConfig,
    pub nb_alpha: f64,
    pub svm: SvmConfig,
    pub mlp_hidden: Vec<usize>,
    pub mlp: TrainConfig,
    pub cnn: CnnConfig,
    pub embedding: EmbeddingConfig,
    pub fasttext: SupervisedConfig,
    /// Character n-gram orders used by fasttext with `charN` features.
    pub char_range: (usize, usize),
}

impl PipelineConfig {
    pub fn new(feature: FeatureSpec, model: ModelSpec, seed: u64) -> Self {
        Self {
            feature,
            model,
            seed,
            normalize: None,
            vocab_cap: None,
            knn_k: DEFAULT_K,
            logreg: LogRegConfig { seed, ..LogRegConfig::default() },
            nb_alpha: DEFAULT_ALPHA,
            svm: SvmConfig { seed, ..SvmConfig::default() },
            mlp_hidden: vec![128],
            mlp: TrainConfig { seed, ..TrainConfig::mlp_default() },
            cnn: CnnConfig { train: TrainConfig { seed, ..TrainConfig::cnn_default() }, ..CnnConfig::default() },
            embedding: EmbeddingConfig { seed, ..EmbeddingConfig::default() },
            fasttext: SupervisedConfig { seed, ..SupervisedConfig::default() },
            char_range: (1, 5),
        }
    }

    pub fn normalize(&self) -> bool {
        self.normalize.unwrap_or(self.model.normalizes_by_default())
    }
}

/// Maps cleaned text to a fixed-dimension vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Featurizer {
    Ngram { vocab: NgramVocabulary, normalize: bool },
    Words { vocab: WordVocabulary, normalize: bool },
    Embedding { matrix: EmbeddingMatrix },
}

impl Featurizer {
    /// Fits vocabularies or embeddings on `train`.
    pub fn fit(train: &Dataset, cfg: &PipelineConfig) -> Result<Self> {
        let texts = || train.iter().map(|s| s.text());
        let normalize = cfg.normalize();
        let f = match cfg.feature {
            FeatureSpec::Char(n) => {
                Featurizer::Ngram { vocab: build_ngram_vocab_capped(texts(), n, cfg.vocab_cap), normalize }
            }
            FeatureSpec::Bow => Featurizer::Words { vocab: build_word_vocab_capped(texts(), cfg.vocab_cap), normalize },
            FeatureSpec::Cbow | FeatureSpec::Skipgram => {
                let mode = if cfg.feature == FeatureSpec::Cbow { EmbeddingMode::Cbow } else { EmbeddingMode::Skipgram };
                let ecfg = EmbeddingConfig { mode, ..cfg.embedding.clone() };
                Featurizer::Embedding { matrix: train_embeddings(&train.sentences, &ecfg)?.0 }
            }
        };
        if f.dim() == 0 {
            return Err(Error::EmptyVocabulary);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        match self {
            Featurizer::Ngram { vocab, .. } => vocab.len(),
            Featurizer::Words { vocab, .. } => vocab.len(),
            Featurizer::Embedding { matrix } => matrix.dim,
        }
    }

    pub fn featurize(&self, text: &str) -> FeatureVector {
        match self {
            Featurizer::Ngram { vocab, normalize } => vectorize(text, vocab, *normalize),
            Featurizer::Words { vocab, normalize } => vectorize_words(text, vocab, *normalize),
            Featurizer::Embedding { matrix } => FeatureVector::from_dense(&sentence_embedding(text, matrix)),
        }
    }

    pub fn featurize_dataset(&self, d: &Dataset) -> Vec<Example> {
        d.iter().map(|s| (self.featurize(s.text()), s.label())).collect()
    }
}

/// A trained vector classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Knn(KnnModel),
    LogReg(LogRegModel),
    Nb(NbModel),
    Svm(SvmModel),
    Mlp(MlpModel),
}

impl Classifier {
    pub fn fit(train: &[Example], cfg: &PipelineConfig) -> Result<Self> {
        Ok(match cfg.model {
            ModelSpec::Knn => Classifier::Knn(train_knn(train, cfg.knn_k)?),
            ModelSpec::LogReg => Classifier::LogReg(train_logreg(train, &cfg.logreg)?),
            ModelSpec::Nb => Classifier::Nb(train_nb(train, cfg.nb_alpha)?),
            ModelSpec::Svm => Classifier::Svm(train_svm(train, &cfg.svm)?),
            ModelSpec::Mlp => {
                let dim = train.first().ok_or(Error::EmptyInput)?.0.dim();
                let mut sizes = vec![dim];
                sizes.extend_from_slice(&cfg.mlp_hidden);
                Classifier::Mlp(mlp_train(train, None, &sizes[1..], &cfg.mlp)?.0)
            }
            ModelSpec::Cnn | ModelSpec::FastText => {
                return Err(Error::InvalidConfig("cnn and fasttext are not vector classifiers"))
            }
        })
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Label> {
        match self {
            Classifier::Knn(m) => knn_predict(m, x),
            Classifier::LogReg(m) => Ok(logreg_predict(m, x)?.0),
            Classifier::Nb(m) => Ok(nb_predict(m, x)?.0),
            Classifier::Svm(m) => svm_predict(m, x),
            Classifier::Mlp(m) => Ok(m.predict(x)?.0),
        }
    }

    pub fn spec(&self) -> ModelSpec {
        match self {
            Classifier::Knn(_) => ModelSpec::Knn,
            Classifier::LogReg(_) => ModelSpec::LogReg,
            Classifier::Nb(_) => ModelSpec::Nb,
            Classifier::Svm(_) => ModelSpec::Svm,
            Classifier::Mlp(_) => ModelSpec::Mlp,
        }
    }
}

/// Any trained model, ready to label cleaned text.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Vector { feature: FeatureSpec, featurizer: Featurizer, classifier: Classifier },
    Cnn(CnnModel),
    FastText { feature: FeatureSpec, model: FastTextClassifier },
}

impl Model {
    pub fn predict(&self, text: &str) -> Result<Label> {
        match self {
            Model::Vector { featurizer, classifier, .. } => classifier.predict(&featurizer.featurize(text)),
            Model::Cnn(m) => Ok(m.predict(text)?.0),
            Model::FastText { model, .. } => Ok(predict_fasttext(model, text).0),
        }
    }

    pub fn spec(&self) -> ModelSpec {
        match self {
            Model::Vector { classifier, .. } => classifier.spec(),
            Model::Cnn(_) => ModelSpec::Cnn,
            Model::FastText { .. } => ModelSpec::FastText,
        }
    }

    pub fn feature(&self) -> FeatureSpec {
        match self {
            Model::Vector { feature, .. } | Model::FastText { feature, .. } => *feature,
            Model::Cnn(m) => FeatureSpec::Char(m.gram),
        }
    }

    /// Short identifier such as `logreg-char2`.
    pub fn name(&self) -> String {
        alloc::format!("{}-{}", self.spec(), self.feature())
    }
}

pub fn train_model(train: &Dataset, cfg: &PipelineConfig) -> Result<Model> {
    check_compatible(cfg.feature, cfg.model)?;
    if train.is_empty() {
        return Err(Error::EmptyInput);
    }
    match cfg.model {
        ModelSpec::Cnn => {
            let FeatureSpec::Char(gram) = cfg.feature else { unreachable!("checked above") };
            Ok(Model::Cnn(cnn_train(train, None, &CnnConfig { gram, ..cfg.cnn.clone() })?.0))
        }
        ModelSpec::FastText => {
            let mode = match cfg.feature {
                FeatureSpec::Bow => FeatureMode::Words,
                _ => FeatureMode::CharNgrams { min: cfg.char_range.0, max: cfg.char_range.1 },
            };
            Ok(Model::FastText { feature: cfg.feature, model: train_fasttext_supervised(train, &cfg.fasttext, mode)? })
        }
        _ => {
            let featurizer = Featurizer::fit(train, cfg)?;
            let examples = featurizer.featurize_dataset(train);
            let classifier = Classifier::fit(&examples, cfg)?;
            Ok(Model::Vector { feature: cfg.feature, featurizer, classifier })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;
    use alloc::string::ToString;

    fn disjoint() -> Dataset {
        let words = ["aa bb", "cc dd", "ee ff", "gg hh", "ii jj", "kk ll"];
        let mut v = Vec::new();
        for (l, w) in Label::ALL.iter().zip(words) {
            v.push(Sentence::from_clean(*l, w).unwrap());
            v.push(Sentence::from_clean(*l, &alloc::format!("{w} {w}")).unwrap());
        }
        Dataset::new(v, 0)
    }

    #[test]
    fn specs_parse_and_display() {
        for s in ["char1", "char2", "char3", "bow", "cbow", "skipgram"] {
            assert_eq!(s.parse::<FeatureSpec>().unwrap().to_string(), s);
        }
        assert!("char0".parse::<FeatureSpec>().is_err());
        assert!("word".parse::<FeatureSpec>().is_err());
        for m in ModelSpec::ALL {
            assert_eq!(m.name().parse::<ModelSpec>().unwrap(), m);
        }
    }

    #[test]
    fn incompatible_pairs() {
        assert!(check_compatible(FeatureSpec::Bow, ModelSpec::Cnn).is_err());
        assert!(check_compatible(FeatureSpec::Skipgram, ModelSpec::Nb).is_err());
        assert!(check_compatible(FeatureSpec::Char(2), ModelSpec::Cnn).is_ok());
        assert!(check_compatible(FeatureSpec::Cbow, ModelSpec::LogReg).is_ok());
    }

    #[test]
    fn nb_on_disjoint_vocabularies_is_perfect() {
        let d = disjoint();
        let m = train_model(&d, &PipelineConfig::new(FeatureSpec::Bow, ModelSpec::Nb, 42)).unwrap();
        for s in &d {
            assert_eq!(m.predict(s.text()).unwrap(), s.label());
        }
        assert_eq!(m.name(), "nb-bow");
    }
}
