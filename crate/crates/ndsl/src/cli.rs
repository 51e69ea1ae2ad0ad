//! Subcommands of the `ndsl` binary.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndsl_core::corpus::{stratified_sample, train_test_split, Dataset, Pools};
use ndsl_core::eval::{cross_domain_eval, evaluate};
use ndsl_core::features::char_frequency_profile;
use ndsl_core::neural::{kernel_size_sweep, CnnConfig, TrainConfig};
use ndsl_core::pipeline::{check_compatible, train_model, FeatureSpec, Featurizer, ModelSpec, PipelineConfig};
use ndsl_core::reduce::{pca_project, tsne_affinities, tsne_optimize, Projection2D, TsneConfig};
use ndsl_core::Label;

use crate::formats::{
    format_confusion, format_cross_domain, format_profile, format_projection, format_report, format_sweep,
    read_dataset, read_text, write_dataset, write_text,
};
use crate::ingest::{ingest_raw_dir, ingest_tatoeba, load_abbreviations};
use crate::model_file::{load_model, save_model, save_vocabulary};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "ndsl", version, about = "Nordic language identification toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and split sentence datasets.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Train a model and write it as an NDSL1 file.
    Train(TrainArgs),
    /// Label sentences, one per line.
    Predict(PredictArgs),
    /// Score a model on a labelled dataset.
    Eval(EvalArgs),
    /// Project a dataset's feature vectors to 2-D.
    Reduce(ReduceArgs),
    /// CNN test accuracy over n-gram orders and kernel sizes.
    Sweep(SweepArgs),
    /// Per-language character frequencies.
    Profile(ProfileArgs),
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Extract and clean sentences from `<code>.txt` files.
    Clean(CleanArgs),
    /// Shuffle a dataset and split it into train and test files.
    Split(SplitArgs),
    /// Import `<code>\t<sentence>` rows, skipping unknown language codes.
    Tatoeba(TatoebaArgs),
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    /// Directory holding dk.txt, sv.txt, nn.txt, nb.txt, fo.txt and is.txt.
    #[arg(long)]
    pub raw_dir: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Sample this many sentences per language; all sentences otherwise.
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Extra abbreviations, one per line.
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Share of each language that goes to the training file.
    #[arg(long, default_value_t = 0.8)]
    pub ratio: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub test_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TatoebaArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Normalize {
    Raw,
    L1,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// knn, logreg, nb, svm, mlp, cnn or fasttext.
    #[arg(long)]
    pub model: String,
    /// char1, char2, char3, bow, cbow or skipgram.
    #[arg(long, default_value = "char2")]
    pub features: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Vector scaling; defaults to raw counts for nb and l1 otherwise.
    #[arg(long, value_enum)]
    pub normalize: Option<Normalize>,
    /// N-gram orders for fasttext with charN features, as `min-max`.
    #[arg(long, default_value = "1-5")]
    pub char_range: String,
    /// Neighbours for knn.
    #[arg(long)]
    pub k: Option<usize>,
    /// Additive smoothing for nb.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Regularization strength for svm.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Embedding width (cbow, skipgram, fasttext, cnn).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Hidden layer widths for mlp, comma separated.
    #[arg(long)]
    pub hidden: Option<String>,
    #[arg(long)]
    pub kernel: Option<usize>,
    #[arg(long)]
    pub filters: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Keep only the most frequent tokens.
    #[arg(long)]
    pub vocab_cap: Option<usize>,
    /// Also write the model's vocabulary as TSV.
    #[arg(long)]
    pub vocab_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// One sentence per line; standard input when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print ISO 639-1 codes (`da` instead of `dk`).
    #[arg(long)]
    pub iso: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Receives confusion.csv and report.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// A second test set from another genre; adds cross_domain.json.
    #[arg(long)]
    pub out_domain: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pca,
    Tsne,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "char1")]
    pub features: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 30.0)]
    pub perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// For t-SNE, first reduce to this many principal components.
    #[arg(long)]
    pub pca_dims: Option<usize>,
    #[arg(long, value_enum, default_value = "l1")]
    pub normalize: Normalize,
    #[arg(long)]
    pub vocab_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// N-gram orders, e.g. `1,2,3` or `1-3`.
    #[arg(long, default_value = "1,2,3")]
    pub grams: String,
    #[arg(long, default_value = "1-11")]
    pub kernels: String,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub filters: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Per-character shares instead of raw counts.
    #[arg(long)]
    pub normalized: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Corpus(CorpusCommand::Clean(a)) => corpus_clean(a),
        Command::Corpus(CorpusCommand::Split(a)) => corpus_split(a),
        Command::Corpus(CorpusCommand::Tatoeba(a)) => corpus_tatoeba(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Eval(a) => eval(a),
        Command::Reduce(a) => reduce(a),
        Command::Sweep(a) => sweep(a),
        Command::Profile(a) => profile(a),
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// `1,2,5` or `1-11` or a mix such as `1-3,7`.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || config_err(format!("cannot read `{part}` as a number or range"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(config_err(format!("empty list `{s}`")));
    }
    Ok(out)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || config_err(format!("range must look like `1-5`, got `{s}`"));
    let (a, b) = s.split_once('-').ok_or_else(bad)?;
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn flatten(pools: Pools, seed: u64) -> Dataset {
    Dataset::new(pools.into_values().flatten().collect(), seed)
}

fn count_line(d: &Dataset) -> String {
    let counts = d.per_class_count();
    Label::ALL.iter().map(|l| format!("{}={}", l.code(), counts[l.index()])).collect::<Vec<_>>().join(" ")
}

fn sample_or_all(pools: Pools, per_class: Option<usize>, seed: u64) -> Result<Dataset> {
    Ok(match per_class {
        Some(n) => stratified_sample(&pools, n, seed)?,
        None => flatten(pools, seed),
    })
}

fn corpus_clean(a: CleanArgs) -> Result<()> {
    let abbr = load_abbreviations(a.abbreviations.as_deref())?;
    let pools = ingest_raw_dir(&a.raw_dir, &abbr)?;
    let d = sample_or_all(pools, a.per_class, a.seed)?;
    write_dataset(&a.output, &d)?;
    println!("{} sentences: {}", d.len(), count_line(&d));
    Ok(())
}

fn corpus_split(a: SplitArgs) -> Result<()> {
    let d = read_dataset(&a.input)?;
    let (train, test) = train_test_split(&d, a.ratio, a.seed)?;
    write_dataset(&a.train_out, &train)?;
    write_dataset(&a.test_out, &test)?;
    println!("train {}: {}", train.len(), count_line(&train));
    println!("test {}: {}", test.len(), count_line(&test));
    Ok(())
}

fn corpus_tatoeba(a: TatoebaArgs) -> Result<()> {
    let import = ingest_tatoeba(&a.input)?;
    let d = sample_or_all(import.pools, a.per_class, a.seed)?;
    write_dataset(&a.output, &d)?;
    println!("{} sentences: {}", d.len(), count_line(&d));
    println!("skipped {} rows with other language codes, {} too short", import.unknown_label_rows, import.dropped_short);
    Ok(())
}

fn parse_specs(features: &str, model: &str) -> Result<(FeatureSpec, ModelSpec)> {
    let f: FeatureSpec = features.parse()?;
    let m: ModelSpec = model.parse()?;
    check_compatible(f, m)?;
    Ok((f, m))
}

/// Builds the training configuration from the flags, leaving unset ones at
/// their module defaults.
pub fn pipeline_config(a: &TrainArgs) -> Result<PipelineConfig> {
    let (feature, model) = parse_specs(&a.features, &a.model)?;
    let mut c = PipelineConfig::new(feature, model, a.seed);
    c.normalize = a.normalize.map(|n| n == Normalize::L1);
    c.vocab_cap = a.vocab_cap;
    c.char_range = parse_range(&a.char_range)?;
    if let Some(k) = a.k {
        c.knn_k = k;
    }
    if let Some(alpha) = a.alpha {
        c.nb_alpha = alpha;
    }
    if let Some(l) = a.lambda {
        c.svm.lambda = l;
    }
    if let Some(h) = &a.hidden {
        c.mlp_hidden = parse_list(h)?;
    }
    if let Some(lr) = a.learning_rate {
        c.logreg.learning_rate = lr;
        c.mlp.learning_rate = lr;
        c.cnn.train.learning_rate = lr;
        c.fasttext.learning_rate = lr;
        c.embedding.learning_rate = lr;
    }
    if let Some(e) = a.epochs {
        c.logreg.epochs = e;
        c.svm.epochs = e;
        c.mlp.epochs = e;
        c.cnn.train.epochs = e;
        c.fasttext.epochs = e;
        c.embedding.epochs = e;
    }
    if let Some(b) = a.batch_size {
        c.mlp.batch_size = b;
        c.cnn.train.batch_size = b;
    }
    if let Some(d) = a.dim {
        c.embedding.dim = d;
        c.fasttext.dim = d;
        c.cnn.embed_dim = d;
    }
    if let Some(k) = a.kernel {
        c.cnn.kernel = k;
    }
    if let Some(f) = a.filters {
        c.cnn.filters = f;
    }
    if let Some(m) = a.max_len {
        c.cnn.max_len = m;
    }
    Ok(c)
}

fn train(a: TrainArgs) -> Result<()> {
    let cfg = pipeline_config(&a)?;
    let data = read_dataset(&a.train)?;
    let model = train_model(&data, &cfg)?;
    save_model(&a.output, &model)?;
    if let Some(v) = &a.vocab_out {
        save_vocabulary(v, &model)?;
    }
    println!("trained {} on {} sentences", model.name(), data.len());
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let text = match &a.input {
        Some(p) => read_text(p)?,
        None => {
            let mut s = String::new();
            for line in std::io::stdin().lock().lines() {
                let line = line.map_err(|source| Error::Io { path: PathBuf::from("<stdin>"), source })?;
                s.push_str(&line);
                s.push('\n');
            }
            s
        }
    };
    let mut out = String::new();
    for (index, line) in text.lines().enumerate() {
        let clean = ndsl_core::corpus::clean_sentence(line);
        let label = model.predict(&clean).map_err(|e| ndsl_core::Error::Prediction { index, source: Box::new(e) })?;
        out.push_str(if a.iso { label.iso_code() } else { label.code() });
        out.push('\n');
    }
    match &a.output {
        Some(p) => write_text(p, &out),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.as_bytes()).map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn eval(a: EvalArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let test = read_dataset(&a.test)?;
    let name = model.name();
    let dataset = a.test.file_name().map_or_else(|| a.test.display().to_string(), |n| n.to_string_lossy().into());
    std::fs::create_dir_all(&a.out_dir).map_err(|source| Error::Io { path: a.out_dir.clone(), source })?;
    let report = evaluate(|t| model.predict(t), &test, &dataset, &name)?;
    write_text(&a.out_dir.join("confusion.csv"), &format_confusion(&report.confusion))?;
    write_text(&a.out_dir.join("report.json"), &format_report(&report))?;
    println!("accuracy {:.4} ({}/{})", report.accuracy, report.confusion.trace(), report.confusion.total());
    if let Some(p) = &a.out_domain {
        let other = read_dataset(p)?;
        let cross = cross_domain_eval(|t| model.predict(t), &test, &other, &name)?;
        write_text(&a.out_dir.join("cross_domain.json"), &format_cross_domain(&cross))?;
        println!("out-of-domain accuracy {:.4}, delta {:.4}", cross.out_domain.accuracy, cross.delta);
    }
    Ok(())
}

/// Dense feature rows for reduction, fitted on the dataset itself.
fn feature_rows(d: &Dataset, feature: FeatureSpec, normalize: bool, cap: Option<usize>, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut cfg = PipelineConfig::new(feature, ModelSpec::LogReg, seed);
    cfg.normalize = Some(normalize);
    cfg.vocab_cap = cap;
    let f = Featurizer::fit(d, &cfg)?;
    Ok(d.iter().map(|s| f.featurize(s.text()).to_dense()).collect())
}

pub fn reduce_dataset(a: &ReduceArgs, d: &Dataset) -> Result<Projection2D> {
    let feature: FeatureSpec = a.features.parse()?;
    let data = feature_rows(d, feature, a.normalize == Normalize::L1, a.vocab_cap, a.seed)?;
    let labels = d.labels();
    let coords = match a.method {
        Method::Pca => pca_project(&data, a.pca_dims.unwrap_or(2).max(2))?.coords,
        Method::Tsne => {
            let data = match a.pca_dims {
                Some(m) if m < data[0].len() => pca_project(&data, m)?.coords,
                _ => data,
            };
            let p = tsne_affinities(&data, a.perplexity)?;
            let cfg = TsneConfig { iterations: a.iterations, seed: a.seed, ..TsneConfig::default() };
            tsne_optimize(&p.joint, p.n, &cfg)?.y.iter().map(|y| y.to_vec()).collect()
        }
    };
    Ok(Projection2D::from_coords(&labels, &coords)?)
}

fn reduce(a: ReduceArgs) -> Result<()> {
    let d = read_dataset(&a.input)?;
    if d.is_empty() {
        return Err(ndsl_core::Error::EmptyInput.into());
    }
    let proj = reduce_dataset(&a, &d)?;
    write_text(&a.output, &format_projection(&proj))?;
    println!("projected {} points", proj.points.len());
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let grams = parse_list(&a.grams)?;
    let kernels = parse_list(&a.kernels)?;
    let mut train = TrainConfig { seed: a.seed, ..TrainConfig::cnn_default() };
    if let Some(e) = a.epochs {
        train.epochs = e;
    }
    if let Some(lr) = a.learning_rate {
        train.learning_rate = lr;
    }
    if let Some(b) = a.batch_size {
        train.batch_size = b;
    }
    let mut cfg = CnnConfig { train, ..CnnConfig::default() };
    if let Some(f) = a.filters {
        cfg.filters = f;
    }
    if let Some(d) = a.dim {
        cfg.embed_dim = d;
    }
    if let Some(m) = a.max_len {
        cfg.max_len = m;
    }
    let train_set = read_dataset(&a.train)?;
    let test_set = read_dataset(&a.test)?;
    let result = kernel_size_sweep(&train_set, &test_set, &grams, &kernels, &cfg)?;
    write_text(&a.output, &format_sweep(&result))?;
    for e in &result.entries {
        println!("gram {} kernel {}: {:.4}", e.gram, e.kernel, e.accuracy);
    }
    Ok(())
}

fn profile(a: ProfileArgs) -> Result<()> {
    let d = read_dataset(&a.input)?;
    let p = char_frequency_profile(&d.to_pools());
    write_text(&a.output, &format_profile(&p, a.normalized))
}
