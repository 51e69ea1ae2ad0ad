//! Analytic gradients against central finite differences.

use ndsl_core::classifiers::LogRegModel;
use ndsl_core::embeddings::{FastTextClassifier, FeatureMode};
use ndsl_core::features::{FeatureVector, Vocabulary};
use ndsl_core::neural::{CnnConfig, CnnModel, MlpModel, TrainConfig};
use ndsl_core::rng::{seeded, Rng};
use ndsl_core::{Label, NUM_LABELS};
use rand::Rng as _;

const H: f64 = 1e-5;
const TOL: f64 = 1e-4;
const INSTANCES: u64 = 20;

/// `‖a − n‖ / (‖a‖ + ‖n‖)`, zero when both vanish.
fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, n)| (a - n) * (a - n)).sum::<f64>().sqrt();
    let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt() + numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Central differences of `loss` with respect to every entry of `params`.
fn numeric_gradient(params: &mut [f64], mut loss: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..params.len())
        .map(|i| {
            let orig = params[i];
            params[i] = orig + H;
            let up = loss(params);
            params[i] = orig - H;
            let down = loss(params);
            params[i] = orig;
            (up - down) / (2.0 * H)
        })
        .collect()
}

fn random_sparse(rng: &mut Rng, dim: usize) -> FeatureVector {
    let dense: Vec<f64> = (0..dim).map(|_| if rng.random_bool(0.6) { rng.random_range(-1.0..1.0) } else { 0.0 }).collect();
    FeatureVector::from_dense(&dense)
}

fn random_label(rng: &mut Rng) -> Label {
    Label::ALL[rng.random_range(0..NUM_LABELS)]
}

fn softmax_nll(z: &[f64], y: Label) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    lse - z[y.index()]
}

pub fn logreg_gradient_matches_finite_differences() {
    for seed in 0..INSTANCES {
        let mut rng = seeded(seed);
        let dim = rng.random_range(1..6);
        let data: Vec<(FeatureVector, Label)> = (0..5).map(|_| (random_sparse(&mut rng, dim), random_label(&mut rng))).collect();
        let mut model = LogRegModel::zeros(dim, Default::default());
        model.weights.iter_mut().for_each(|w| *w = rng.random_range(-1.0..1.0));
        let (_, analytic) = model.loss_and_gradient(&data).unwrap();
        // independent mean cross-entropy with the bias in the last column
        let loss = |w: &[f64]| {
            data.iter()
                .map(|(x, y)| {
                    let z: Vec<f64> = (0..NUM_LABELS)
                        .map(|k| {
                            let row = &w[k * (dim + 1)..(k + 1) * (dim + 1)];
                            x.iter().map(|(i, v)| v * row[i]).sum::<f64>() + row[dim]
                        })
                        .collect();
                    softmax_nll(&z, *y)
                })
                .sum::<f64>()
                / data.len() as f64
        };
        let mut params = model.weights.clone();
        let numeric = numeric_gradient(&mut params, loss);
        let err = relative_error(&analytic, &numeric);
        assert!(err < TOL, "seed {seed}: relative error {err}");
    }
}

pub fn fasttext_gradient_matches_finite_differences() {
    for seed in 0..INSTANCES {
        let mut rng = seeded(100 + seed);
        let dim = rng.random_range(1..5);
        let vocab = rng.random_range(2..7);
        let ids: Vec<usize> = (0..rng.random_range(1..6)).map(|_| rng.random_range(0..vocab)).collect();
        let y = random_label(&mut rng);
        let mut r = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let input = r(vocab * dim);
        let output = r(NUM_LABELS * dim);
        let bias: [f64; NUM_LABELS] = r(NUM_LABELS).try_into().unwrap();
        let tokens = (0..vocab).map(|i| format!("t{i}")).collect();
        let model = FastTextClassifier {
            feature_mode: FeatureMode::Words,
            features: Vocabulary::from_tokens(tokens),
            dim,
            input,
            output,
            bias,
        };
        let (_, g) = model.loss_and_gradient(&ids, y);
        let mut analytic = vec![0.0; vocab * dim];
        for (row, gr) in &g.input {
            analytic[row * dim..(row + 1) * dim].copy_from_slice(gr);
        }
        analytic.extend_from_slice(&g.output);
        analytic.extend_from_slice(&g.bias);

        let n_in = vocab * dim;
        let n_out = NUM_LABELS * dim;
        let mut params: Vec<f64> = model.input.iter().chain(&model.output).chain(&model.bias).copied().collect();
        // independent forward pass: mean of rows, linear layer, softmax
        let loss = |p: &[f64]| {
            let mut h = vec![0.0; dim];
            for &i in &ids {
                for d in 0..dim {
                    h[d] += p[i * dim + d] / ids.len() as f64;
                }
            }
            let z: Vec<f64> = (0..NUM_LABELS)
                .map(|k| p[n_in + n_out + k] + (0..dim).map(|d| p[n_in + k * dim + d] * h[d]).sum::<f64>())
                .collect();
            softmax_nll(&z, y)
        };
        let numeric = numeric_gradient(&mut params, loss);
        let err = relative_error(&analytic, &numeric);
        assert!(err < TOL, "seed {seed}: relative error {err}");
    }
}

fn mlp_params(m: &MlpModel) -> Vec<f64> {
    m.layers.iter().flat_map(|l| l.weights.iter().chain(&l.bias).copied()).collect()
}

fn set_mlp_params(m: &mut MlpModel, p: &[f64]) {
    let mut at = 0;
    for l in &mut m.layers {
        let n = l.weights.len();
        l.weights.copy_from_slice(&p[at..at + n]);
        at += n;
        let b = l.bias.len();
        l.bias.copy_from_slice(&p[at..at + b]);
        at += b;
    }
}

pub fn mlp_gradient_matches_finite_differences() {
    for seed in 0..INSTANCES {
        let mut rng = seeded(200 + seed);
        let d_in = rng.random_range(1..5);
        let mut sizes = vec![d_in, rng.random_range(1..5)];
        if rng.random_bool(0.5) {
            sizes.push(rng.random_range(1..4));
        }
        sizes.push(NUM_LABELS);
        let mut model = MlpModel::new_xavier(&sizes, seed).unwrap();
        // nonzero biases keep pre-activations off the ReLU kink
        for l in &mut model.layers {
            l.bias.iter_mut().for_each(|b| *b = rng.random_range(-0.5..0.5));
        }
        let x = random_sparse(&mut rng, d_in);
        let y = random_label(&mut rng);
        let (_, g) = model.loss_and_gradient(&x, y).unwrap();
        let analytic: Vec<f64> = g.layers.iter().flat_map(|(w, b)| w.iter().chain(b).copied()).collect();
        let mut probe = model.clone();
        let mut params = mlp_params(&model);
        let dense = x.to_dense();
        let numeric = numeric_gradient(&mut params, |p| {
            set_mlp_params(&mut probe, p);
            // independent forward: dense layers, ReLU between, softmax at the end
            let mut a = dense.clone();
            for (li, l) in probe.layers.iter().enumerate() {
                let mut z: Vec<f64> =
                    (0..l.outputs).map(|o| l.bias[o] + (0..l.inputs).map(|i| l.weights[o * l.inputs + i] * a[i]).sum::<f64>()).collect();
                if li + 1 < probe.layers.len() {
                    z.iter_mut().for_each(|v| *v = v.max(0.0));
                }
                a = z;
            }
            softmax_nll(&a, y)
        });
        let err = relative_error(&analytic, &numeric);
        assert!(err < TOL, "seed {seed} sizes {sizes:?}: relative error {err}");
    }
}

fn cnn_params(m: &CnnModel) -> Vec<f64> {
    [&m.embedding, &m.conv_w, &m.conv_b, &m.dense_w, &m.dense_b].into_iter().flatten().copied().collect()
}

fn set_cnn_params(m: &mut CnnModel, p: &[f64]) {
    let mut at = 0;
    for v in [&mut m.embedding, &mut m.conv_w, &mut m.conv_b, &mut m.dense_w, &mut m.dense_b] {
        let n = v.len();
        v.copy_from_slice(&p[at..at + n]);
        at += n;
    }
}

/// Token sequence of length 6 over a 5-row table (pad, unknown, 3 n-grams).
fn random_sequence(rng: &mut Rng) -> Vec<u32> {
    let real = rng.random_range(1..=6);
    (0..6).map(|i| if i < real { rng.random_range(1..5) } else { 0 }).collect()
}

pub fn cnn_gradient_matches_finite_differences() {
    let vocab = Vocabulary::from_tokens(vec!["a".into(), "b".into(), "c".into()]);
    for seed in 0..INSTANCES {
        let cfg = CnnConfig {
            gram: 1,
            embed_dim: 3,
            filters: 2,
            kernel: 2,
            max_len: 6,
            train: TrainConfig { seed, ..TrainConfig::cnn_default() },
        };
        let mut model = CnnModel::init(vocab.clone(), &cfg).unwrap();
        let mut rng = seeded(300 + seed);
        // larger weights than the default init so the ReLU and pooling paths are exercised
        for v in model.embedding.iter_mut().skip(3) {
            *v = rng.random_range(-1.0..1.0);
        }
        model.conv_b.iter_mut().for_each(|b| *b = rng.random_range(-0.2..0.2));
        let seq = random_sequence(&mut rng);
        let y = random_label(&mut rng);
        let (_, g) = model.loss_and_gradient(&seq, y).unwrap();
        let analytic: Vec<f64> = [&g.embedding, &g.conv_w, &g.conv_b, &g.dense_w, &g.dense_b].into_iter().flatten().copied().collect();
        let mut probe = model.clone();
        let mut params = cnn_params(&model);
        let numeric = numeric_gradient(&mut params, |p| {
            set_cnn_params(&mut probe, p);
            // independent forward with the pad row read as zeros
            let e = 3;
            let emb = |t: u32, d: usize| if t == 0 { 0.0 } else { probe.embedding[t as usize * e + d] };
            let pooled: Vec<f64> = (0..2)
                .map(|f| {
                    (0..5)
                        .map(|t| {
                            probe.conv_b[f]
                                + (0..2)
                                    .flat_map(|j| (0..e).map(move |d| (j, d)))
                                    .map(|(j, d)| probe.conv_w[f * 2 * e + j * e + d] * emb(seq[t + j], d))
                                    .sum::<f64>()
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                        .max(0.0)
                })
                .collect();
            let z: Vec<f64> = (0..NUM_LABELS)
                .map(|k| probe.dense_b[k] + (0..2).map(|f| probe.dense_w[k * 2 + f] * pooled[f]).sum::<f64>())
                .collect();
            softmax_nll(&z, y)
        });
        // the padding row is pinned; finite differences there are zero as well
        assert!(g.embedding[..3].iter().all(|&v| v == 0.0));
        let err = relative_error(&analytic, &numeric);
        assert!(err < TOL, "seed {seed} seq {seq:?}: relative error {err}");
    }
}
