use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{softmax, xavier, TrainConfig, TrainHistory};
use crate::features::FeatureVector;
use crate::label::argmax;
use crate::math::{axpy, dot, ln};
use crate::{rng, Error, Label, Result, NUM_LABELS};

/// Fully connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self { inputs, outputs, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.inputs..(o + 1) * self.inputs]
    }

    fn forward_dense(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs).map(|o| self.bias[o] + dot(self.row(o), x)).collect()
    }

    fn forward_sparse(&self, x: &FeatureVector) -> Vec<f64> {
        (0..self.outputs).map(|o| self.bias[o] + x.dot(self.row(o))).collect()
    }
}

/// Dense → ReLU hidden layers, dense → softmax output over the six labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layers: Vec<DenseLayer>,
}

/// Same layout as [`MlpModel::layers`]: `(weights, bias)` per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl MlpGradient {
    fn zeros_like(m: &MlpModel) -> Self {
        Self {
            layers: m.layers.iter().map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.outputs])).collect(),
        }
    }
}

impl MlpModel {
    /// `sizes = [d_in, hidden.., 6]` with at least one hidden layer.
    pub fn new_xavier(sizes: &[usize], seed: u64) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let mut rng = rng::seeded(seed);
        let layers = sizes
            .windows(2)
            .map(|w| DenseLayer {
                inputs: w[0],
                outputs: w[1],
                weights: xavier(&mut rng, w[0], w[1], w[0] * w[1]),
                bias: vec![0.0; w[1]],
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        Self::check_sizes(sizes)?;
        Ok(Self { layers: sizes.windows(2).map(|w| DenseLayer::zeros(w[0], w[1])).collect() })
    }

    fn check_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 3 {
            return Err(Error::InvalidConfig("an MLP needs input, hidden and output layers"));
        }
        if sizes.last() != Some(&NUM_LABELS) {
            return Err(Error::InvalidConfig("the output layer must have six units"));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidConfig("layer sizes must be positive"));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    /// Pre-activations of every layer.
    fn pre_activations(&self, x: &FeatureVector) -> Vec<Vec<f64>> {
        let mut zs = Vec::with_capacity(self.layers.len());
        zs.push(self.layers[0].forward_sparse(x));
        for layer in &self.layers[1..] {
            let a: Vec<f64> = zs.last().unwrap().iter().map(|&z| z.max(0.0)).collect();
            zs.push(layer.forward_dense(&a));
        }
        zs
    }

    pub fn forward(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        if x.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), found: x.dim() });
        }
        Ok(softmax(self.pre_activations(x).last().unwrap()))
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<(Label, Vec<f64>)> {
        let p = self.forward(x)?;
        Ok((Label::ALL[argmax(&p)], p))
    }

    /// Cross-entropy loss of one example and its gradient.
    pub fn loss_and_gradient(&self, x: &FeatureVector, y: Label) -> Result<(f64, MlpGradient)> {
        let mut g = MlpGradient::zeros_like(self);
        let loss = self.accumulate(x, y, 1.0, &mut g)?;
        Ok((loss, g))
    }

    /// Adds `scale ×` the example gradient into `g`; returns the loss.
    fn accumulate(&self, x: &FeatureVector, y: Label, scale: f64, g: &mut MlpGradient) -> Result<f64> {
        if x.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), found: x.dim() });
        }
        let zs = self.pre_activations(x);
        let mut delta = softmax(zs.last().unwrap());
        let loss = -ln(delta[y.index()].max(super::CCE_FLOOR));
        delta[y.index()] -= 1.0;
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let (gw, gb) = &mut g.layers[l];
            axpy(scale, &delta, gb);
            if l == 0 {
                for (o, &d) in delta.iter().enumerate() {
                    x.add_scaled_to(scale * d, &mut gw[o * layer.inputs..(o + 1) * layer.inputs]);
                }
                break;
            }
            let z_prev = &zs[l - 1];
            let a_prev: Vec<f64> = z_prev.iter().map(|&z| z.max(0.0)).collect();
            let mut back = vec![0.0; layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                axpy(scale * d, &a_prev, &mut gw[o * layer.inputs..(o + 1) * layer.inputs]);
                axpy(d, layer.row(o), &mut back);
            }
            for (b, &z) in back.iter_mut().zip(z_prev) {
                if z <= 0.0 {
                    *b = 0.0;
                }
            }
            delta = back;
        }
        Ok(loss)
    }

    fn apply(&mut self, g: &MlpGradient, lr: f64) {
        for (layer, (gw, gb)) in self.layers.iter_mut().zip(&g.layers) {
            axpy(-lr, gw, &mut layer.weights);
            axpy(-lr, gb, &mut layer.bias);
        }
    }
}

fn accuracy(model: &MlpModel, data: &[(FeatureVector, Label)]) -> Result<f64> {
    let mut correct = 0usize;
    for (x, y) in data {
        if model.predict(x)?.0 == *y {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len().max(1) as f64)
}

/// Mini-batch SGD on cross-entropy from a Xavier-uniform start. `hidden`
/// lists the hidden layer widths.
pub fn mlp_train(
    train: &[(FeatureVector, Label)],
    test: Option<&[(FeatureVector, Label)]>,
    hidden: &[usize],
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainHistory)> {
    cfg.validate()?;
    let d_in = train.first().ok_or(Error::EmptyInput)?.0.dim();
    let mut sizes = Vec::with_capacity(hidden.len() + 2);
    sizes.push(d_in);
    sizes.extend_from_slice(hidden);
    sizes.push(NUM_LABELS);
    let mut model = MlpModel::new_xavier(&sizes, cfg.seed)?;
    let mut rng = rng::seeded(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = TrainHistory::default();
    let mut grad = MlpGradient::zeros_like(&model);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            for (gw, gb) in &mut grad.layers {
                gw.fill(0.0);
                gb.fill(0.0);
            }
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                epoch_loss += model.accumulate(&train[i].0, train[i].1, scale, &mut grad)?;
            }
            model.apply(&grad, cfg.learning_rate);
        }
        history.train_loss.push(epoch_loss / train.len() as f64);
        if let Some(test) = test {
            history.test_accuracy.push(accuracy(&model, test)?);
        }
    }
    Ok((model, history))
}
