use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};

use super::check_rows;
use crate::math::{exp, ln, sqrt};
use crate::{rng, Error, Result};

pub const DEFAULT_PERPLEXITY: f64 = 30.0;
/// Largest accepted gap between achieved and target perplexity.
pub const PERPLEXITY_TOL: f64 = 1e-5;
/// Gradient norms above this are rescaled to it.
pub const GRADIENT_CLAMP: f64 = 1e6;
const BISECTION_STEPS: usize = 50;

/// Input affinities for `n` points, `n × n` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinities {
    pub n: usize,
    /// Conditional `p_{j|i}` in row `i`.
    pub conditional: Vec<f64>,
    /// Joint `p_ij = (p_{j|i} + p_{i|j}) / 2n`.
    pub joint: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Row of conditionals for precision `beta` and its perplexity `exp(H)`.
fn row_at(dist: &[f64], i: usize, beta: f64, dmin: f64, out: &mut [f64]) -> f64 {
    let mut sum = 0.0;
    for (j, (o, &d)) in out.iter_mut().zip(dist).enumerate() {
        *o = if j == i { 0.0 } else { exp(-beta * (d - dmin)) };
        sum += *o;
    }
    let mut h = 0.0;
    for (j, o) in out.iter_mut().enumerate() {
        *o /= sum;
        if j != i && *o > 0.0 {
            h -= *o * ln(*o);
        }
    }
    exp(h)
}

/// Gaussian affinities with per-point bandwidths tuned to `perplexity`.
///
/// For each point the precision `β = 1/(2σ²)` is bracketed by doubling or
/// halving from `1/mean distance`, then refined by 50 bisection steps in
/// log space.
pub fn tsne_affinities(data: &[Vec<f64>], perplexity: f64) -> Result<Affinities> {
    check_rows(data, 4)?;
    let n = data.len();
    let infeasible = |point, achieved| Error::PerplexityInfeasible { point, perplexity, achieved };
    if !(perplexity >= 1.0) || perplexity >= n as f64 {
        return Err(infeasible(0, f64::NAN));
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = data[i].iter().zip(&data[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut conditional = vec![0.0; n * n];
    let mut sigma = vec![0.0; n];
    for i in 0..n {
        let row = &dist[i * n..(i + 1) * n];
        let others = || row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &d)| d);
        let dmin = others().fold(f64::INFINITY, f64::min);
        let mean = others().map(|d| d - dmin).sum::<f64>() / (n - 1) as f64;
        let out = &mut conditional[i * n..(i + 1) * n];
        let mut beta = if mean > 0.0 { 1.0 / mean } else { 1.0 };
        let mut achieved = row_at(row, i, beta, dmin, out);
        // perplexity falls as beta grows; lo/hi bracket the target
        let close = |a: f64| (a - perplexity).abs() <= PERPLEXITY_TOL * 1e-2;
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        for _ in 0..2200 {
            if close(achieved) {
                break;
            }
            if achieved > perplexity {
                lo = beta;
            } else {
                hi = beta;
            }
            if lo > 0.0 && hi.is_finite() {
                break;
            }
            beta = if hi.is_finite() { beta / 2.0 } else { beta * 2.0 };
            if !beta.is_finite() || beta == 0.0 {
                break;
            }
            achieved = row_at(row, i, beta, dmin, out);
        }
        if lo > 0.0 && hi.is_finite() {
            for _ in 0..BISECTION_STEPS {
                if close(achieved) {
                    break;
                }
                beta = sqrt(lo * hi);
                achieved = row_at(row, i, beta, dmin, out);
                if achieved > perplexity {
                    lo = beta;
                } else {
                    hi = beta;
                }
            }
        }
        if !((achieved - perplexity).abs() <= PERPLEXITY_TOL) {
            return Err(infeasible(i, achieved));
        }
        sigma[i] = sqrt(1.0 / (2.0 * beta));
    }
    let mut joint = vec![0.0; n * n];
    let denom = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            joint[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) / denom;
        }
    }
    Ok(Affinities { n, conditional, joint, sigma })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    pub exaggeration: f64,
    pub exaggeration_iters: usize,
    pub momentum: f64,
    pub final_momentum: f64,
    pub momentum_switch: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            learning_rate: 200.0,
            exaggeration: 12.0,
            exaggeration_iters: 250,
            momentum: 0.5,
            final_momentum: 0.8,
            momentum_switch: 250,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneResult {
    /// Final embedding, one `[x, y]` per point.
    pub y: Vec<[f64; 2]>,
    /// `KL(P ‖ Q)` with the unexaggerated `P`, evaluated at the start of
    /// every iteration.
    pub kl_history: Vec<f64>,
    /// Largest `|Σ q_ij − 1|` seen during optimization.
    pub q_sum_error: f64,
    /// Iterations whose gradient norm was clamped.
    pub clamped: usize,
}

/// Gradient descent with momentum on `KL(P ‖ Q)` under the Student-t kernel.
pub fn tsne_optimize(p: &[f64], n: usize, cfg: &TsneConfig) -> Result<TsneResult> {
    if p.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: p.len() });
    }
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let mut rng = rng::seeded(cfg.seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid standard deviation");
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)]).collect();
    let mut velocity = vec![[0.0f64; 2]; n];
    let mut num = vec![0.0; n * n];
    let mut grad = vec![[0.0f64; 2]; n];
    let mut result = TsneResult { y: Vec::new(), kl_history: Vec::with_capacity(cfg.iterations), q_sum_error: 0.0, clamped: 0 };

    for it in 0..cfg.iterations {
        let mut z = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                let v = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = v;
                num[j * n + i] = v;
                z += 2.0 * v;
            }
        }
        let mut kl = 0.0;
        let mut q_sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = num[i * n + j] / z;
                q_sum += q;
                let pij = p[i * n + j];
                if pij > 0.0 {
                    kl += pij * ln(pij / q.max(f64::MIN_POSITIVE));
                }
            }
        }
        result.kl_history.push(kl);
        result.q_sum_error = result.q_sum_error.max((q_sum - 1.0).abs());

        let exaggeration = if it < cfg.exaggeration_iters { cfg.exaggeration } else { 1.0 };
        let mut norm2 = 0.0;
        for i in 0..n {
            let mut g = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = (exaggeration * p[i * n + j] - num[i * n + j] / z) * num[i * n + j];
                g[0] += w * (y[i][0] - y[j][0]);
                g[1] += w * (y[i][1] - y[j][1]);
            }
            grad[i] = [4.0 * g[0], 4.0 * g[1]];
            norm2 += grad[i][0] * grad[i][0] + grad[i][1] * grad[i][1];
        }
        let norm = sqrt(norm2);
        if norm > GRADIENT_CLAMP {
            result.clamped += 1;
            let s = GRADIENT_CLAMP / norm;
            grad.iter_mut().for_each(|g| *g = [g[0] * s, g[1] * s]);
        }
        let momentum = if it < cfg.momentum_switch { cfg.momentum } else { cfg.final_momentum };
        let mut mean = [0.0; 2];
        for i in 0..n {
            for c in 0..2 {
                velocity[i][c] = momentum * velocity[i][c] - cfg.learning_rate * grad[i][c];
                y[i][c] += velocity[i][c];
                mean[c] += y[i][c] / n as f64;
            }
        }
        for yi in &mut y {
            yi[0] -= mean[0];
            yi[1] -= mean[1];
        }
    }
    result.y = y;
    Ok(result)
}
