//! Exact t-SNE: calibrated affinities and the optimisation trajectory.

use ndsl_core::reduce::{tsne_affinities, tsne_optimize, TsneConfig};
use ndsl_core::rng::seeded;
use rand_distr::{Distribution, Normal};

fn gaussian_blobs(centres: &[[f64; 5]], per: usize, spread: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    let noise = Normal::new(0.0, spread).unwrap();
    centres
        .iter()
        .flat_map(|c| (0..per).map(|_| c.iter().map(|m| m + noise.sample(&mut rng)).collect::<Vec<_>>()).collect::<Vec<_>>())
        .collect()
}

fn row_perplexity(row: &[f64], i: usize) -> f64 {
    let h: f64 = row.iter().enumerate().filter(|&(j, &p)| j != i && p > 0.0).map(|(_, &p)| -p * p.ln()).sum();
    h.exp()
}

pub fn affinity_rows_hit_the_target_perplexity() {
    let data = gaussian_blobs(&[[0.0; 5], [4.0, 0.0, 0.0, 0.0, 0.0], [0.0, 4.0, 1.0, 0.0, 0.0]], 17, 1.0, 5);
    let n = data.len();
    for perp in [5.0, 10.0, 20.0] {
        let a = tsne_affinities(&data, perp).unwrap();
        for i in 0..n {
            let row = &a.conditional[i * n..(i + 1) * n];
            assert!((row_perplexity(row, i) - perp).abs() <= 1e-5);
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        assert!((a.joint.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
}

pub fn two_clusters_separate() {
    let data = gaussian_blobs(&[[0.0; 5], [10.0; 5]], 10, 0.5, 7);
    let n = data.len();
    let a = tsne_affinities(&data, 5.0).unwrap();
    let r = tsne_optimize(&a.joint, n, &TsneConfig::default()).unwrap();
    let dist = |i: usize, j: usize| ((r.y[i][0] - r.y[j][0]).powi(2) + (r.y[i][1] - r.y[j][1]).powi(2)).sqrt();
    let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0, 0.0, 0);
    for i in 0..n {
        for j in i + 1..n {
            if (i < 10) == (j < 10) {
                intra += dist(i, j);
                ni += 1;
            } else {
                inter += dist(i, j);
                nx += 1;
            }
        }
    }
    assert!(inter / nx as f64 > intra / ni as f64);
    assert!(r.y.iter().all(|p| p[0].is_finite() && p[1].is_finite()));
    assert_eq!(r, tsne_optimize(&a.joint, n, &TsneConfig::default()).unwrap());
}

pub fn kl_settles_after_exaggeration() {
    let data = gaussian_blobs(&[[0.0; 5], [6.0, 0.0, 0.0, 0.0, 0.0], [0.0, 6.0, 0.0, 0.0, 0.0]], 17, 1.0, 3);
    let n = 50;
    let a = tsne_affinities(&data[..n], 10.0).unwrap();
    let cfg = TsneConfig::default();
    let r = tsne_optimize(&a.joint, n, &cfg).unwrap();
    assert!(r.q_sum_error <= 1e-9);
    let tail = &r.kl_history[cfg.exaggeration_iters..];
    let means: Vec<f64> = tail.chunks_exact(50).map(|c| c.iter().sum::<f64>() / 50.0).collect();
    for w in means.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{means:?}");
    }
}
