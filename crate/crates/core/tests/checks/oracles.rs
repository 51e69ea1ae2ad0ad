//! Library results against independent brute-force computations.

use ndsl_core::classifiers::{knn_predict, nb_predict, train_knn, train_nb};
use ndsl_core::features::FeatureVector;
use ndsl_core::reduce::top_eigenpairs;
use ndsl_core::rng::{seeded, Rng};
use ndsl_core::{Label, NUM_LABELS};
use rand::Rng as _;

fn random_label(rng: &mut Rng) -> Label {
    Label::ALL[rng.random_range(0..NUM_LABELS)]
}

// ---------------------------------------------------------------- knn

/// Sorts every training point by distance (stable, so training order breaks
/// ties), votes among the first k, then breaks vote ties by summed distance
/// and label order.
fn knn_oracle(train: &[(Vec<f64>, Label)], k: usize, q: &[f64]) -> Label {
    let mut d: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, (x, _))| (x.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut votes = [0usize; NUM_LABELS];
    let mut sums = [0.0f64; NUM_LABELS];
    for &(dist, i) in &d[..k] {
        votes[train[i].1.index()] += 1;
        sums[train[i].1.index()] += dist.sqrt();
    }
    let mut ranked: Vec<usize> = (0..NUM_LABELS).filter(|&l| votes[l] > 0).collect();
    ranked.sort_by(|&a, &b| votes[b].cmp(&votes[a]).then(sums[a].partial_cmp(&sums[b]).unwrap()).then(a.cmp(&b)));
    Label::ALL[ranked[0]]
}

pub fn knn_matches_exhaustive_search() {
    for seed in 0..200u64 {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=200);
        let d = rng.random_range(1..=20);
        // small integer grid so distance ties actually occur
        let point = |rng: &mut Rng| -> Vec<f64> {
            (0..d).map(|_| if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0..3) as f64 }).collect()
        };
        let train: Vec<(Vec<f64>, Label)> = (0..n).map(|_| (point(&mut rng), random_label(&mut rng))).collect();
        let k = rng.random_range(1..=n.min(7));
        let examples: Vec<(FeatureVector, Label)> = train.iter().map(|(x, l)| (FeatureVector::from_dense(x), *l)).collect();
        let model = train_knn(&examples, k).unwrap();
        for _ in 0..5 {
            let q = point(&mut rng);
            assert_eq!(
                knn_predict(&model, &FeatureVector::from_dense(&q)).unwrap(),
                knn_oracle(&train, k, &q),
                "seed {seed} n {n} d {d} k {k}"
            );
        }
    }
}

// ---------------------------------------------------------------- naive bayes

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Non-negative rational in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Ratio(u128, u128);

impl Ratio {
    fn new(n: u128, d: u128) -> Self {
        let g = gcd(n, d).max(1);
        Ratio(n / g, d / g)
    }

    fn mul(self, o: Ratio) -> Ratio {
        let g1 = gcd(self.0, o.1).max(1);
        let g2 = gcd(o.0, self.1).max(1);
        Ratio::new((self.0 / g1) * (o.0 / g2), (self.1 / g2) * (o.1 / g1))
    }

    fn ln(self) -> f64 {
        (self.0 as f64).ln() - (self.1 as f64).ln()
    }
}

pub fn nb_log_scores_match_exact_rational_products() {
    for seed in 0..200u64 {
        let mut rng = seeded(1000 + seed);
        let v = rng.random_range(1..=3);
        let n = rng.random_range(1..=8);
        let data: Vec<(Vec<u32>, Label)> = (0..n)
            .map(|_| ((0..v).map(|_| rng.random_range(0..4)).collect(), random_label(&mut rng)))
            .collect();
        let examples: Vec<(FeatureVector, Label)> = data
            .iter()
            .map(|(c, l)| (FeatureVector::from_dense(&c.iter().map(|&x| x as f64).collect::<Vec<_>>()), *l))
            .collect();
        let model = train_nb(&examples, 1.0).unwrap();
        let query: Vec<u32> = (0..v).map(|_| rng.random_range(0..4)).collect();
        let (_, scores) = nb_predict(&model, &FeatureVector::from_dense(&query.iter().map(|&x| x as f64).collect::<Vec<_>>())).unwrap();
        for (k, label) in Label::ALL.iter().enumerate() {
            let docs = data.iter().filter(|(_, l)| l == label).count() as u128;
            if docs == 0 {
                assert_eq!(scores[k], f64::NEG_INFINITY);
                continue;
            }
            let mut counts = vec![0u128; v];
            for (c, _) in data.iter().filter(|(_, l)| l == label) {
                for (i, &x) in c.iter().enumerate() {
                    counts[i] += x as u128;
                }
            }
            let total: u128 = counts.iter().sum();
            // p(C_k) * prod_i p(i | C_k)^{x_i} with p(i | C_k) = (count + 1) / (total + V)
            let mut product = Ratio::new(docs, n as u128);
            for (i, &x) in query.iter().enumerate() {
                for _ in 0..x {
                    product = product.mul(Ratio::new(counts[i] + 1, total + v as u128));
                }
            }
            let expected = product.ln();
            assert!((scores[k] - expected).abs() < 1e-12, "seed {seed} label {label}: {} vs {expected}", scores[k]);
        }
    }
}

pub fn nb_two_class_posterior_matches_enumeration() {
    // dk counts {3, 1}, sv counts {1, 3}, one document each, alpha 1
    let ex = |c: [f64; 2], l| (FeatureVector::from_dense(&c), l);
    let model = train_nb(&[ex([3.0, 1.0], Label::Dk), ex([1.0, 3.0], Label::Sv)], 1.0).unwrap();
    for q in [[2.0, 0.0], [0.0, 2.0], [1.0, 1.0], [3.0, 2.0]] {
        let (label, s) = nb_predict(&model, &FeatureVector::from_dense(&q)).unwrap();
        let joint_dk = 0.5 * (4.0f64 / 6.0).powf(q[0]) * (2.0f64 / 6.0).powf(q[1]);
        let joint_sv = 0.5 * (2.0f64 / 6.0).powf(q[0]) * (4.0f64 / 6.0).powf(q[1]);
        let post_dk = joint_dk / (joint_dk + joint_sv);
        let lib_post = s[0].exp() / (s[0].exp() + s[1].exp());
        assert!((post_dk - lib_post).abs() < 1e-12);
        assert_eq!(label, if joint_sv > joint_dk { Label::Sv } else { Label::Dk });
    }
}

// ---------------------------------------------------------------- eigen

/// Characteristic polynomial coefficients `c[0..=n]` of `det(λI − A)`,
/// `c[n] = 1`, by the Faddeev–LeVerrier recursion.
fn char_poly(a: &[f64], n: usize) -> Vec<f64> {
    let matmul = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| x[i * n + k] * y[k * n + j]).sum();
            }
        }
        out
    };
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        let mut next = matmul(a, &m);
        for i in 0..n {
            next[i * n + i] += c[n - k + 1];
        }
        m = next;
        let am = matmul(a, &m);
        let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
        c[n - k] = -trace / k as f64;
    }
    c
}

/// All real roots in `[-r, r]` by a fine sign-change scan plus bisection.
fn real_roots(c: &[f64], r: f64) -> Vec<f64> {
    let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut prev = -r;
    for s in 1..=steps {
        let x = -r + 2.0 * r * s as f64 / steps as f64;
        if p(prev) == 0.0 {
            roots.push(prev);
        } else if p(prev).signum() != p(x).signum() && p(x) != 0.0 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p(lo).signum() == p(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = x;
    }
    roots
}

pub fn eigenvalues_match_characteristic_polynomial_roots() {
    let n = 4;
    for seed in 0..50u64 {
        let mut rng = seeded(2000 + seed);
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let bound = (0..n).map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max) + 1e-6;
        let mut roots = real_roots(&char_poly(&a, n), bound);
        assert_eq!(roots.len(), n, "seed {seed}: oracle found {roots:?}");
        roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let pairs = top_eigenpairs(&a, n, n).unwrap();
        for (p, r) in pairs.iter().zip(&roots) {
            assert!((p.value - r).abs() <= 1e-8, "seed {seed}: {} vs {r}", p.value);
        }
    }
}
