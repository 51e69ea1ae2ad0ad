use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use super::check_rows;
use crate::math::sqrt;
use crate::{rng, Error, Result};

/// Relative residual at which power iteration stops.
pub const EIGEN_TOL: f64 = 1e-10;
pub const EIGEN_MAX_ITER: usize = 10_000;

/// Population covariance `E[(X_i − μ_i)(X_j − μ_j)]`, `dim × dim` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub dim: usize,
    pub values: Vec<f64>,
    pub mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

pub fn covariance(data: &[Vec<f64>]) -> Result<CovarianceMatrix> {
    let d = check_rows(data, 2)?;
    let n = data.len() as f64;
    let mut mean = vec![0.0; d];
    for row in data {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut values = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for row in data {
        for ((c, x), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            if centered[i] == 0.0 {
                continue;
            }
            for j in i..d {
                values[i * d + j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = values[i * d + j] / n;
            values[i * d + j] = v;
            values[j * d + i] = v;
        }
    }
    Ok(CovarianceMatrix { dim: d, values, mean })
}

fn mat_vec(a: &[f64], d: usize, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = crate::math::dot(&a[i * d..(i + 1) * d], v);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = sqrt(crate::math::squared_norm(v));
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Flips `v` so its largest-magnitude component is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Whether `k + εI` admits a Cholesky factorisation.
fn is_psd(k: &[f64], d: usize, eps: f64) -> bool {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let s = k[i * d + j] - crate::math::dot(&l[i * d..i * d + j], &l[j * d..j * d + j]);
            if i == j {
                let pivot = s + eps;
                if !(pivot > 0.0) {
                    return false;
                }
                l[i * d + i] = sqrt(pivot);
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    true
}

/// The `m` largest eigenpairs of the symmetric `d × d` matrix `k`, in
/// descending order of eigenvalue.
///
/// Power iteration runs on `k + sI` so that the dominant eigenvalue is the
/// algebraically largest. A matrix that passes a Cholesky probe is treated as
/// positive semidefinite and gets only a tiny `s`; anything else is lifted by
/// its Gershgorin lower bound. Deflation projects iterates onto the
/// orthogonal complement of the pairs found so far.
pub fn top_eigenpairs(k: &[f64], d: usize, m: usize) -> Result<Vec<EigenPair>> {
    if k.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: k.len() });
    }
    if m == 0 || m > d {
        return Err(Error::InvalidConfig("number of eigenpairs must lie in 1..=dim"));
    }
    for i in 0..d {
        for j in 0..i {
            let (a, b) = (k[i * d + j], k[j * d + i]);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::InvalidConfig("matrix is not symmetric"));
            }
        }
    }
    let frob = sqrt(crate::math::squared_norm(k));
    let gershgorin = (0..d)
        .map(|i| k[i * d + i] - (0..d).filter(|&j| j != i).map(|j| k[i * d + j].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let shift = if gershgorin >= 0.0 {
        0.0
    } else if is_psd(k, d, 1e-12 * frob) {
        1e-12 * frob
    } else {
        (-gershgorin).min(frob)
    };
    let mut b = k.to_vec();
    for i in 0..d {
        b[i * d + i] += shift;
    }
    let scale = sqrt(crate::math::squared_norm(&b));

    let mut rng = rng::seeded(0x5eed);
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(m);
    let mut w = vec![0.0; d];
    for component in 0..m {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut mu = 0.0;
        let mut residual = f64::INFINITY;
        for _ in 0..EIGEN_MAX_ITER {
            for p in &pairs {
                let c = crate::math::dot(&v, &p.vector);
                crate::math::axpy(-c, &p.vector, &mut v);
            }
            if normalize(&mut v) == 0.0 {
                break;
            }
            mat_vec(&b, d, &v, &mut w);
            // deflation is inexact; keep w out of the found subspace too
            for p in &pairs {
                let c = crate::math::dot(&w, &p.vector);
                crate::math::axpy(-c, &p.vector, &mut w);
            }
            mu = crate::math::dot(&v, &w);
            let r2: f64 = w.iter().zip(&v).map(|(wi, vi)| (wi - mu * vi) * (wi - mu * vi)).sum();
            residual = if scale > 0.0 { sqrt(r2) / scale } else { 0.0 };
            if residual < EIGEN_TOL {
                break;
            }
            if normalize(&mut w) == 0.0 {
                // v lies in the null space of the deflated matrix
                residual = 0.0;
                break;
            }
            core::mem::swap(&mut v, &mut w);
        }
        if !(residual < EIGEN_TOL) {
            return Err(Error::ConvergenceFailure { component, residual });
        }
        fix_sign(&mut v);
        pairs.push(EigenPair { value: mu - shift, vector: v });
    }
    // near-equal eigenvalues can surface in either order
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(pairs)
}

/// Centered data projected onto the top `m` principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub coords: Vec<Vec<f64>>,
    pub components: Vec<EigenPair>,
    pub mean: Vec<f64>,
}

pub fn pca_project(data: &[Vec<f64>], m: usize) -> Result<PcaResult> {
    let cov = covariance(data)?;
    let components = top_eigenpairs(&cov.values, cov.dim, m)?;
    let coords = data
        .iter()
        .map(|row| {
            components
                .iter()
                .map(|p| row.iter().zip(&cov.mean).zip(&p.vector).map(|((x, mu), v)| (x - mu) * v).sum())
                .collect()
        })
        .collect();
    Ok(PcaResult { coords, components, mean: cov.mean })
}
