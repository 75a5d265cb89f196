//! Independent reference computations. Nothing here calls the streaming
//! kernel: transition matrices are materialized in full.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use textchar_core::EmbeddedCluster;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Full row-stochastic transition matrix with weights `d^(ln H)`.
pub fn transition_matrix(c: &EmbeddedCluster) -> Vec<Vec<f64>> {
    let m = c.len();
    let power = (c.dim() as f64).ln();
    (0..m)
        .map(|i| {
            let w: Vec<f64> = (0..m)
                .map(|j| {
                    let d = distance(c.row(i), c.row(j));
                    if d == 0.0 {
                        0.0
                    } else {
                        d.powf(power)
                    }
                })
                .collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Stationary distribution by power iteration on the lazy chain (P + I) / 2,
/// which has the same fixed point and cannot oscillate.
pub fn power_iteration(p: &[Vec<f64>], steps: usize) -> Vec<f64> {
    let m = p.len();
    let mut nu = vec![1.0 / m as f64; m];
    for _ in 0..steps {
        let mut next = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                next[j] += nu[i] * p[i][j];
            }
        }
        for j in 0..m {
            next[j] = 0.5 * (next[j] + nu[j]);
        }
        let prev = std::mem::replace(&mut nu, next);
        if prev.iter().zip(&nu).all(|(a, b)| (a - b).abs() < 1e-17) {
            break;
        }
    }
    nu
}

/// Entropy rate from the materialized matrix, in the given log base.
///
/// Terms are accumulated with Neumaier compensation: a naive sum over the
/// m^2 terms drifts by ~1e-12 at m = 200, more than the kernel's own error.
pub fn brute_entropy(p: &[Vec<f64>], nu: &[f64], base: f64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (i, row) in p.iter().enumerate() {
        for &pij in row {
            if pij > 0.0 {
                let term = -nu[i] * pij * pij.log(base);
                let t = sum + term;
                if sum.abs() >= term.abs() {
                    comp += (sum - t) + term;
                } else {
                    comp += (term - t) + sum;
                }
                sum = t;
            }
        }
    }
    sum + comp
}

pub fn brute_homogeneity(c: &EmbeddedCluster, base: f64) -> f64 {
    let p = transition_matrix(c);
    let nu = power_iteration(&p, 10_000);
    brute_entropy(&p, &nu, base) / ((c.len() - 1) as f64).log(base)
}

/// Random cluster with uneven per-axis scales and a random offset.
pub fn random_cluster(rng: &mut ChaCha8Rng, m: usize, dim: usize) -> EmbeddedCluster {
    let scales: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..5.0)).collect();
    let offset: Vec<f64> = (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let data: Vec<f64> = (0..m)
        .flat_map(|_| {
            (0..dim)
                .map(|j| offset[j] + scales[j] * rng.sample::<f64, _>(StandardNormal))
                .collect::<Vec<_>>()
        })
        .collect();
    EmbeddedCluster::from_flat(data, dim).unwrap()
}

/// Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub fn random_rotation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while q.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for u in &q {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            q.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    q
}

pub fn transform(c: &EmbeddedCluster, f: impl Fn(&[f64]) -> Vec<f64>) -> EmbeddedCluster {
    let rows: Vec<Vec<f64>> = c.rows().map(f).collect();
    EmbeddedCluster::from_rows(&rows).unwrap()
}

pub fn rotate(c: &EmbeddedCluster, q: &[Vec<f64>]) -> EmbeddedCluster {
    transform(c, |r| {
        q.iter()
            .map(|qi| qi.iter().zip(r).map(|(a, b)| a * b).sum())
            .collect()
    })
}

/// `m` standard basis vectors in `R^m`: every pair is sqrt(2) apart.
pub fn basis_simplex(m: usize) -> EmbeddedCluster {
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    EmbeddedCluster::from_rows(&rows).unwrap()
}

/// Five equidistant points in `R^4`: the basis plus `(a, a, a, a)` with
/// `a = (1 - sqrt 5) / 4`.
pub fn simplex_5_in_4d() -> EmbeddedCluster {
    let a = (1.0 - 5f64.sqrt()) / 4.0;
    let mut rows: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    rows.push(vec![a; 4]);
    EmbeddedCluster::from_rows(&rows).unwrap()
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
