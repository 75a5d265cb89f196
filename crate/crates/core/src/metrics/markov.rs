use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::EmbeddedCluster;
use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Rows handled together so each streamed row `j` is reused from cache
/// across the whole block.
const ROW_BLOCK: usize = 16;
/// Independent partial accumulators; bounds memory at `LANES * m` pairs.
const LANES: usize = 32;

/// Stationary distribution and entropy rate (in nats) of the
/// distance-weighted chain over a cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChainSummary {
    pub stationary: Vec<f64>,
    pub entropy_rate: f64,
    /// `ln(m - 1)`, attained when every transition row is uniform.
    pub upper_bound: f64,
}

/// Edge weight `d^(ln H)` between two vectors, `d` the Euclidean distance.
///
/// Zero distance gives weight 0, including when `H = 1`.
pub fn pairwise_weight(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let d = squared_distance(a, b).sqrt();
    if d == 0.0 {
        return 0.0;
    }
    d.powf((a.len() as f64).ln())
}

/// Strength-proportional stationary distribution `nu_i = s_i / sum_k s_k`.
///
/// Exact for this chain because the weight matrix is symmetric.
pub fn stationary_distribution(cluster: &EmbeddedCluster) -> Result<Vec<f64>> {
    require_pairs(cluster)?;
    let sums = row_sums(cluster, false);
    let total = compensated_sum(sums.strengths.iter().copied());
    if total == 0.0 {
        return Err(Error::DegenerateCluster(
            "all points coincide; every pairwise weight is zero".into(),
        ));
    }
    Ok(sums.strengths.iter().map(|s| s / total).collect())
}

/// Entropy rate `-sum_i nu_i sum_j p(i->j) ln p(i->j)` of the chain with
/// transition probabilities `p(i->j) = w(i,j) / s_i`.
///
/// Streams over the upper triangle of pairs once, accumulating for every row
/// `s_i = sum_j w_ij` and `t_i = sum_j w_ij ln w_ij`. The row entropy is then
/// `ln s_i - t_i / s_i` and the rate collapses to
/// `(1/S) sum_i (s_i ln s_i - t_i)`. Memory beyond the input is `O(m)`.
pub fn entropy_rate(cluster: &EmbeddedCluster) -> Result<MarkovChainSummary> {
    require_pairs(cluster)?;
    let m = cluster.len();
    let sums = row_sums(cluster, true);

    if let Some(i) = sums.strengths.iter().position(|&s| s == 0.0) {
        return Err(Error::DegenerateCluster(format!(
            "point {i} coincides with every other point; its transition row is undefined"
        )));
    }

    let total = compensated_sum(sums.strengths.iter().copied());
    let numerator = compensated_sum(
        sums.strengths
            .iter()
            .zip(&sums.weighted_logs)
            .map(|(&s, &t)| s * s.ln() - t),
    );
    let stationary = sums.strengths.iter().map(|s| s / total).collect();

    Ok(MarkovChainSummary {
        stationary,
        entropy_rate: (numerator / total).max(0.0),
        upper_bound: ((m - 1) as f64).ln(),
    })
}

/// Entropy rate normalized by `ln(m - 1)`; requires `m >= 3`.
pub fn homogeneity(cluster: &EmbeddedCluster) -> Result<f64> {
    if cluster.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: cluster.len(),
        });
    }
    let summary = entropy_rate(cluster)?;
    Ok(summary.entropy_rate / summary.upper_bound)
}

fn require_pairs(cluster: &EmbeddedCluster) -> Result<()> {
    if cluster.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: cluster.len(),
        });
    }
    Ok(())
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            let d = x[k] - y[k];
            acc[k] += d * d;
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

struct RowSums {
    strengths: Vec<f64>,
    weighted_logs: Vec<f64>,
}

impl RowSums {
    fn zeros(m: usize) -> Self {
        Self {
            strengths: vec![0.0; m],
            weighted_logs: vec![0.0; m],
        }
    }

    fn merge(mut self, other: RowSums) -> Self {
        for (a, b) in self.strengths.iter_mut().zip(other.strengths) {
            *a += b;
        }
        for (a, b) in self.weighted_logs.iter_mut().zip(other.weighted_logs) {
            *a += b;
        }
        self
    }
}

fn row_sums(cluster: &EmbeddedCluster, with_logs: bool) -> RowSums {
    let m = cluster.len();
    // w = d^(ln H) = exp((ln H / 2) * ln d^2)
    let half_power = 0.5 * (cluster.dim() as f64).ln();
    let blocks = m.div_ceil(ROW_BLOCK);
    // Work is split into a fixed number of interleaved lanes and merged in
    // lane order, so the floating-point result is independent of the number
    // of worker threads.
    let lanes = blocks.min(LANES);

    let partials: Vec<RowSums> = (0..lanes)
        .into_par_iter()
        .map(|lane| {
            let mut acc = RowSums::zeros(m);
            for block in (lane..blocks).step_by(lanes) {
                let start = block * ROW_BLOCK;
                let end = (start + ROW_BLOCK).min(m);
                for j in start + 1..m {
                    let row_j = cluster.row(j);
                    for i in start..end.min(j) {
                        let d2 = squared_distance(cluster.row(i), row_j);
                        if d2 == 0.0 {
                            continue;
                        }
                        let log_w = half_power * d2.ln();
                        let w = log_w.exp();
                        acc.strengths[i] += w;
                        acc.strengths[j] += w;
                        if with_logs {
                            let wl = w * log_w;
                            acc.weighted_logs[i] += wl;
                            acc.weighted_logs[j] += wl;
                        }
                    }
                }
            }
            acc
        })
        .collect();

    partials.into_iter().fold(RowSums::zeros(m), RowSums::merge)
}
