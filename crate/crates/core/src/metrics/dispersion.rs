use crate::cluster::{ClusterStats, EmbeddedCluster};
use crate::sum::{compensated_sum, CompensatedSum};

use super::{MetricConfig, StdConvention};

/// Per-axis means and standard deviations, using compensated two-pass sums.
pub fn axis_stats(cluster: &EmbeddedCluster) -> ClusterStats {
    axis_stats_with(cluster, StdConvention::Population)
}

pub fn axis_stats_with(cluster: &EmbeddedCluster, convention: StdConvention) -> ClusterStats {
    let m = cluster.len();
    let dim = cluster.dim();

    let mut sums = vec![CompensatedSum::default(); dim];
    for row in cluster.rows() {
        for (acc, &v) in sums.iter_mut().zip(row) {
            acc.add(v);
        }
    }
    let means: Vec<f64> = sums.iter().map(|s| s.value() / m as f64).collect();

    let mut squares = vec![CompensatedSum::default(); dim];
    for row in cluster.rows() {
        for ((acc, &v), &mu) in squares.iter_mut().zip(row).zip(&means) {
            let d = v - mu;
            acc.add(d * d);
        }
    }
    let divisor = match convention {
        StdConvention::Population => m as f64,
        StdConvention::Sample => m.saturating_sub(1) as f64,
    };
    let stds = squares
        .iter()
        .map(|s| {
            if divisor == 0.0 {
                0.0
            } else {
                (s.value() / divisor).sqrt()
            }
        })
        .collect();

    ClusterStats { means, stds, m }
}

/// Geometric mean of the per-axis standard deviations.
///
/// Evaluated in log space; an exactly-zero axis makes the result 0.
pub fn diversity(stats: &ClusterStats) -> f64 {
    let dim = stats.dim();
    if dim == 0 || stats.stds.contains(&0.0) {
        return 0.0;
    }
    let log_sum = compensated_sum(stats.stds.iter().map(|s| s.ln()));
    (log_sum / dim as f64).exp()
}

/// Density value plus the number of axes that needed the variance floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub density: f64,
    pub density_log: f64,
    pub degenerate_axes: usize,
}

/// `m / (prod_j sigma_j)^(1/sqrt(H))`, with each sigma floored at
/// `config.sigma_floor`.
pub fn density(stats: &ClusterStats, config: &MetricConfig) -> DensityValue {
    let dim = stats.dim();
    let mut degenerate_axes = 0;
    let log_volume = compensated_sum(stats.stds.iter().map(|&s| {
        if s < config.sigma_floor {
            degenerate_axes += 1;
            config.sigma_floor.ln()
        } else {
            s.ln()
        }
    })) / (dim as f64).sqrt();

    let m = stats.m as f64;
    DensityValue {
        // m multiplies outside the exponential so density is exactly linear in m.
        density: m * (-log_volume).exp(),
        density_log: m.ln() - log_volume,
        degenerate_axes,
    }
}
