//! Diversity, density and homogeneity of a single cluster.

mod dispersion;
mod markov;

use serde::{Deserialize, Serialize};

use crate::cluster::EmbeddedCluster;

pub use dispersion::{axis_stats, axis_stats_with, density, diversity, DensityValue};
pub use markov::{
    entropy_rate, homogeneity, pairwise_weight, stationary_distribution, MarkovChainSummary,
};

pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdConvention {
    /// Divisor `m`.
    #[default]
    Population,
    /// Divisor `m - 1`.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Lower bound applied to each per-axis std inside the density volume.
    pub sigma_floor: f64,
    pub std_convention: StdConvention,
    /// Skip the O(m^2) homogeneity computation entirely.
    pub compute_homogeneity: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            sigma_floor: DEFAULT_SIGMA_FLOOR,
            std_convention: StdConvention::Population,
            compute_homogeneity: true,
        }
    }
}

/// All three metrics for one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub m: usize,
    pub dim: usize,
    pub diversity: f64,
    #[serde(with = "crate::metrics::extended_float")]
    pub density: f64,
    pub density_log: f64,
    pub homogeneity: Option<f64>,
    pub degenerate_axes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneity_skipped_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn metric_report(cluster: &EmbeddedCluster) -> MetricReport {
    metric_report_with(cluster, &MetricConfig::default())
}

/// Computes every metric; per-metric failures land in the report.
pub fn metric_report_with(cluster: &EmbeddedCluster, config: &MetricConfig) -> MetricReport {
    let stats = axis_stats_with(cluster, config.std_convention);
    let dens = density(&stats, config);
    let mut notes = Vec::new();

    if cluster.dim() == 1 {
        notes.push(
            "H = 1: distance power ln(1) = 0 makes every weight 1, so homogeneity is trivially 1"
                .to_string(),
        );
    }
    if dens.degenerate_axes > 0 {
        notes.push(format!(
            "{} axis std values fell below the floor {:e}",
            dens.degenerate_axes, config.sigma_floor
        ));
    }

    let (homogeneity, homogeneity_skipped_reason) = if !config.compute_homogeneity {
        (None, Some("homogeneity disabled".to_string()))
    } else if cluster.len() < 3 {
        (
            None,
            Some(format!(
                "m = {} < 3: the normalizer ln(m - 1) is not positive",
                cluster.len()
            )),
        )
    } else {
        match homogeneity(cluster) {
            Ok(h) => (Some(h), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };

    MetricReport {
        m: cluster.len(),
        dim: cluster.dim(),
        diversity: diversity(&stats),
        density: dens.density,
        density_log: dens.density_log,
        homogeneity,
        degenerate_axes: dens.degenerate_axes,
        homogeneity_skipped_reason,
        notes,
    }
}

/// JSON has no infinity; overflowed densities are written as the string "inf".
pub(crate) mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else if value.is_nan() {
            serializer.serialize_str("nan")
        } else if *value > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number, got `{other}`"
                ))),
            },
        }
    }
}
