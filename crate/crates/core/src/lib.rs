//! Unsupervised characteristic metrics for collections of embedding vectors.
//!
//! A collection of texts is represented as a cluster of `H`-dimensional
//! vectors. Three metrics summarize it:
//!
//! * **diversity**: geometric mean of the per-axis standard deviations
//!   (a generalized radius),
//! * **density**: sample count over a dimension-normalized volume,
//! * **homogeneity**: entropy rate of a fully connected, distance-weighted
//!   Markov chain over the samples, normalized into `[0, 1]`.
//!
//! The crate also ships the synthetic scenarios used to sanity-check the
//! metrics ([`simulation`]), embedding file readers and writers
//! ([`ingestion`]) and dataset-level aggregation and correlation
//! ([`analysis`]).

pub mod analysis;
pub mod cluster;
pub mod error;
pub mod ingestion;
pub mod metrics;
pub mod simulation;
pub(crate) mod sum;

pub use cluster::{ClusterStats, EmbeddedCluster};
pub use error::{Error, Result};
pub use metrics::{
    axis_stats, axis_stats_with, density, diversity, entropy_rate, homogeneity, metric_report,
    metric_report_with, pairwise_weight, stationary_distribution, DensityValue, MarkovChainSummary,
    MetricConfig, MetricReport, StdConvention,
};
