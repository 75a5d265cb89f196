//! Dataset-level profiles, down-sampling sweeps and correlation with
//! external model scores.

mod correlation;
mod profile;
mod sweep;

pub use correlation::{
    attach_scores, correlation_report, pearson, read_scores_csv, CorrelationEntry,
    CorrelationReport, ScoreTable, METRIC_NAMES,
};
pub use profile::{
    average_layers, profile_dataset, weight_classes, AggregateMetrics, DatasetProfile, GroupReport,
    ProfileOptions,
};
pub use sweep::{downsample_sweep, validate_fractions, SweepOptions, SweepRow, SweepTable};
