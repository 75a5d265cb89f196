use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::EmbeddedCluster;
use crate::error::{Error, Result};
use crate::ingestion::GroupKey;
use crate::metrics::{homogeneity, metric_report_with, MetricConfig, MetricReport};
use crate::simulation::{derive_seed, subsample};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub metric: MetricConfig,
    /// Groups larger than this have homogeneity computed on a uniform
    /// subsample of this many rows. `None` computes on every row.
    pub homogeneity_cap: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub label: String,
    pub layer: String,
    pub report: MetricReport,
    /// Rows used for homogeneity when the cap applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneity_rows: Option<usize>,
}

/// Averaged metric values (per class, or for the whole dataset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub diversity: f64,
    #[serde(with = "crate::metrics::extended_float")]
    pub density: f64,
    /// `ln(density)` of the averaged density.
    pub density_log: f64,
    pub homogeneity: Option<f64>,
    #[serde(default)]
    pub degenerate_axes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    #[serde(default)]
    pub per_group: Vec<GroupReport>,
    #[serde(default)]
    pub per_class: BTreeMap<String, AggregateMetrics>,
    #[serde(rename = "final")]
    pub final_metrics: AggregateMetrics,
    #[serde(default)]
    pub class_sizes: BTreeMap<String, usize>,
    /// Groups (`label/layer`) left out of homogeneity averaging.
    #[serde(default)]
    pub homogeneity_skipped: Vec<String>,
    #[serde(default)]
    pub homogeneity_cap: Option<usize>,
}

/// Metrics for every group, averaged over layers within each class, then
/// over classes weighted by class size.
pub fn profile_dataset(
    groups: &BTreeMap<GroupKey, EmbeddedCluster>,
    options: &ProfileOptions,
) -> Result<DatasetProfile> {
    if groups.is_empty() {
        return Err(Error::DegenerateInput("no groups to profile".into()));
    }

    let keyed: Vec<(&GroupKey, &EmbeddedCluster)> = groups.iter().collect();
    let per_group: Vec<GroupReport> = keyed
        .into_par_iter()
        .enumerate()
        .map(|(idx, (key, cluster))| group_report(idx, key, cluster, options))
        .collect();

    let mut by_label: BTreeMap<&str, Vec<&GroupReport>> = BTreeMap::new();
    for g in &per_group {
        by_label.entry(g.label.as_str()).or_default().push(g);
    }

    let mut per_class = BTreeMap::new();
    let mut class_sizes = BTreeMap::new();
    for (label, reports) in &by_label {
        let sizes: Vec<usize> = reports.iter().map(|g| g.report.m).collect();
        if sizes.iter().any(|&s| s != sizes[0]) {
            return Err(Error::InconsistentClassSize {
                label: label.to_string(),
                sizes,
            });
        }
        let layer_reports: Vec<&MetricReport> = reports.iter().map(|g| &g.report).collect();
        per_class.insert(label.to_string(), average_layers(&layer_reports));
        class_sizes.insert(label.to_string(), sizes[0]);
    }

    let weighted: Vec<(usize, &AggregateMetrics)> = per_class
        .iter()
        .map(|(label, metrics)| (class_sizes[label], metrics))
        .collect();
    let final_metrics = weight_classes(&weighted);

    let homogeneity_skipped = per_group
        .iter()
        .filter(|g| g.report.homogeneity.is_none())
        .map(|g| format!("{}/{}", g.label, g.layer))
        .collect();

    Ok(DatasetProfile {
        per_group,
        per_class,
        final_metrics,
        class_sizes,
        homogeneity_skipped,
        homogeneity_cap: options.homogeneity_cap,
    })
}

fn group_report(
    idx: usize,
    key: &GroupKey,
    cluster: &EmbeddedCluster,
    options: &ProfileOptions,
) -> GroupReport {
    let capped = options
        .homogeneity_cap
        .filter(|&cap| options.metric.compute_homogeneity && cap >= 3 && cluster.len() > cap);

    let Some(cap) = capped else {
        return GroupReport {
            label: key.label.clone(),
            layer: key.layer.clone(),
            report: metric_report_with(cluster, &options.metric),
            homogeneity_rows: None,
        };
    };

    let config = MetricConfig {
        compute_homogeneity: false,
        ..options.metric
    };
    let mut report = metric_report_with(cluster, &config);
    let result =
        subsample(cluster, cap, derive_seed(options.seed, idx)).and_then(|sub| homogeneity(&sub));
    match result {
        Ok(h) => {
            report.homogeneity = Some(h);
            report.homogeneity_skipped_reason = None;
        }
        Err(e) => report.homogeneity_skipped_reason = Some(e.to_string()),
    }
    GroupReport {
        label: key.label.clone(),
        layer: key.layer.clone(),
        report,
        homogeneity_rows: Some(cap),
    }
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Arithmetic mean over layers, metric by metric. Homogeneity averages the
/// layers that have it.
pub fn average_layers(reports: &[&MetricReport]) -> AggregateMetrics {
    let density = mean(reports.iter().map(|r| r.density));
    let present: Vec<f64> = reports.iter().filter_map(|r| r.homogeneity).collect();
    AggregateMetrics {
        diversity: mean(reports.iter().map(|r| r.diversity)),
        density,
        density_log: density.ln(),
        homogeneity: (!present.is_empty()).then(|| mean(present.into_iter())),
        degenerate_axes: reports.iter().map(|r| r.degenerate_axes).sum(),
    }
}

/// Class-size-weighted mean. Homogeneity weights are renormalized over the
/// classes that have a value.
pub fn weight_classes(classes: &[(usize, &AggregateMetrics)]) -> AggregateMetrics {
    let total: usize = classes.iter().map(|(m, _)| m).sum();
    let weight = |m: usize| m as f64 / total as f64;

    let density: f64 = classes.iter().map(|(m, c)| weight(*m) * c.density).sum();
    let homogeneity_mass: usize = classes
        .iter()
        .filter(|(_, c)| c.homogeneity.is_some())
        .map(|(m, _)| m)
        .sum();
    let homogeneity = (homogeneity_mass > 0).then(|| {
        classes
            .iter()
            .filter_map(|(m, c)| {
                c.homogeneity
                    .map(|h| *m as f64 / homogeneity_mass as f64 * h)
            })
            .sum()
    });

    AggregateMetrics {
        diversity: classes.iter().map(|(m, c)| weight(*m) * c.diversity).sum(),
        density,
        density_log: density.ln(),
        homogeneity,
        degenerate_axes: classes.iter().map(|(_, c)| c.degenerate_axes).sum(),
    }
}
