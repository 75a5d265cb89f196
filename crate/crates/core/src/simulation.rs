//! Synthetic clusters and the four metric sanity scenarios: down-sampling,
//! varying spread, outliers on a sphere, and sub-clusters along one axis.
//!
//! Every generator is a pure function of its arguments and seed. The
//! seed-to-stream mapping is versioned by [`STREAM_VERSION`]:
//!
//! * version 1: `ChaCha8Rng::seed_from_u64(seed)`, normals from
//!   `rand_distr::StandardNormal`, drawn row-major; per-row seeds inside a
//!   scenario are `splitmix64(seed + (row + 1) * 0x9E3779B97F4A7C15)`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::EmbeddedCluster;
use crate::error::{Error, Result};
use crate::metrics::{metric_report_with, MetricConfig, MetricReport};

pub const STREAM_VERSION: u32 = 1;

/// Outlier sphere radius in units of `std * sqrt(H)`, the typical norm of a
/// blob point.
pub const DEFAULT_OUTLIER_RADIUS_FACTOR: f64 = 100.0;
/// Distance between adjacent sub-cluster centers in units of `std`.
pub const DEFAULT_SPACING_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub m: usize,
    pub dim: usize,
    pub std: f64,
    pub center: Vec<f64>,
    pub seed: u64,
}

impl BlobSpec {
    /// A blob centered at the origin.
    pub fn centered(m: usize, dim: usize, std: f64, seed: u64) -> Self {
        Self {
            m,
            dim,
            std,
            center: vec![0.0; dim],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.dim == 0 {
            return Err(Error::InvalidSpec(format!(
                "blob needs m >= 1 and H >= 1, got m = {}, H = {}",
                self.m, self.dim
            )));
        }
        if !(self.std > 0.0 && self.std.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "blob std must be positive and finite, got {}",
                self.std
            )));
        }
        if self.center.len() != self.dim {
            return Err(Error::InvalidSpec(format!(
                "center has length {}, expected {}",
                self.center.len(),
                self.dim
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("center must be finite".into()));
        }
        Ok(())
    }
}

pub fn derive_seed(seed: u64, row: usize) -> u64 {
    let mut z = seed.wrapping_add((row as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn push_blob(data: &mut Vec<f64>, m: usize, std: f64, center: &[f64], rng: &mut ChaCha8Rng) {
    for _ in 0..m {
        for &c in center {
            let z: f64 = rng.sample(StandardNormal);
            data.push(c + std * z);
        }
    }
}

/// Isotropic Gaussian blob.
pub fn gaussian_blob(spec: &BlobSpec) -> Result<EmbeddedCluster> {
    spec.validate()?;
    let mut data = Vec::with_capacity(spec.m * spec.dim);
    push_blob(
        &mut data,
        spec.m,
        spec.std,
        &spec.center,
        &mut rng(spec.seed),
    );
    EmbeddedCluster::from_flat(data, spec.dim)
}

/// Number of rows kept when sampling `fraction` of `m`.
pub fn sample_size(m: usize, fraction: f64) -> usize {
    (fraction * m as f64).round() as usize
}

/// Uniform subset without replacement of `round(fraction * m)` rows, kept in
/// their original order.
pub fn down_sample(cluster: &EmbeddedCluster, fraction: f64, seed: u64) -> Result<EmbeddedCluster> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let m = cluster.len();
    let k = sample_size(m, fraction);
    if k == 0 {
        return Err(Error::EmptyResult { m, fraction });
    }
    subsample(cluster, k, seed)
}

/// `k` rows drawn uniformly without replacement, kept in original order.
pub fn subsample(cluster: &EmbeddedCluster, k: usize, seed: u64) -> Result<EmbeddedCluster> {
    let m = cluster.len();
    if k == 0 || k > m {
        return Err(Error::InvalidSpec(format!(
            "cannot draw {k} rows from a cluster of {m}"
        )));
    }
    cluster.select(&sample_indices(m, k, seed))
}

/// Sorted indices of a uniform `k`-subset of `0..n`.
pub fn sample_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut picked = index::sample(&mut rng(seed), n, k).into_vec();
    picked.sort_unstable();
    picked
}

/// `n` points uniform on the sphere of the given radius in `dim` dimensions.
pub fn sphere_points(n: usize, dim: usize, radius: f64, seed: u64) -> Result<EmbeddedCluster> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidSpec(format!(
            "sphere needs n >= 1 and H >= 1, got n = {n}, H = {dim}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    let mut rng = rng(seed);
    let mut data = Vec::with_capacity(n * dim);
    let mut point = vec![0.0; dim];
    for _ in 0..n {
        let norm = loop {
            for p in point.iter_mut() {
                *p = rng.sample(StandardNormal);
            }
            let norm = point.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        data.extend(point.iter().map(|v| v * (radius / norm)));
    }
    EmbeddedCluster::from_flat(data, dim)
}

/// `base` followed by `count` points on a sphere of `radius` about the origin.
pub fn add_outliers(
    base: &EmbeddedCluster,
    count: usize,
    radius: f64,
    seed: u64,
) -> Result<EmbeddedCluster> {
    if count == 0 {
        return Ok(base.clone());
    }
    base.concat(&sphere_points(count, base.dim(), radius, seed)?)
}

/// `k` isotropic blobs centered at `(i * spacing, 0, ..., 0)`.
///
/// Each gets `total_m / k` points; the remainder goes one apiece to the
/// lowest-index blobs. All blobs draw from a single stream, so `k = 1`
/// reproduces [`gaussian_blob`] with the same seed bit for bit.
pub fn sub_clusters(
    k: usize,
    total_m: usize,
    dim: usize,
    std: f64,
    spacing: f64,
    seed: u64,
) -> Result<EmbeddedCluster> {
    if k == 0 || total_m < k {
        return Err(Error::InvalidSpec(format!(
            "sub-clusters need 1 <= k <= total_m, got k = {k}, total_m = {total_m}"
        )));
    }
    BlobSpec::centered(total_m, dim, std, seed).validate()?;
    if !spacing.is_finite() {
        return Err(Error::InvalidSpec("spacing must be finite".into()));
    }

    let mut rng = rng(seed);
    let mut data = Vec::with_capacity(total_m * dim);
    let mut center = vec![0.0; dim];
    for i in 0..k {
        let size = total_m / k + usize::from(i < total_m % k);
        center[0] = i as f64 * spacing;
        push_blob(&mut data, size, std, &center, &mut rng);
    }
    EmbeddedCluster::from_flat(data, dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    DownSampling,
    VaryingSpread,
    Outliers,
    SubClusters,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::DownSampling,
        ScenarioKind::VaryingSpread,
        ScenarioKind::Outliers,
        ScenarioKind::SubClusters,
    ];

    /// Name of the swept parameter.
    pub fn parameter_name(self) -> &'static str {
        match self {
            ScenarioKind::DownSampling => "fraction",
            ScenarioKind::VaryingSpread => "spread",
            ScenarioKind::Outliers => "outliers",
            ScenarioKind::SubClusters => "clusters",
        }
    }

    /// The base point followed by the standard sweep for this scenario.
    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            ScenarioKind::DownSampling => (1..=10).rev().map(|i| i as f64 / 10.0).collect(),
            ScenarioKind::VaryingSpread => (1..=10).map(f64::from).collect(),
            ScenarioKind::Outliers => (0..=10).map(|i| f64::from(i * 50)).collect(),
            ScenarioKind::SubClusters => (1..=10).map(f64::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub base: BlobSpec,
    pub sweep: Vec<f64>,
    /// Outlier sphere radius; defaults to `100 * std * sqrt(H)`.
    pub outlier_radius: Option<f64>,
    /// Sub-cluster center spacing; defaults to `5 * std`.
    pub spacing: Option<f64>,
}

impl ScenarioSpec {
    pub fn standard(kind: ScenarioKind, m: usize, dim: usize, seed: u64) -> Self {
        Self {
            kind,
            base: BlobSpec::centered(m, dim, 1.0, seed),
            sweep: kind.default_sweep(),
            outlier_radius: None,
            spacing: None,
        }
    }

    pub fn outlier_radius(&self) -> f64 {
        self.outlier_radius.unwrap_or_else(|| {
            DEFAULT_OUTLIER_RADIUS_FACTOR * self.base.std * (self.base.dim as f64).sqrt()
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
            .unwrap_or(DEFAULT_SPACING_FACTOR * self.base.std)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.sweep.is_empty() {
            return Err(Error::InvalidSpec("sweep is empty".into()));
        }
        let increasing = self.sweep.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.sweep.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidSpec("sweep must be strictly monotone".into()));
        }
        let integral = |v: f64| v.fract() == 0.0 && v >= 0.0;
        for &v in &self.sweep {
            let ok = match self.kind {
                ScenarioKind::DownSampling => v > 0.0 && v <= 1.0,
                ScenarioKind::VaryingSpread => v > 0.0 && v.is_finite(),
                ScenarioKind::Outliers => integral(v),
                ScenarioKind::SubClusters => integral(v) && v >= 1.0,
            };
            if !ok {
                return Err(Error::InvalidSpec(format!(
                    "sweep value {v} is not a valid {}",
                    self.kind.parameter_name()
                )));
            }
        }
        if let Some(r) = self.outlier_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "outlier radius {r} must be positive"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub parameter: f64,
    pub report: Option<MetricReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub seed: u64,
    pub stream_version: u32,
    pub rows: Vec<ScenarioRow>,
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioResult> {
    run_scenario_with(spec, &MetricConfig::default())
}

/// Builds the cluster for every sweep value and records its metric report.
///
/// Row failures are recorded on the row; the sweep is never aborted. Rows
/// run in parallel, each seeded from `(seed, row index)`, so the result does
/// not depend on the thread count.
pub fn run_scenario_with(spec: &ScenarioSpec, config: &MetricConfig) -> Result<ScenarioResult> {
    spec.validate()?;
    let base = match spec.kind {
        ScenarioKind::DownSampling | ScenarioKind::Outliers => Some(gaussian_blob(&spec.base)?),
        _ => None,
    };

    let rows = spec
        .sweep
        .par_iter()
        .enumerate()
        .map(|(row, &parameter)| {
            let cluster = scenario_cluster(
                spec,
                base.as_ref(),
                parameter,
                derive_seed(spec.base.seed, row),
            );
            match cluster {
                Ok(c) => ScenarioRow {
                    parameter,
                    report: Some(metric_report_with(&c, config)),
                    error: None,
                },
                Err(e) => ScenarioRow {
                    parameter,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    Ok(ScenarioResult {
        spec: spec.clone(),
        seed: spec.base.seed,
        stream_version: STREAM_VERSION,
        rows,
    })
}

fn scenario_cluster(
    spec: &ScenarioSpec,
    base: Option<&EmbeddedCluster>,
    parameter: f64,
    row_seed: u64,
) -> Result<EmbeddedCluster> {
    match spec.kind {
        ScenarioKind::DownSampling => {
            let base = base.expect("base blob is generated for down-sampling");
            down_sample(base, parameter, row_seed)
        }
        ScenarioKind::VaryingSpread => gaussian_blob(&BlobSpec {
            std: parameter,
            seed: row_seed,
            ..spec.base.clone()
        }),
        ScenarioKind::Outliers => {
            let base = base.expect("base blob is generated for outliers");
            add_outliers(base, parameter as usize, spec.outlier_radius(), row_seed)
        }
        ScenarioKind::SubClusters => {
            let c = sub_clusters(
                parameter as usize,
                spec.base.m,
                spec.base.dim,
                spec.base.std,
                spec.spacing(),
                row_seed,
            )?;
            if spec.base.center.iter().all(|&v| v == 0.0) {
                return Ok(c);
            }
            let shifted: Vec<f64> = c
                .rows()
                .flat_map(|r| r.iter().zip(&spec.base.center).map(|(v, o)| v + o))
                .collect();
            EmbeddedCluster::from_flat(shifted, spec.base.dim)
        }
    }
}
