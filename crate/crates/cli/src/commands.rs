use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use textchar_core::analysis::{
    attach_scores, correlation_report, downsample_sweep, profile_dataset, read_scores_csv,
    ProfileOptions, SweepOptions, SweepTable, METRIC_NAMES,
};
use textchar_core::ingestion::{
    format_float, group_by_label, pool_sequences, read_token_sequences, read_vectors,
    write_vectors, Format,
};
use textchar_core::simulation::{run_scenario_with, BlobSpec, ScenarioKind, ScenarioSpec};
use textchar_core::MetricConfig;

use crate::args::{CorrelateArgs, PoolArgs, ProfileArgs, SimulateArgs};
use crate::svg::{line_chart, Series};
use crate::CliError;

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let kind = ScenarioKind::from(args.scenario);
    let spec = ScenarioSpec {
        kind,
        base: BlobSpec::centered(args.points, args.dims, args.std, args.seed),
        sweep: kind.default_sweep(),
        outlier_radius: args.radius,
        spacing: args.spacing,
    };
    let config = MetricConfig {
        compute_homogeneity: !args.no_homogeneity,
        ..MetricConfig::default()
    };
    let result = run_scenario_with(&spec, &config)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "parameter",
        "diversity",
        "density",
        "density_log",
        "homogeneity",
    ])?;
    for row in &result.rows {
        let parameter = format_float(row.parameter);
        match &row.report {
            Some(r) => csv.write_record([
                parameter,
                format_float(r.diversity),
                format_float(r.density),
                format_float(r.density_log),
                r.homogeneity.map(format_float).unwrap_or_default(),
            ])?,
            None => {
                eprintln!(
                    "warning: {} = {parameter}: {}",
                    kind.parameter_name(),
                    row.error.as_deref().unwrap_or("no report")
                );
                csv.write_record([parameter.as_str(), "", "", "", ""])?;
            }
        }
    }
    emit(args.out.as_deref(), &finish_csv(csv)?)?;

    if let Some(path) = &args.svg {
        let xs: Vec<f64> = result.rows.iter().map(|r| r.parameter).collect();
        let column = |f: fn(&textchar_core::MetricReport) -> Option<f64>| -> Vec<Option<f64>> {
            result
                .rows
                .iter()
                .map(|r| r.report.as_ref().and_then(f))
                .collect()
        };
        let series = [
            Series {
                name: "diversity",
                values: column(|r| Some(r.diversity)),
            },
            Series {
                name: "ln density",
                values: column(|r| Some(r.density_log)),
            },
            Series {
                name: "homogeneity",
                values: column(|r| r.homogeneity),
            },
        ];
        let title = format!(
            "{} (H = {}, m = {}, seed = {})",
            args.scenario_name(),
            args.dims,
            args.points,
            args.seed
        );
        let svg = line_chart(&title, kind.parameter_name(), &xs, &series);
        fs::write(path, svg).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

pub fn profile(args: &ProfileArgs) -> Result<(), CliError> {
    require_exists(&args.input)?;
    let format = resolve_format(args.format, &args.input, None)?;
    let embeddings = read_vectors(&args.input, format)?;
    let profile_options = ProfileOptions {
        metric: MetricConfig {
            compute_homogeneity: !args.no_homogeneity,
            ..MetricConfig::default()
        },
        homogeneity_cap: args.homogeneity_cap,
        seed: args.seed,
    };

    let json = match &args.fractions {
        None => {
            let profile = profile_dataset(&group_by_label(&embeddings), &profile_options)?;
            serde_json::to_string_pretty(&profile)?
        }
        Some(fractions) => {
            let options = SweepOptions {
                profile: profile_options,
                seed: args.seed,
                stratified: !args.unstratified,
            };
            let sweep = downsample_sweep(&embeddings, fractions, &options)?;
            serde_json::to_string_pretty(&sweep)?
        }
    };
    emit(args.out.as_deref(), format!("{json}\n").as_bytes())
}

pub fn pool(args: &PoolArgs) -> Result<(), CliError> {
    require_exists(&args.input)?;
    let format = resolve_format(args.format, &args.out, Some(Format::Jsonl))?;
    let sequences = read_token_sequences(&args.input)?;
    let pooled = pool_sequences(&sequences)?;
    write_vectors(&pooled, &args.out, format)?;
    Ok(())
}

pub fn correlate(args: &CorrelateArgs) -> Result<(), CliError> {
    require_exists(&args.metrics)?;
    require_exists(&args.scores)?;
    let text = fs::read_to_string(&args.metrics).map_err(|e| CliError::io(&args.metrics, e))?;
    let mut sweep: SweepTable = serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: args.metrics.clone(),
        source: e,
    })?;
    let scores = read_scores_csv(&args.scores)?;
    attach_scores(&mut sweep, &scores)?;

    // keyed by header name, so column order in the score file does not matter
    let mut names = scores.names.clone();
    names.sort();
    let report = correlation_report(&sweep, &names)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["metric", "score", "pearson_r", "n", "note"])?;
    for metric in METRIC_NAMES {
        for name in &names {
            let entry = report.get(metric, name).expect("report covers every pair");
            let note = entry
                .error
                .as_ref()
                .map(|e| format!("degenerate: {e}"))
                .unwrap_or_default();
            csv.write_record([
                metric.to_string(),
                name.clone(),
                entry.pearson_r.map(format_float).unwrap_or_default(),
                entry.n.to_string(),
                note,
            ])?;
        }
    }
    emit(args.out.as_deref(), &finish_csv(csv)?)
}

impl SimulateArgs {
    fn scenario_name(&self) -> &'static str {
        match self.scenario {
            crate::args::Scenario::Downsample => "down-sampling",
            crate::args::Scenario::Spread => "varying spread",
            crate::args::Scenario::Outliers => "outliers",
            crate::args::Scenario::Subclusters => "sub-clusters",
        }
    }
}

fn require_exists(path: &Path) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::MissingInput(path.to_path_buf()))
    }
}

fn resolve_format(
    explicit: Option<Format>,
    path: &Path,
    fallback: Option<Format>,
) -> Result<Format, CliError> {
    if let Some(f) = explicit {
        return Ok(f);
    }
    let from_ext = path
        .extension()
        .and_then(|e| e.to_str())
        .and_then(|e| e.parse().ok());
    from_ext.or(fallback).ok_or_else(|| {
        CliError::Usage(format!(
            "cannot infer the format of {}; pass --format csv|jsonl|binary",
            path.display()
        ))
    })
}

fn finish_csv(csv: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    csv.into_inner().map_err(|e| CliError::Io {
        path: PathBuf::from("<csv buffer>"),
        source: e.into_error(),
    })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
