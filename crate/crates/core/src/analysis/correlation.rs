use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::SweepTable;
use crate::error::{Error, Result};
use crate::sum::compensated_sum;

pub const METRIC_NAMES: [&str; 3] = ["diversity", "density", "homogeneity"];

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DegenerateInput(format!(
            "sequences differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need n >= 2, got {n}")));
    }
    let mean_x = compensated_sum(x.iter().copied()) / n as f64;
    let mean_y = compensated_sum(y.iter().copied()) / n as f64;
    let dx: Vec<f64> = x.iter().map(|v| v - mean_x).collect();
    let dy: Vec<f64> = y.iter().map(|v| v - mean_y).collect();

    let sxx = compensated_sum(dx.iter().map(|d| d * d));
    let syy = compensated_sum(dy.iter().map(|d| d * d));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput(
            "a sequence has zero variance".into(),
        ));
    }
    let sxy = compensated_sum(dx.iter().zip(&dy).map(|(a, b)| a * b));
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub metric: String,
    pub score: String,
    pub pearson_r: Option<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub entries: Vec<CorrelationEntry>,
}

impl CorrelationReport {
    pub fn get(&self, metric: &str, score: &str) -> Option<&CorrelationEntry> {
        self.entries
            .iter()
            .find(|e| e.metric == metric && e.score == score)
    }
}

/// Correlates each final metric column of the sweep with each named score.
///
/// A failing pair is recorded on its entry and does not stop the others.
pub fn correlation_report(sweep: &SweepTable, score_names: &[String]) -> Result<CorrelationReport> {
    for row in &sweep.rows {
        if let Some(name) = score_names.iter().find(|n| !row.scores.contains_key(*n)) {
            return Err(Error::InvalidSpec(format!(
                "sweep row at fraction {} has no score `{name}`",
                row.fraction
            )));
        }
    }

    let mut entries = Vec::with_capacity(METRIC_NAMES.len() * score_names.len());
    for metric in METRIC_NAMES {
        let column: Option<Vec<f64>> = sweep
            .rows
            .iter()
            .map(|r| {
                let m = &r.profile.final_metrics;
                match metric {
                    "diversity" => Some(m.diversity),
                    "density" => Some(m.density),
                    _ => m.homogeneity,
                }
            })
            .collect();
        for score in score_names {
            let scores: Vec<f64> = sweep.rows.iter().map(|r| r.scores[score]).collect();
            let result = match &column {
                Some(values) => pearson(values, &scores),
                None => Err(Error::DegenerateInput(format!(
                    "{metric} is missing in at least one sweep row"
                ))),
            };
            let (pearson_r, error) = match result {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            entries.push(CorrelationEntry {
                metric: metric.to_string(),
                score: score.clone(),
                pearson_r,
                n: sweep.rows.len(),
                error,
            });
        }
    }
    Ok(CorrelationReport { entries })
}

/// Externally supplied scores keyed by down-sampling fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    /// Score columns in file order.
    pub names: Vec<String>,
    pub rows: Vec<(f64, BTreeMap<String, f64>)>,
}

/// Reads a CSV with a `fraction` column plus one column per score.
pub fn read_scores_csv(path: impl AsRef<Path>) -> Result<ScoreTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse("line 1", e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let fraction_col = headers
        .iter()
        .position(|h| h == "fraction")
        .ok_or_else(|| Error::parse("line 1", "header has no `fraction` column"))?;
    let names: Vec<String> = headers
        .iter()
        .filter(|h| *h != "fraction")
        .cloned()
        .collect();

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let loc = e
                .position()
                .map_or_else(|| "record".to_string(), |p| format!("line {}", p.line()));
            Error::parse(loc, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let parse = |col: usize| -> Result<f64> {
            let cell = record[col].trim();
            cell.parse().map_err(|_| {
                Error::parse(
                    format!("line {line}, column `{}`", headers[col]),
                    format!("`{cell}` is not a number"),
                )
            })
        };
        let fraction = parse(fraction_col)?;
        let mut scores = BTreeMap::new();
        for (col, name) in headers.iter().enumerate() {
            if col != fraction_col {
                scores.insert(name.clone(), parse(col)?);
            }
        }
        rows.push((fraction, scores));
    }
    Ok(ScoreTable { names, rows })
}

/// Joins scores onto sweep rows by exact fraction value.
///
/// Every sweep row and every score row must find a partner.
pub fn attach_scores(sweep: &mut SweepTable, scores: &ScoreTable) -> Result<()> {
    let mut unmatched = Vec::new();
    for row in &sweep.rows {
        if !scores.rows.iter().any(|(f, _)| *f == row.fraction) {
            unmatched.push(format!("{} (sweep)", row.fraction));
        }
    }
    for (f, _) in &scores.rows {
        if !sweep.rows.iter().any(|r| r.fraction == *f) {
            unmatched.push(format!("{f} (scores)"));
        }
    }
    if !unmatched.is_empty() {
        return Err(Error::JoinMismatch(unmatched));
    }
    for row in &mut sweep.rows {
        let (_, s) = scores
            .rows
            .iter()
            .find(|(f, _)| *f == row.fraction)
            .expect("checked above");
        row.scores.extend(s.iter().map(|(k, v)| (k.clone(), *v)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_correlations() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(pearson(&[1.0], &[2.0]).is_err());
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn symmetric_exactly() {
        let x = [0.3, 1.7, -2.2, 4.0, 0.01];
        let y = [1.0, -0.5, 2.5, 3.3, 0.2];
        assert_eq!(pearson(&x, &y).unwrap(), pearson(&y, &x).unwrap());
    }

    #[test]
    fn score_file_join() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        std::fs::write(&p, "acc,fraction\n0.9,1.0\n0.8,0.5\n").unwrap();
        let table = read_scores_csv(&p).unwrap();
        assert_eq!(table.names, vec!["acc".to_string()]);
        assert_eq!(table.rows[1].0, 0.5);

        std::fs::write(&p, "acc\n0.9\n").unwrap();
        assert!(read_scores_csv(&p).is_err());
        std::fs::write(&p, "fraction,acc\n1.0,x\n").unwrap();
        assert!(read_scores_csv(&p)
            .unwrap_err()
            .to_string()
            .contains("line 2"));
    }
}
