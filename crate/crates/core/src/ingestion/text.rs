use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{format_float, LabeledEmbeddings, Record, DEFAULT_LAYER};
use crate::error::{Error, Result};

const RESERVED_COLUMNS: [&str; 3] = ["id", "label", "layer"];

pub(super) fn auto_id(index: usize) -> String {
    format!("row-{}", index + 1)
}

#[derive(Deserialize)]
struct JsonVectorLine {
    id: Option<String>,
    label: String,
    layer: Option<String>,
    vector: Vec<f64>,
}

#[derive(Serialize)]
struct JsonVectorOut<'a> {
    id: &'a str,
    label: &'a str,
    layer: &'a str,
    vector: &'a [f64],
}

/// Non-blank lines of a JSONL file, paired with their 1-based line numbers.
pub(super) fn jsonl_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

pub(super) fn read_jsonl(path: &Path) -> Result<LabeledEmbeddings> {
    let mut records = Vec::new();
    for (line_no, line) in jsonl_lines(path)? {
        let parsed: JsonVectorLine = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("line {line_no}"), e.to_string()))?;
        records.push(Record {
            id: parsed.id.unwrap_or_else(|| auto_id(records.len())),
            label: parsed.label,
            layer: parsed.layer.unwrap_or_else(|| DEFAULT_LAYER.to_string()),
            vector: parsed.vector,
        });
    }
    LabeledEmbeddings::new(records)
}

pub(super) fn write_jsonl(embeddings: &LabeledEmbeddings, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in embeddings.records() {
        let line = serde_json::to_string(&JsonVectorOut {
            id: &r.id,
            label: &r.label,
            layer: &r.layer,
            vector: &r.vector,
        })
        .expect("finite vectors serialize");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub(super) fn read_csv(path: &Path) -> Result<LabeledEmbeddings> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|e| csv_error(e, "line 1"))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let label_col =
        column("label").ok_or_else(|| Error::parse("line 1", "header has no `label` column"))?;
    let id_col = column("id");
    let layer_col = column("layer");
    let axis_cols: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !RESERVED_COLUMNS.contains(&h.trim()))
        .map(|(i, _)| i)
        .collect();

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(e, "record"))?;
        let line = row.position().map_or(0, |p| p.line());
        let id = match id_col.and_then(|c| row.get(c)) {
            Some(id) if !id.is_empty() => id.to_string(),
            _ => auto_id(records.len()),
        };
        if row.len() != headers.len() {
            return Err(Error::DimensionMismatch {
                id,
                expected: axis_cols.len(),
                found: row.len().saturating_sub(headers.len() - axis_cols.len()),
            });
        }
        let mut vector = Vec::with_capacity(axis_cols.len());
        for (axis, &c) in axis_cols.iter().enumerate() {
            let cell = row[c].trim();
            let v: f64 = cell.parse().map_err(|_| {
                Error::parse(
                    format!("line {line}, column `{}`", &headers[c]),
                    format!("`{cell}` is not a number"),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { id, axis });
            }
            vector.push(v);
        }
        records.push(Record {
            id,
            label: row[label_col].to_string(),
            layer: layer_col
                .map(|c| row[c].to_string())
                .filter(|l| !l.is_empty())
                .unwrap_or_else(|| DEFAULT_LAYER.to_string()),
            vector,
        });
    }
    LabeledEmbeddings::new(records)
}

fn csv_error(e: csv::Error, fallback: &str) -> Error {
    let location = e
        .position()
        .map_or_else(|| fallback.to_string(), |p| format!("line {}", p.line()));
    Error::parse(location, e.to_string())
}

pub(super) fn write_csv(embeddings: &LabeledEmbeddings, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse("output", format!("{other:?}")),
    };

    let mut header = vec!["id".to_string(), "label".to_string(), "layer".to_string()];
    header.extend((0..embeddings.dim()).map(|j| format!("d{j}")));
    writer.write_record(&header).map_err(to_err)?;
    for r in embeddings.records() {
        let mut row = vec![r.id.clone(), r.label.clone(), r.layer.clone()];
        row.extend(r.vector.iter().map(|&v| format_float(v)));
        writer.write_record(&row).map_err(to_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
