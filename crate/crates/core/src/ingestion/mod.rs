//! Embedding collections on disk: CSV, JSONL and the `CMET` binary layout,
//! token-level pooling, and grouping into per-(label, layer) clusters.

mod binary;
mod pool;
mod text;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cluster::EmbeddedCluster;
use crate::error::{Error, Result};

pub use binary::{read_binary, sidecar_path, write_binary, FloatWidth, HEADER_LEN, MAGIC};
pub use pool::{mean_pool, pool_sequences, read_token_sequences, TokenSequence};

pub const DEFAULT_LAYER: &str = "default";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
    Binary,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            "binary" | "bin" => Ok(Format::Binary),
            other => Err(Error::InvalidSpec(format!(
                "unknown format `{other}` (expected csv, jsonl or binary)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
            Format::Binary => "binary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub label: String,
    pub layer: String,
    pub vector: Vec<f64>,
}

/// Validated collection of labelled vectors sharing one dimensionality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledEmbeddings {
    records: Vec<Record>,
    dim: usize,
}

impl LabeledEmbeddings {
    /// Checks dimensionality, finiteness, and id uniqueness per (label, layer).
    pub fn new(records: Vec<Record>) -> Result<Self> {
        let dim = records.first().map_or(0, |r| r.vector.len());
        let mut seen = HashSet::new();
        for r in &records {
            if r.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    id: r.id.clone(),
                    expected: dim,
                    found: r.vector.len(),
                });
            }
            if let Some(axis) = r.vector.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue {
                    id: r.id.clone(),
                    axis,
                });
            }
            if !seen.insert((r.label.as_str(), r.layer.as_str(), r.id.as_str())) {
                return Err(Error::DuplicateId {
                    id: r.id.clone(),
                    label: r.label.clone(),
                    layer: r.layer.clone(),
                });
            }
        }
        if dim == 0 && !records.is_empty() {
            return Err(Error::DimensionMismatch {
                id: records[0].id.clone(),
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { records, dim })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn read_vectors(path: impl AsRef<Path>, format: Format) -> Result<LabeledEmbeddings> {
    let path = path.as_ref();
    match format {
        Format::Csv => text::read_csv(path),
        Format::Jsonl => text::read_jsonl(path),
        Format::Binary => read_binary(path),
    }
}

/// Writes in `format`; binary output uses 8-byte floats.
pub fn write_vectors(
    embeddings: &LabeledEmbeddings,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::Csv => text::write_csv(embeddings, path),
        Format::Jsonl => text::write_jsonl(embeddings, path),
        Format::Binary => write_binary(embeddings, path, FloatWidth::F64),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub label: String,
    pub layer: String,
}

impl GroupKey {
    pub fn new(label: impl Into<String>, layer: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            layer: layer.into(),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.label, self.layer)
    }
}

/// One cluster per (label, layer), rows in record order.
pub fn group_by_label(embeddings: &LabeledEmbeddings) -> BTreeMap<GroupKey, EmbeddedCluster> {
    let mut buffers: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    for r in embeddings.records() {
        buffers
            .entry(GroupKey::new(&r.label, &r.layer))
            .or_default()
            .extend_from_slice(&r.vector);
    }
    buffers
        .into_iter()
        .map(|(key, data)| {
            let cluster = EmbeddedCluster::from_flat(data, embeddings.dim())
                .expect("validated records form valid clusters");
            (key, cluster)
        })
        .collect()
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let magnitude = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&magnitude) {
        format!("{v:?}")
    } else {
        format!("{v:e}")
    }
}
