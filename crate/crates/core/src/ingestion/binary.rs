//! `CMET` binary vectors.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "CMET"
//!      4     1  version (1)
//!      5     1  float width in bytes (4 or 8)
//!      6     2  reserved, zero
//!      8     4  m, u32 little-endian
//!     12     4  H, u32 little-endian
//!     16   m*H*width  little-endian floats, row-major
//! ```
//!
//! Ids, labels and layers live in a JSONL sidecar (`<file>.meta.jsonl`), one
//! object per row in the same order.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::text::jsonl_lines;
use super::{LabeledEmbeddings, Record, DEFAULT_LAYER};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CMET";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatWidth {
    F32,
    F64,
}

impl FloatWidth {
    pub fn bytes(self) -> usize {
        match self {
            FloatWidth::F32 => 4,
            FloatWidth::F64 => 8,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SidecarLine {
    id: String,
    label: String,
    #[serde(default)]
    layer: Option<String>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.jsonl");
    PathBuf::from(name)
}

pub fn write_binary(embeddings: &LabeledEmbeddings, path: &Path, width: FloatWidth) -> Result<()> {
    let m = u32::try_from(embeddings.len())
        .map_err(|_| Error::InvalidSpec("more than u32::MAX records".into()))?;
    let dim = u32::try_from(embeddings.dim())
        .map_err(|_| Error::InvalidSpec("dimensionality exceeds u32::MAX".into()))?;

    let mut bytes =
        Vec::with_capacity(HEADER_LEN + embeddings.len() * embeddings.dim() * width.bytes());
    bytes.extend_from_slice(&MAGIC);
    bytes.push(VERSION);
    bytes.push(width.bytes() as u8);
    bytes.extend_from_slice(&[0, 0]);
    bytes.extend_from_slice(&m.to_le_bytes());
    bytes.extend_from_slice(&dim.to_le_bytes());
    for r in embeddings.records() {
        for &v in &r.vector {
            match width {
                FloatWidth::F32 => bytes.extend_from_slice(&(v as f32).to_le_bytes()),
                FloatWidth::F64 => bytes.extend_from_slice(&v.to_le_bytes()),
            }
        }
    }
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;

    let meta = sidecar_path(path);
    let file = File::create(&meta).map_err(|e| Error::io(&meta, e))?;
    let mut out = BufWriter::new(file);
    for r in embeddings.records() {
        let line = serde_json::to_string(&SidecarLine {
            id: r.id.clone(),
            label: r.label.clone(),
            layer: Some(r.layer.clone()),
        })
        .expect("strings serialize");
        writeln!(out, "{line}").map_err(|e| Error::io(&meta, e))?;
    }
    out.flush().map_err(|e| Error::io(&meta, e))
}

pub fn read_binary(path: &Path) -> Result<LabeledEmbeddings> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (width, m, dim) = parse_header(&bytes)?;

    let payload = &bytes[HEADER_LEN..];
    let expected = m
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(width.bytes()))
        .ok_or_else(|| Error::parse("byte offset 8", "m * H overflows"))?;
    if payload.len() != expected {
        return Err(Error::parse(
            format!("byte offset {}", HEADER_LEN + payload.len().min(expected)),
            format!(
                "payload holds {} bytes, header promises {expected} ({m} x {dim} x {})",
                payload.len(),
                width.bytes()
            ),
        ));
    }

    let values: Vec<f64> = match width {
        FloatWidth::F32 => payload
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4-byte chunk"))))
            .collect(),
        FloatWidth::F64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect(),
    };

    let meta_path = sidecar_path(path);
    let meta = jsonl_lines(&meta_path)?;
    if meta.len() != m {
        return Err(Error::parse(
            meta_path.display().to_string(),
            format!("sidecar has {} rows, binary has {m}", meta.len()),
        ));
    }

    let mut records = Vec::with_capacity(m);
    for (row, (line_no, line)) in meta.into_iter().enumerate() {
        let info: SidecarLine = serde_json::from_str(&line).map_err(|e| {
            Error::parse(
                format!("{} line {line_no}", meta_path.display()),
                e.to_string(),
            )
        })?;
        records.push(Record {
            id: info.id,
            label: info.label,
            layer: info.layer.unwrap_or_else(|| DEFAULT_LAYER.to_string()),
            vector: values[row * dim..(row + 1) * dim].to_vec(),
        });
    }
    LabeledEmbeddings::new(records)
}

fn parse_header(bytes: &[u8]) -> Result<(FloatWidth, usize, usize)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::parse(
            format!("byte offset {}", bytes.len()),
            format!("file is shorter than the {HEADER_LEN}-byte header"),
        ));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::parse(
            "byte offset 0",
            "bad magic, expected \"CMET\"",
        ));
    }
    if bytes[4] != VERSION {
        return Err(Error::parse(
            "byte offset 4",
            format!("unsupported version {}", bytes[4]),
        ));
    }
    let width = match bytes[5] {
        4 => FloatWidth::F32,
        8 => FloatWidth::F64,
        w => {
            return Err(Error::parse(
                "byte offset 5",
                format!("float width must be 4 or 8, got {w}"),
            ))
        }
    };
    if bytes[6] != 0 || bytes[7] != 0 {
        return Err(Error::parse("byte offset 6", "reserved bytes must be zero"));
    }
    let m = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let dim = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    if m > 0 && dim == 0 {
        return Err(Error::parse("byte offset 12", "H = 0 with m > 0"));
    }
    Ok((width, m, dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LabeledEmbeddings {
        LabeledEmbeddings::new(
            (0..3)
                .map(|i| Record {
                    id: format!("r{i}"),
                    label: "pos".into(),
                    layer: "L1".into(),
                    vector: vec![i as f64, -0.5 * i as f64],
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn layout_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.bin");
        write_binary(&sample(), &p, FloatWidth::F64).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(bytes.len(), 16 + 48);
        assert_eq!(&bytes[..8], &[0x43, 0x4D, 0x45, 0x54, 1, 8, 0, 0]);
        assert_eq!(&bytes[8..12], &3u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &2u32.to_le_bytes());
        assert_eq!(&bytes[16 + 8 * 2..16 + 8 * 3], &1.0f64.to_le_bytes());
        assert!(sidecar_path(&p).exists());
    }

    #[test]
    fn f32_width_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.bin");
        write_binary(&sample(), &p, FloatWidth::F32).unwrap();
        assert_eq!(fs::read(&p).unwrap().len(), 16 + 24);
        // these values are exact in f32
        assert_eq!(read_binary(&p).unwrap(), sample());
    }

    #[test]
    fn empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.bin");
        write_binary(&LabeledEmbeddings::default(), &p, FloatWidth::F64).unwrap();
        assert_eq!(fs::read(&p).unwrap().len(), 16);
        assert!(read_binary(&p).unwrap().is_empty());
    }

    #[test]
    fn corrupt_headers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.bin");
        write_binary(&sample(), &p, FloatWidth::F64).unwrap();
        let good = fs::read(&p).unwrap();

        let check = |mutate: &dyn Fn(&mut Vec<u8>), needle: &str| {
            let mut b = good.clone();
            mutate(&mut b);
            fs::write(&p, &b).unwrap();
            let err = read_binary(&p).unwrap_err().to_string();
            assert!(err.contains(needle), "{err}");
        };
        check(&|b| b[0] = b'X', "magic");
        check(&|b| b[4] = 2, "version");
        check(&|b| b[5] = 2, "width");
        check(&|b| b[6] = 1, "reserved");
        check(&|b| b.truncate(20), "payload");
        check(&|b| b.truncate(10), "header");
    }

    #[test]
    fn sidecar_row_count_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.bin");
        write_binary(&sample(), &p, FloatWidth::F64).unwrap();
        fs::write(sidecar_path(&p), "{\"id\":\"a\",\"label\":\"x\"}\n").unwrap();
        assert!(read_binary(&p).unwrap_err().to_string().contains("sidecar"));
    }
}
