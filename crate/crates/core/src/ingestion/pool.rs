use std::path::Path;

use serde::{Deserialize, Serialize};

use super::text::{auto_id, jsonl_lines};
use super::{LabeledEmbeddings, Record, DEFAULT_LAYER};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Token-level embeddings of one sequence. Sequence markers (start,
/// separator, end) are expected to be stripped by the producer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub id: String,
    pub label: String,
    pub layer: String,
    pub tokens: Vec<Vec<f64>>,
}

/// Arithmetic mean of the token vectors, summed with compensation.
pub fn mean_pool(seq: &TokenSequence) -> Result<Vec<f64>> {
    let first = seq
        .tokens
        .first()
        .ok_or_else(|| Error::EmptySequence(seq.id.clone()))?;
    let dim = first.len();
    let mut sums = vec![CompensatedSum::default(); dim];
    for token in &seq.tokens {
        if token.len() != dim {
            return Err(Error::DimensionMismatch {
                id: seq.id.clone(),
                expected: dim,
                found: token.len(),
            });
        }
        for (acc, &v) in sums.iter_mut().zip(token) {
            acc.add(v);
        }
    }
    let l = seq.tokens.len() as f64;
    Ok(sums.iter().map(|s| s.value() / l).collect())
}

#[derive(Deserialize)]
struct TokenLine {
    id: Option<String>,
    label: String,
    layer: Option<String>,
    tokens: Vec<Vec<f64>>,
}

/// Reads the token-level JSONL variant (`tokens` instead of `vector`).
pub fn read_token_sequences(path: impl AsRef<Path>) -> Result<Vec<TokenSequence>> {
    let mut out = Vec::new();
    for (line_no, line) in jsonl_lines(path.as_ref())? {
        let parsed: TokenLine = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("line {line_no}"), e.to_string()))?;
        out.push(TokenSequence {
            id: parsed.id.unwrap_or_else(|| auto_id(out.len())),
            label: parsed.label,
            layer: parsed.layer.unwrap_or_else(|| DEFAULT_LAYER.to_string()),
            tokens: parsed.tokens,
        });
    }
    Ok(out)
}

/// Pools every sequence, keeping id, label and layer; fails on the first
/// empty sequence.
pub fn pool_sequences(sequences: &[TokenSequence]) -> Result<LabeledEmbeddings> {
    let records = sequences
        .iter()
        .map(|s| {
            Ok(Record {
                id: s.id.clone(),
                label: s.label.clone(),
                layer: s.layer.clone(),
                vector: mean_pool(s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledEmbeddings::new(records)
}
