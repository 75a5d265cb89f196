use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `m x H` matrix of finite embedding vectors, stored row-major.
///
/// Immutable once built; every constructor checks that all rows share one
/// dimensionality and that every coordinate is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedCluster {
    data: Vec<f64>,
    dim: usize,
}

impl EmbeddedCluster {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidCluster("cluster has no rows".into()))?;
        let dim = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidCluster(format!(
                    "row {i} has length {}, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, dim)
    }

    /// Builds a cluster from a row-major buffer of `m * dim` values.
    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCluster("dimensionality must be >= 1".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidCluster("cluster has no rows".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::InvalidCluster(format!(
                "buffer of {} values is not a whole number of rows of length {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidCluster(format!(
                "non-finite value at row {}, axis {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { data, dim })
    }

    /// Number of samples `m`.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false: a valid cluster holds at least one row.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Dimensionality `H`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Rows at `indices`, in the order given.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidCluster(format!(
                    "row index {i} out of range for cluster of {} rows",
                    self.len()
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::from_flat(data, self.dim)
    }

    /// Stacks `other` below `self`.
    pub fn concat(&self, other: &EmbeddedCluster) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::InvalidCluster(format!(
                "cannot concatenate clusters of dimensionality {} and {}",
                self.dim, other.dim
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Self {
            data,
            dim: self.dim,
        })
    }
}

/// Per-axis mean and standard deviation of a cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub m: usize,
}

impl ClusterStats {
    pub fn dim(&self) -> usize {
        self.stds.len()
    }
}
