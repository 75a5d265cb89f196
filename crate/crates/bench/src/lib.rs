//! Shared inputs for the criterion benchmarks.

use textchar_core::simulation::{gaussian_blob, BlobSpec};
use textchar_core::EmbeddedCluster;

/// Deterministic isotropic blob used across benchmarks.
pub fn blob(m: usize, dim: usize) -> EmbeddedCluster {
    gaussian_blob(&BlobSpec::centered(m, dim, 1.0, 0xBE_4C)).expect("benchmark blob spec is valid")
}
