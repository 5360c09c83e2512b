//! Size limits checked before large allocations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_MAX_VERTICES: u64 = 65536;
pub const DEFAULT_MAX_BYTES: u64 = 2 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceGuard {
    pub max_vertices: u64,
    pub max_bytes: u64,
    /// Skip both checks.
    pub force: bool,
}

impl Default for ResourceGuard {
    fn default() -> Self {
        ResourceGuard { max_vertices: DEFAULT_MAX_VERTICES, max_bytes: DEFAULT_MAX_BYTES, force: false }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what}: {n} vertices / ~{bytes} bytes exceeds the limit ({max_vertices} vertices, {max_bytes} bytes); use --force to override")]
pub struct GuardError {
    pub what: String,
    pub n: u64,
    pub bytes: u64,
    pub max_vertices: u64,
    pub max_bytes: u64,
}

impl ResourceGuard {
    pub fn unlimited() -> Self {
        ResourceGuard { force: true, ..Default::default() }
    }

    pub fn check(&self, what: &str, n: u64, bytes: u64) -> Result<(), GuardError> {
        if self.force || (n <= self.max_vertices && bytes <= self.max_bytes) {
            return Ok(());
        }
        Err(GuardError {
            what: what.to_string(),
            n,
            bytes,
            max_vertices: self.max_vertices,
            max_bytes: self.max_bytes,
        })
    }
}

/// Bytes for an `rows x cols` bit-packed GF(2) matrix.
pub fn gf2_bytes(rows: u64, cols: u64) -> u64 {
    rows.saturating_mul(cols.div_ceil(64)).saturating_mul(8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_limits() {
        let g = ResourceGuard::default();
        assert!(g.check("x", 48620, gf2_bytes(48620, 48620)).is_ok());
        assert!(g.check("x", 65537, 1).is_err());
        assert!(g.check("x", 10, 3 << 30).is_err());
        assert!(ResourceGuard::unlimited().check("x", u64::MAX, u64::MAX).is_ok());
    }
}
