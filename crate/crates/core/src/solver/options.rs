use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Stop once `|eta_j| / |eta_0|` drops to this value.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Absolute per-block tolerances; the solve also stops at the first
    /// iteration where every `|eta_{j,b}| <= per_block_tol[b]`.
    pub per_block_tol: Option<Vec<f64>>,
    /// Track per-block residual norms. Costs one extra full-length vector.
    pub monitor: bool,
    /// Keep a copy of every iterate `x^{(j)}` for a-posteriori checks.
    pub store_iterates: bool,
    /// Lucky breakdown threshold for the Lanczos coefficient, relative to the
    /// largest tridiagonal entry seen so far.
    pub breakdown_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rel_tol: 1e-6,
            max_iter: 1000,
            per_block_tol: None,
            monitor: true,
            store_iterates: false,
            breakdown_tol: 1e-14,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self, num_blocks: usize) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidInput(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if !(self.breakdown_tol >= 0.0) {
            return Err(Error::InvalidInput("breakdown_tol must be non-negative".into()));
        }
        if let Some(tols) = &self.per_block_tol {
            if tols.len() != num_blocks {
                return Err(Error::InvalidInput(format!(
                    "per_block_tol has {} entries but the partition has {num_blocks} blocks",
                    tols.len()
                )));
            }
            if tols.iter().any(|t| !(*t >= 0.0)) {
                return Err(Error::InvalidInput("per-block tolerances must be non-negative".into()));
            }
            if !self.monitor {
                return Err(Error::InvalidInput("per_block_tol requires monitor = true".into()));
            }
        }
        Ok(())
    }
}
