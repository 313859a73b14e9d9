use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::Vector;

/// Why a solve stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// `|eta_j| / |eta_0| <= rel_tol`.
    Converged,
    /// Every monitored block met its absolute tolerance.
    PerBlockConverged,
    MaxIterations,
    /// The Krylov space stopped growing before any tolerance was met.
    Breakdown,
}

impl Termination {
    pub fn is_converged(self) -> bool {
        matches!(self, Termination::Converged | Termination::PerBlockConverged)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::PerBlockConverged => "per-block-converged",
            Termination::MaxIterations => "max-iter",
            Termination::Breakdown => "breakdown",
        })
    }
}

/// Recurrence scalars produced by one loop iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recurrence {
    pub delta: f64,
    /// Lanczos normalization `gamma_{j+1}` (unnormalized on breakdown).
    pub gamma_next: f64,
    pub c: f64,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryRow {
    pub iter: usize,
    /// Signed `eta_j` as produced by the recursion.
    pub eta_signed: f64,
    /// `|eta_j|`
    pub eta: f64,
    /// `|eta_j| / |eta_0|`
    pub eta_rel: f64,
    /// `|eta_{j,b}|` per block; empty when monitoring is off.
    pub eta_blocks: Vec<f64>,
    /// Squared residual fractions `mu_b`; empty when monitoring is off.
    pub mu: Vec<f64>,
    /// Squared Lanczos-vector fractions `psi_b` of the newest basis vector.
    pub psi: Vec<f64>,
    /// `None` for the initial row.
    pub recurrence: Option<Recurrence>,
}

#[derive(Clone, Debug, Default)]
pub struct ConvergenceHistory {
    pub labels: Vec<String>,
    pub rows: Vec<HistoryRow>,
    pub termination: Option<Termination>,
    /// Every iterate `x^{(j)}`, when requested through `store_iterates`.
    pub iterates: Option<Vec<Vector>>,
}

impl ConvergenceHistory {
    pub fn eta0(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.eta)
    }

    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn is_monitored(&self) -> bool {
        self.rows.first().is_some_and(|r| !r.eta_blocks.is_empty())
    }

    pub fn block_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Mean of `mu_b` over all rows, `j = 0` included.
    pub fn average_fraction(&self, block: usize) -> Option<f64> {
        if !self.is_monitored() || block >= self.labels.len() {
            return None;
        }
        let sum: f64 = self.rows.iter().map(|r| r.mu[block]).sum();
        Some(sum / self.rows.len() as f64)
    }
}
