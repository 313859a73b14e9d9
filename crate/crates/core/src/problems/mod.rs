//! Deterministic test problems.
//!
//! * [`least_norm`]: minimum `H`-norm solution of an underdetermined system
//!   `B u = b`, right-hand side `(0, b)`.
//! * [`least_squares`]: `H^{-1}`-weighted least-squares solution of
//!   `B^T p = b`, right-hand side `(b, 0)`.
//! * [`stokes_mac`]: 2D channel flow on a staggered grid.
//!
//! Each problem ships named block preconditioners: `"P1"` uses identity
//! blocks and `"P2"` the problem-adapted choice.

mod random;
mod stokes;

pub use random::{least_norm, least_squares};
pub use stokes::{stokes_mac, StokesParams};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Vector};
use crate::operator::SaddleOperator;
use crate::partition::BlockPartition;
use crate::precond::BlockDiagPreconditioner;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemInfo {
    pub generator: String,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct GeneratedProblem {
    pub info: ProblemInfo,
    pub operator: SaddleOperator,
    pub rhs: Vector,
    pub partition: BlockPartition,
    /// Preconditioner blocks by name, in partition order.
    pub preconditioners: BTreeMap<String, Vec<CsrMatrix>>,
}

impl GeneratedProblem {
    /// Factors the named preconditioner.
    pub fn preconditioner(&self, name: &str) -> Result<BlockDiagPreconditioner> {
        let blocks = self.preconditioners.get(name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown preconditioner '{name}' (have: {})",
                self.preconditioners.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })?;
        BlockDiagPreconditioner::new(&self.partition, blocks)
    }

    pub fn dim(&self) -> usize {
        self.operator.n()
    }
}

fn identity_blocks(part: &BlockPartition) -> Vec<CsrMatrix> {
    part.block_sizes().into_iter().map(CsrMatrix::identity).collect()
}
