//! Preconditioned MINRES for symmetric systems with block-diagonal SPD
//! preconditioners.
//!
//! Besides the usual total residual norm `|r^{(j)}|_{P^{-1}}`, the solver can
//! track the norm of each residual subvector `|r_b^{(j)}|_{P_b^{-1}}` while it
//! iterates. It does so through the squared fractions
//! `mu_b = (|r_b| / |r|)^2`, which obey a scalar recurrence driven by the
//! Givens rotation of the current step and two partial inner products, so no
//! extra operator or preconditioner applications are needed. The price is one
//! additional full-length vector.

mod givens;
mod history;
mod options;
mod state;

pub use givens::{givens, update_block_fraction, Rotation};
pub use history::{ConvergenceHistory, HistoryRow, Recurrence, Termination};
pub use options::SolverOptions;
pub use state::SolverState;

use crate::error::Result;
use crate::linalg::Vector;
use crate::operator::LinearOperator;
use crate::partition::BlockPartition;
use crate::precond::BlockDiagPreconditioner;

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vector,
    pub history: ConvergenceHistory,
}

impl SolveOutcome {
    pub fn termination(&self) -> Termination {
        self.history.termination.expect("finished solves always terminate")
    }

    pub fn converged(&self) -> bool {
        self.termination().is_converged()
    }
}

/// Runs MINRES from `x0` (zero when `None`) until a stopping criterion, the
/// iteration cap or a breakdown ends it. Hitting the cap is not an error; the
/// outcome carries [`Termination::MaxIterations`].
pub fn solve<K: LinearOperator + ?Sized>(
    op: &K,
    pre: &BlockDiagPreconditioner,
    part: &BlockPartition,
    f: &Vector,
    x0: Option<&Vector>,
    opts: &SolverOptions,
) -> Result<SolveOutcome> {
    let mut state = SolverState::new(op, pre, part, f, x0, opts.clone())?;
    while !state.is_terminated() {
        state.step()?;
    }
    let (x, history) = state.finish();
    Ok(SolveOutcome { x, history })
}
