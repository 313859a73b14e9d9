//! A-posteriori check of the progressive block norms.
//!
//! The oracle recomputes `r = f - K x^{(j)}` for stored iterates and
//! evaluates `|r_b|_{P_b^{-1}}` directly. It only sees the operator, the
//! preconditioner, the right-hand side and the iterates, never the solver's
//! recurrence scalars.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, Vector};
use crate::operator::LinearOperator;
use crate::partition::BlockPartition;
use crate::precond::BlockDiagPreconditioner;
use crate::solver::ConvergenceHistory;

/// Explicit preconditioned residual norms of one iterate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockNorms {
    pub total: f64,
    pub per_block: Vec<f64>,
}

/// `sqrt(<P^{-1} r, r>)` in total and per block for `r = f - K x`.
pub fn explicit_block_norms<K: LinearOperator + ?Sized>(
    op: &K,
    pre: &BlockDiagPreconditioner,
    part: &BlockPartition,
    f: &Vector,
    x: &Vector,
) -> Result<BlockNorms> {
    let n = op.dim();
    check_dim("partition size", n, part.dim())?;
    check_dim("right-hand side", n, f.len())?;
    check_dim("iterate", n, x.len())?;
    pre.check_compatible(part)?;

    let mut r = vec![0.0; n];
    op.apply_into(x, &mut r);
    for (ri, fi) in r.iter_mut().zip(f.iter()) {
        *ri = fi - *ri;
    }
    let mut z = vec![0.0; n];
    pre.apply_inverse_into(part, &r, &mut z);
    let squares = part.inner_unchecked(&z, &r);
    if let Some((b, q)) = squares.iter().enumerate().find(|(_, q)| **q < 0.0) {
        return Err(Error::IndefinitePreconditioner {
            block: b,
            label: part.blocks()[b].label.clone(),
            detail: format!("<P_b^-1 r_b, r_b> = {q:e} < 0"),
        });
    }
    Ok(BlockNorms {
        total: dot(&z, &r).max(0.0).sqrt(),
        per_block: squares.iter().map(|q| q.sqrt()).collect(),
    })
}

/// Explicit norms for every iterate in order.
pub fn oracle_rows<K: LinearOperator + ?Sized>(
    op: &K,
    pre: &BlockDiagPreconditioner,
    part: &BlockPartition,
    f: &Vector,
    iterates: &[Vector],
) -> Result<Vec<BlockNorms>> {
    iterates
        .iter()
        .map(|x| explicit_block_norms(op, pre, part, f, x))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub iter: usize,
    pub progressive: Vec<f64>,
    pub explicit: Vec<f64>,
    pub abs_deviation: Vec<f64>,
    /// Largest block deviation divided by `eta_0`.
    pub rel_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub labels: Vec<String>,
    pub eta0: f64,
    pub tolerance: f64,
    pub rows: Vec<OracleRow>,
    pub max_rel_deviation: f64,
    /// Row attaining `max_rel_deviation`.
    pub worst_iter: usize,
    pub pass: bool,
}

impl OracleReport {
    /// Rows whose relative deviation exceeds the tolerance.
    pub fn failures(&self) -> impl Iterator<Item = &OracleRow> {
        self.rows.iter().filter(move |r| !(r.rel_deviation <= self.tolerance))
    }
}

/// Compares progressive `|eta_{j,b}|` against explicit norms row by row.
/// `tol` bounds `max_b | |eta_{j,b}| - |r_b^{(j)}| | / eta_0`.
pub fn compare_histories(
    progressive: &ConvergenceHistory,
    oracle: &[BlockNorms],
    tol: f64,
) -> Result<OracleReport> {
    if progressive.rows.len() != oracle.len() {
        return Err(Error::InvalidInput(format!(
            "history has {} rows but the oracle has {}",
            progressive.rows.len(),
            oracle.len()
        )));
    }
    if !progressive.is_monitored() {
        return Err(Error::InvalidInput("history carries no per-block norms".into()));
    }
    let eta0 = progressive.eta0();
    let denom = if eta0 > 0.0 { eta0 } else { 1.0 };
    let mut rows = Vec::with_capacity(oracle.len());
    for (row, exp) in progressive.rows.iter().zip(oracle) {
        check_dim("oracle block count", row.eta_blocks.len(), exp.per_block.len())?;
        let abs_deviation: Vec<f64> = row
            .eta_blocks
            .iter()
            .zip(&exp.per_block)
            .map(|(a, b)| (a.abs() - b).abs())
            .collect();
        let rel_deviation = abs_deviation.iter().fold(0.0, |m: f64, d| m.max(*d)) / denom;
        rows.push(OracleRow {
            iter: row.iter,
            progressive: row.eta_blocks.clone(),
            explicit: exp.per_block.clone(),
            abs_deviation,
            rel_deviation,
        });
    }
    let (worst_iter, max_rel_deviation) = rows
        .iter()
        .map(|r| (r.iter, r.rel_deviation))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    Ok(OracleReport {
        labels: progressive.labels.clone(),
        eta0,
        tolerance: tol,
        pass: max_rel_deviation <= tol,
        rows,
        max_rel_deviation,
        worst_iter,
    })
}
