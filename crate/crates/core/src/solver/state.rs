use std::mem::swap;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, scale, Vector};
use crate::operator::LinearOperator;
use crate::partition::BlockPartition;
use crate::precond::BlockDiagPreconditioner;

use super::givens::{givens, update_block_fraction};
use super::history::{ConvergenceHistory, HistoryRow, Recurrence, Termination};
use super::options::SolverOptions;

/// Per-block scalars for residual monitoring, plus the auxiliary vector `m_j`
/// whose blocks give `r_b^{(j)} = eta_j m_{j+1,b}`.
#[derive(Debug)]
struct Monitor {
    m: Vec<f64>,
    psi: Vec<f64>,
    theta: Vec<f64>,
    mu: Vec<f64>,
}

impl Monitor {
    fn eta_blocks(&self, eta: f64) -> Vec<f64> {
        self.mu.iter().map(|mu| eta.abs() * mu.sqrt()).collect()
    }
}

/// Preconditioned MINRES with optional per-block residual monitoring.
///
/// Full-length storage: `v_prev`, `v`, `z`, `w_prev`, `w`, `x` plus one
/// scratch vector that carries the unnormalized Lanczos vector. Monitoring
/// adds `m`. `z_{j+1}` is written into `v_prev`, which is dead once
/// `v_{j+1}` has been formed.
pub struct SolverState<'a, K: LinearOperator + ?Sized> {
    op: &'a K,
    pre: &'a BlockDiagPreconditioner,
    part: &'a BlockPartition,
    opts: SolverOptions,

    j: usize,
    v_prev: Vec<f64>,
    v: Vec<f64>,
    z: Vec<f64>,
    w_prev: Vec<f64>,
    w: Vec<f64>,
    x: Vec<f64>,
    scratch: Vec<f64>,

    gamma1: f64,
    /// `gamma_j`
    gamma: f64,
    c_prev: f64,
    c: f64,
    s_prev: f64,
    s: f64,
    /// Signed `eta_j` after the last completed iteration.
    eta: f64,
    /// Largest tridiagonal entry seen, the scale for breakdown detection.
    t_norm: f64,

    monitor: Option<Monitor>,
    history: ConvergenceHistory,
}

impl<'a, K: LinearOperator + ?Sized> SolverState<'a, K> {
    /// Sets up `v_1 = f - K x_0`, `z_1 = P^{-1} v_1`, normalizes both by
    /// `gamma_1 = |r_0|_{P^{-1}}` and records row `j = 0`.
    ///
    /// A zero initial residual yields a state that is already terminated as
    /// converged.
    pub fn new(
        op: &'a K,
        pre: &'a BlockDiagPreconditioner,
        part: &'a BlockPartition,
        f: &Vector,
        x0: Option<&Vector>,
        opts: SolverOptions,
    ) -> Result<Self> {
        let n = op.dim();
        check_dim("partition size", n, part.dim())?;
        check_dim("right-hand side", n, f.len())?;
        if let Some(x0) = x0 {
            check_dim("initial guess", n, x0.len())?;
        }
        pre.check_compatible(part)?;
        opts.validate(part.num_blocks())?;

        let k = part.num_blocks();
        let mut x = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        match x0 {
            Some(x0) => {
                x.copy_from_slice(x0);
                op.apply_into(&x, &mut scratch);
                for ((vi, fi), kx) in v.iter_mut().zip(f.iter()).zip(&scratch) {
                    *vi = fi - kx;
                }
            }
            None => v.copy_from_slice(f),
        }
        let mut z = vec![0.0; n];
        pre.apply_inverse_into(part, &v, &mut z);

        let ip = dot(&z, &v);
        if ip < 0.0 {
            return Err(indefinite(pre, part, &z, &v, "initial residual"));
        }
        let gamma1 = ip.sqrt();

        let mut state = SolverState {
            op,
            pre,
            part,
            j: 0,
            v_prev: vec![0.0; n],
            v,
            z,
            w_prev: vec![0.0; n],
            w: vec![0.0; n],
            x,
            scratch,
            gamma1,
            gamma: gamma1,
            c_prev: 1.0,
            c: 1.0,
            s_prev: 0.0,
            s: 0.0,
            eta: gamma1,
            t_norm: 0.0,
            monitor: None,
            history: ConvergenceHistory {
                labels: part.labels(),
                rows: Vec::new(),
                termination: None,
                iterates: opts.store_iterates.then(Vec::new),
            },
            opts,
        };

        if gamma1 == 0.0 {
            // x0 solves the system; there is no direction to normalize.
            if state.opts.monitor {
                let uniform = vec![1.0 / k as f64; k];
                state.monitor = Some(Monitor {
                    m: state.v.clone(),
                    psi: uniform.clone(),
                    theta: vec![0.0; k],
                    mu: uniform,
                });
            }
            state.record(None);
            state.history.termination = Some(Termination::Converged);
            return Ok(state);
        }

        scale(1.0 / gamma1, &mut state.v);
        scale(1.0 / gamma1, &mut state.z);
        if state.opts.monitor {
            let psi = state.part.inner_unchecked(&state.z, &state.v);
            state.monitor = Some(Monitor {
                m: state.v.clone(),
                mu: psi.clone(),
                psi,
                theta: vec![0.0; k],
            });
        }
        state.record(None);
        if let Some(t) = state.stopping_test() {
            state.history.termination = Some(t);
        }
        Ok(state)
    }

    pub fn iteration(&self) -> usize {
        self.j
    }

    pub fn is_terminated(&self) -> bool {
        self.history.termination.is_some()
    }

    pub fn termination(&self) -> Option<Termination> {
        self.history.termination
    }

    /// Current iterate `x^{(j)}`.
    pub fn solution(&self) -> &[f64] {
        &self.x
    }

    /// `|eta_j|`
    pub fn residual_norm(&self) -> f64 {
        self.eta.abs()
    }

    /// `|eta_{j,b}|`, when monitoring.
    pub fn block_residual_norms(&self) -> Option<Vec<f64>> {
        self.monitor.as_ref().map(|m| m.eta_blocks(self.eta))
    }

    pub fn history(&self) -> &ConvergenceHistory {
        &self.history
    }

    /// Number of full-length vectors this state keeps alive.
    pub fn full_length_vectors(&self) -> usize {
        7 + usize::from(self.monitor.is_some())
    }

    /// One iteration of the loop: Lanczos expansion, QR update, iterate
    /// update and (when enabled) the per-block fraction recurrences, followed
    /// by the stopping test.
    pub fn step(&mut self) -> Result<Option<Termination>> {
        if self.is_terminated() {
            return Err(Error::InvalidInput("step called on a terminated solver state".into()));
        }
        let j = self.j + 1;

        // Lanczos: v_{j+1} = K z_j - delta_j v_j - gamma_j v_{j-1}
        self.op.apply_into(&self.z, &mut self.scratch);
        let delta = dot(&self.scratch, &self.z);
        axpy(-delta, &self.v, &mut self.scratch);
        axpy(-self.gamma, &self.v_prev, &mut self.scratch);

        // z_{j+1} = P^{-1} v_{j+1}, stored in the v_prev buffer
        self.pre.apply_inverse_into(self.part, &self.scratch, &mut self.v_prev);
        let ip = dot(&self.v_prev, &self.scratch);

        self.t_norm = self.t_norm.max(if j == 1 {
            delta.abs()
        } else {
            delta.hypot(self.gamma)
        });
        let threshold = self.opts.breakdown_tol * self.t_norm;
        let lucky = ip.abs().sqrt() <= threshold;
        if ip < 0.0 && !lucky {
            return Err(indefinite(self.pre, self.part, &self.v_prev, &self.scratch, "Lanczos vector"));
        }
        let gamma_next = ip.max(0.0).sqrt();
        if !lucky {
            scale(1.0 / gamma_next, &mut self.scratch);
            scale(1.0 / gamma_next, &mut self.v_prev);
        }

        // QR update
        let alpha0 = self.c * delta - self.c_prev * self.s * self.gamma;
        let alpha2 = self.s * delta + self.c_prev * self.c * self.gamma;
        let alpha3 = self.s_prev * self.gamma;
        let rot = match givens(alpha0, gamma_next) {
            Ok(rot) => rot,
            Err(_) => {
                // T_j is singular and the space is exhausted: no further progress.
                self.j = j;
                self.record(Some(Recurrence {
                    delta,
                    gamma_next,
                    c: self.c,
                    s: self.s,
                }));
                self.history.termination = Some(Termination::Breakdown);
                return Ok(self.history.termination);
            }
        };
        let (c_next, s_next, alpha1) = (rot.c, rot.s, rot.r);

        if let (Some(mon), false) = (self.monitor.as_mut(), lucky) {
            let z_next = &self.v_prev;
            let v_next = &self.scratch;
            self.part.inner_into(&mon.m, z_next, &mut mon.theta);
            self.part.inner_into(z_next, v_next, &mut mon.psi);
            for (mi, vi) in mon.m.iter_mut().zip(v_next) {
                *mi = -s_next * *mi + c_next * vi;
            }
        }

        // w_{j+1} = (z_j - alpha3 w_{j-1} - alpha2 w_j) / alpha1, built in w_prev
        let inv = 1.0 / alpha1;
        for ((wp, w), z) in self.w_prev.iter_mut().zip(&self.w).zip(&self.z) {
            *wp = (z - alpha3 * *wp - alpha2 * w) * inv;
        }
        swap(&mut self.w_prev, &mut self.w);
        axpy(c_next * self.eta, &self.w, &mut self.x);

        if let (Some(mon), false) = (self.monitor.as_mut(), lucky) {
            for ((mu, theta), psi) in mon.mu.iter_mut().zip(&mon.theta).zip(&mon.psi) {
                *mu = update_block_fraction(*mu, *theta, *psi, c_next, s_next);
            }
        }
        self.eta *= -s_next;

        self.j = j;
        self.c_prev = self.c;
        self.c = c_next;
        self.s_prev = self.s;
        self.s = s_next;
        self.gamma = gamma_next;

        if !lucky {
            // v_prev <- v_j, v <- v_{j+1}, z <- z_{j+1}; scratch takes the old z_j.
            swap(&mut self.z, &mut self.v_prev);
            swap(&mut self.v_prev, &mut self.v);
            swap(&mut self.v, &mut self.scratch);
        }

        self.record(Some(Recurrence {
            delta,
            gamma_next,
            c: c_next,
            s: s_next,
        }));

        let termination = self.stopping_test().or({
            if lucky {
                Some(Termination::Breakdown)
            } else if j >= self.opts.max_iter {
                Some(Termination::MaxIterations)
            } else {
                None
            }
        });
        self.history.termination = termination;
        Ok(termination)
    }

    /// Total criterion first, then the per-block criterion.
    fn stopping_test(&self) -> Option<Termination> {
        let eta0 = self.gamma1;
        if self.eta.abs() <= self.opts.rel_tol * eta0 {
            return Some(Termination::Converged);
        }
        if let (Some(tols), Some(mon)) = (&self.opts.per_block_tol, &self.monitor) {
            let blocks = mon.eta_blocks(self.eta);
            if blocks.iter().zip(tols).all(|(e, t)| e <= t) {
                return Some(Termination::PerBlockConverged);
            }
        }
        None
    }

    fn record(&mut self, recurrence: Option<Recurrence>) {
        let eta = self.eta.abs();
        let (eta_blocks, mu, psi) = match &self.monitor {
            Some(m) => (m.eta_blocks(self.eta), m.mu.clone(), m.psi.clone()),
            None => Default::default(),
        };
        self.history.rows.push(HistoryRow {
            iter: self.j,
            eta_signed: self.eta,
            eta,
            eta_rel: if self.gamma1 > 0.0 { eta / self.gamma1 } else { 0.0 },
            eta_blocks,
            mu,
            psi,
            recurrence,
        });
        if let Some(iterates) = self.history.iterates.as_mut() {
            iterates.push(Vector::from_vec_unchecked(self.x.clone()));
        }
    }

    /// Final iterate and history. Valid at any point; an unterminated state
    /// yields a history without a termination reason.
    pub fn finish(self) -> (Vector, ConvergenceHistory) {
        (Vector::from_vec_unchecked(self.x), self.history)
    }

    pub fn finalize_history(self) -> ConvergenceHistory {
        self.history
    }
}

fn indefinite(
    pre: &BlockDiagPreconditioner,
    part: &BlockPartition,
    z: &[f64],
    v: &[f64],
    what: &str,
) -> Error {
    let parts = part.inner_unchecked(z, v);
    let (block, value) = parts
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    Error::IndefinitePreconditioner {
        block,
        label: pre.labels().get(block).cloned().unwrap_or_default(),
        detail: format!("<P^-1 v, v> = {value:e} < 0 for the {what}"),
    }
}
