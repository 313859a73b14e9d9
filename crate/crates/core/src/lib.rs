//! Preconditioned MINRES for symmetric saddle-point systems
//!
//! ```text
//! [ A   B^T ] [u]   [f_u]
//! [ B   -C  ] [p] = [f_p]
//! ```
//!
//! with a block-diagonal SPD preconditioner `P = blkdiag(P_1, ..., P_k)`.
//! Alongside the total preconditioned residual norm, the solver reports the
//! norm of every residual subvector, `|r_b|_{P_b^{-1}}`, at each iteration
//! without applying the operator or the preconditioner any extra time.
//!
//! ```
//! use blockres::{solve, BlockDiagPreconditioner, BlockPartition, CsrMatrix, SaddleOperator,
//!                SolverOptions, Vector};
//!
//! // [[2, 1], [1, 0]] (u, p) = (1, 0)
//! let k = SaddleOperator::from_blocks(
//!     CsrMatrix::from_diagonal(&[2.0]),
//!     CsrMatrix::from_triplets(1, 1, vec![(0, 0, 1.0)]).unwrap(),
//!     None,
//! ).unwrap();
//! let part = BlockPartition::contiguous([("u", 1), ("p", 1)]).unwrap();
//! let pre = BlockDiagPreconditioner::identity(&part);
//! let f = Vector::new(vec![1.0, 0.0]).unwrap();
//!
//! let out = solve(&k, &pre, &part, &f, None, &SolverOptions::default()).unwrap();
//! assert!((out.x[1] - 1.0).abs() < 1e-12);
//! for row in &out.history.rows {
//!     println!("{} {:e} {:?}", row.iter, row.eta, row.eta_blocks);
//! }
//! ```

pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod partition;
pub mod precond;
pub mod problems;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CsrMatrix, Vector};
pub use operator::{LinearOperator, SaddleOperator};
pub use partition::{BlockPartition, IndexSet};
pub use precond::{BlockDiagPreconditioner, BlockSolve};
pub use solver::{solve, ConvergenceHistory, SolveOutcome, SolverOptions, SolverState, Termination};
