//! Block-diagonal SPD preconditioners realized by exact per-block solves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, CsrMatrix, EnvelopeCholesky, Vector};
use crate::partition::{BlockPartition, IndexSet};

/// Exact solver for one SPD block `P_b`.
#[derive(Clone, Debug)]
pub enum BlockSolve {
    Identity(usize),
    /// Reciprocals of a positive diagonal.
    Diagonal(Vec<f64>),
    Cholesky(EnvelopeCholesky),
}

impl BlockSolve {
    /// Factors `p` once. Diagonal matrices skip the factorization.
    pub fn from_spd(p: &CsrMatrix) -> std::result::Result<Self, String> {
        if !p.is_square() {
            return Err(format!("block is {}x{}, not square", p.nrows(), p.ncols()));
        }
        if let Some(diag) = p.diagonal_only() {
            if let Some((i, d)) = diag.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
                return Err(format!("non-positive diagonal entry {d:e} at row {i}"));
            }
            if diag.iter().all(|&d| d == 1.0) {
                return Ok(BlockSolve::Identity(diag.len()));
            }
            return Ok(BlockSolve::Diagonal(diag.iter().map(|d| 1.0 / d).collect()));
        }
        EnvelopeCholesky::factor(p)
            .map(BlockSolve::Cholesky)
            .map_err(|e| e.to_string())
    }

    pub fn dim(&self) -> usize {
        match self {
            BlockSolve::Identity(n) => *n,
            BlockSolve::Diagonal(d) => d.len(),
            BlockSolve::Cholesky(c) => c.dim(),
        }
    }

    /// Overwrites `x` with `P_b^{-1} x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        match self {
            BlockSolve::Identity(_) => {}
            BlockSolve::Diagonal(inv) => {
                for (xi, d) in x.iter_mut().zip(inv) {
                    *xi *= d;
                }
            }
            BlockSolve::Cholesky(c) => c.solve_in_place(x),
        }
    }
}

/// `P = blkdiag(P_1, ..., P_k)` with one SPD block per partition block.
#[derive(Clone, Debug)]
pub struct BlockDiagPreconditioner {
    labels: Vec<String>,
    blocks: Vec<BlockSolve>,
}

impl BlockDiagPreconditioner {
    /// Factors one matrix per block of `part`, in partition order.
    pub fn new(part: &BlockPartition, matrices: &[CsrMatrix]) -> Result<Self> {
        check_dim("number of preconditioner blocks", part.num_blocks(), matrices.len())?;
        let mut blocks = Vec::with_capacity(matrices.len());
        for (b, (blk, m)) in part.blocks().iter().zip(matrices).enumerate() {
            let to_err = |detail: String| Error::IndefinitePreconditioner {
                block: b,
                label: blk.label.clone(),
                detail,
            };
            if m.nrows() != blk.indices.len() {
                return Err(Error::InvalidInput(format!(
                    "preconditioner block '{}' is {}x{} but the partition block has {} indices",
                    blk.label,
                    m.nrows(),
                    m.ncols(),
                    blk.indices.len()
                )));
            }
            blocks.push(BlockSolve::from_spd(m).map_err(to_err)?);
        }
        Ok(BlockDiagPreconditioner {
            labels: part.labels(),
            blocks,
        })
    }

    pub fn identity(part: &BlockPartition) -> Self {
        BlockDiagPreconditioner {
            labels: part.labels(),
            blocks: part.block_sizes().into_iter().map(BlockSolve::Identity).collect(),
        }
    }

    pub fn from_solves(labels: Vec<String>, blocks: Vec<BlockSolve>) -> Result<Self> {
        check_dim("number of block labels", blocks.len(), labels.len())?;
        Ok(BlockDiagPreconditioner { labels, blocks })
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, b: usize) -> &BlockSolve {
        &self.blocks[b]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Checks that this preconditioner fits `part` block by block.
    pub fn check_compatible(&self, part: &BlockPartition) -> Result<()> {
        check_dim("number of preconditioner blocks", part.num_blocks(), self.blocks.len())?;
        for (blk, solve) in part.blocks().iter().zip(&self.blocks) {
            check_dim("preconditioner block size", blk.indices.len(), solve.dim())?;
        }
        Ok(())
    }

    /// `z = P^{-1} v`, blockwise.
    pub fn apply_inverse(&self, part: &BlockPartition, v: &Vector) -> Result<Vector> {
        self.check_compatible(part)?;
        check_dim("preconditioner input", part.dim(), v.len())?;
        let mut z = vec![0.0; v.len()];
        self.apply_inverse_into(part, v, &mut z);
        Vector::new(z)
    }

    /// Allocation-free for contiguous blocks; other blocks use a block-sized
    /// scratch buffer.
    pub(crate) fn apply_inverse_into(&self, part: &BlockPartition, v: &[f64], z: &mut [f64]) {
        for (blk, solve) in part.blocks().iter().zip(&self.blocks) {
            match &blk.indices {
                IndexSet::Range(r) => {
                    let zb = &mut z[r.clone()];
                    zb.copy_from_slice(&v[r.clone()]);
                    solve.solve_in_place(zb);
                }
                IndexSet::Sorted(ix) => {
                    let mut buf: Vec<f64> = ix.iter().map(|&i| v[i]).collect();
                    solve.solve_in_place(&mut buf);
                    for (&i, val) in ix.iter().zip(buf) {
                        z[i] = val;
                    }
                }
            }
        }
    }
}

/// Smallest Rayleigh-type quotient `<P^{-1} v, v> / <v, v>` over `draws`
/// Gaussian vectors. Positive for an SPD preconditioner.
pub fn sampled_min_quadratic_form(
    pre: &BlockDiagPreconditioner,
    part: &BlockPartition,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    pre.check_compatible(part)?;
    let n = part.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; n];
    let mut min = f64::INFINITY;
    for _ in 0..draws {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        pre.apply_inverse_into(part, &v, &mut z);
        min = min.min(dot(&z, &v) / dot(&v, &v));
    }
    Ok(min)
}
