//! Ordered, disjoint index sets covering all unknowns.
//!
//! A partition fixes which components of a full-length vector belong to which
//! residual subvector. Index sets need not be contiguous; contiguous sets are
//! stored as ranges so that gather and scatter become plain slice copies.

use std::ops::Range;

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSet {
    Range(Range<usize>),
    /// Strictly increasing indices that do not form a single range.
    Sorted(Vec<usize>),
}

impl IndexSet {
    /// Normalizes `indices` (sorted, deduplicated check) into the compact form.
    pub fn from_indices(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition(format!("index {} listed twice", w[0])));
        }
        match (indices.first(), indices.last()) {
            (Some(&lo), Some(&hi)) if hi - lo + 1 == indices.len() => Ok(IndexSet::Range(lo..hi + 1)),
            (None, _) => Ok(IndexSet::Range(0..0)),
            _ => Ok(IndexSet::Sorted(indices)),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            IndexSet::Range(r) => r.len(),
            IndexSet::Sorted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_range(&self) -> Option<Range<usize>> {
        match self {
            IndexSet::Range(r) => Some(r.clone()),
            IndexSet::Sorted(_) => None,
        }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            IndexSet::Range(r) => Box::new(r.clone()),
            IndexSet::Sorted(v) => Box::new(v.iter().copied()),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            IndexSet::Range(r) => dot(&x[r.clone()], &y[r.clone()]),
            IndexSet::Sorted(v) => v.iter().map(|&i| x[i] * y[i]).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: String,
    pub indices: IndexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Block>,
}

impl BlockPartition {
    /// Validates that the blocks are disjoint, non-empty and cover `0..n`
    /// where `n` is the total number of indices.
    pub fn new(blocks: Vec<(String, Vec<usize>)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let n: usize = blocks.iter().map(|(_, ix)| ix.len()).sum();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut out = Vec::with_capacity(blocks.len());
        for (b, (label, indices)) in blocks.into_iter().enumerate() {
            if indices.is_empty() {
                return Err(Error::InvalidPartition(format!("block '{label}' is empty")));
            }
            if out.iter().any(|blk: &Block| blk.label == label) {
                return Err(Error::InvalidPartition(format!("duplicate block label '{label}'")));
            }
            for &i in &indices {
                if i >= n {
                    // Coverage of 0..n is impossible if an index lies outside it.
                    return Err(Error::InvalidPartition(format!(
                        "index {i} in block '{label}' is outside 0..{n}; the blocks leave a gap"
                    )));
                }
                if let Some(prev) = owner[i] {
                    let prev_label = if prev == b { &label } else { &out[prev].label };
                    return Err(Error::InvalidPartition(format!(
                        "index {i} appears in block '{prev_label}' and block '{label}'"
                    )));
                }
                owner[i] = Some(b);
            }
            out.push(Block {
                label,
                indices: IndexSet::from_indices(indices)?,
            });
        }
        // Disjoint sets whose sizes add up to n with all indices < n cover 0..n.
        Ok(BlockPartition { n, blocks: out })
    }

    /// Contiguous blocks laid out in order, e.g. `[("u", 100), ("p", 30)]`.
    pub fn contiguous<S: Into<String>>(sizes: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut offset = 0;
        let blocks = sizes
            .into_iter()
            .map(|(label, len)| {
                let ix: Vec<usize> = (offset..offset + len).collect();
                offset += len;
                (label.into(), ix)
            })
            .collect();
        Self::new(blocks)
    }

    /// Single block holding every index.
    pub fn single(n: usize) -> Self {
        BlockPartition {
            n,
            blocks: vec![Block {
                label: "all".into(),
                indices: IndexSet::Range(0..n),
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn labels(&self) -> Vec<String> {
        self.blocks.iter().map(|b| b.label.clone()).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }

    /// Per-block inner products `<x_b, y_b>`; they sum to `<x, y>`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dim("partitioned inner product (x)", self.n, x.len())?;
        check_dim("partitioned inner product (y)", self.n, y.len())?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.blocks.iter().map(|b| b.indices.inner(x, y)).collect()
    }

    /// Writes `<x_b, y_b>` into `out` without allocating.
    pub(crate) fn inner_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for (o, b) in out.iter_mut().zip(&self.blocks) {
            *o = b.indices.inner(x, y);
        }
    }

    pub fn gather(&self, block: usize, x: &[f64]) -> Vec<f64> {
        self.blocks[block].indices.iter().map(|i| x[i]).collect()
    }

    pub fn scatter(&self, block: usize, sub: &[f64], x: &mut [f64]) {
        for (i, v) in self.blocks[block].indices.iter().zip(sub) {
            x[i] = *v;
        }
    }

    /// Splits `x` into its block subvectors.
    pub fn split(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_dim("vector to split", self.n, x.len())?;
        Ok((0..self.blocks.len()).map(|b| self.gather(b, x)).collect())
    }

    /// Inverse of [`split`](Self::split).
    pub fn assemble(&self, parts: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_dim("number of subvectors", self.blocks.len(), parts.len())?;
        let mut x = vec![0.0; self.n];
        for (b, part) in parts.iter().enumerate() {
            check_dim("subvector length", self.blocks[b].indices.len(), part.len())?;
            self.scatter(b, part, &mut x);
        }
        Ok(x)
    }
}
