use super::CsrMatrix;

/// Cholesky factor `L` (with `A = L L^T`) stored by rows over the lower
/// envelope of `A`: row `i` holds columns `first[i]..=i`.
///
/// Fill-in never leaves the envelope, so banded operators such as grid
/// Laplacians in natural ordering factor in `O(n * bandwidth^2)`.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    n: usize,
    first: Vec<usize>,
    /// Offset of row `i`'s first stored entry in `values`.
    start: Vec<usize>,
    values: Vec<f64>,
}

/// Reason a factorization failed.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorError {
    NotSquare,
    NotSymmetric { defect: f64 },
    /// Pivot `index` was not positive.
    NotPositiveDefinite { index: usize, pivot: f64 },
}

impl std::fmt::Display for FactorError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FactorError::NotSquare => write!(f, "matrix is not square"),
            FactorError::NotSymmetric { defect } => {
                write!(f, "matrix is not symmetric (max |a_ij - a_ji| = {defect:e})")
            }
            FactorError::NotPositiveDefinite { index, pivot } => {
                write!(f, "non-positive pivot {pivot:e} at row {index}")
            }
        }
    }
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self, FactorError> {
        if !a.is_square() {
            return Err(FactorError::NotSquare);
        }
        let n = a.nrows();
        let defect = a.symmetry_defect();
        let scale = a.norm_inf().max(f64::MIN_POSITIVE);
        if defect > 1e-12 * scale {
            return Err(FactorError::NotSymmetric { defect });
        }

        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, v) in a.triplets() {
            if j < i && v != 0.0 {
                first[i] = first[i].min(j);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);

        let mut values = vec![0.0; total];
        for (i, j, v) in a.triplets() {
            if j <= i && j >= first[i] {
                values[start[i] + (j - first[i])] = v;
            }
        }

        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let row_i = &values[start[i] + (lo - fi)..start[i] + (j - fi)];
                let row_j = &values[start[j] + (lo - fj)..start[j] + (j - fj)];
                let s: f64 = row_i.iter().zip(row_j).map(|(x, y)| x * y).sum();
                let idx = start[i] + (j - fi);
                let aij = values[idx] - s;
                if j < i {
                    values[idx] = aij / values[start[j] + (j - fj)];
                } else {
                    if !(aij > 0.0) || !aij.is_finite() {
                        return Err(FactorError::NotPositiveDefinite { index: i, pivot: aij });
                    }
                    values[idx] = aij.sqrt();
                }
            }
        }

        Ok(EnvelopeCholesky {
            n,
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    /// Overwrites `x` (holding `b`) with `A^{-1} b`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        // L y = b
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            let s: f64 = off.iter().zip(&x[fi..i]).map(|(l, y)| l * y).sum();
            x[i] = (x[i] - s) / diag[0];
        }
        // L^T x = y, sweeping rows of L from the bottom
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let (off, diag) = row.split_at(row.len() - 1);
            x[i] /= diag[0];
            let xi = x[i];
            for (xk, l) in x[fi..i].iter_mut().zip(off) {
                *xk -= l * xi;
            }
        }
    }
}
