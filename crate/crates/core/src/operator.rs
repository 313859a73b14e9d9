//! Symmetric linear operators.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, CsrMatrix, Vector};

/// Action of a square matrix on a vector. Implementations must be reentrant.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = K x`. Callers guarantee `x.len() == y.len() == self.dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y).expect("operator dimensions checked by caller");
    }
}

type ApplyFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
enum Repr {
    Assembled(CsrMatrix),
    /// `[[A, B^T], [B, -C]]` with the `u` unknowns first.
    Blocks {
        a: CsrMatrix,
        b: CsrMatrix,
        c: Option<CsrMatrix>,
    },
    MatrixFree(Arc<ApplyFn>),
}

/// Symmetric saddle-point operator `K`.
#[derive(Clone)]
pub struct SaddleOperator {
    n: usize,
    repr: Repr,
}

impl fmt::Debug for SaddleOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Assembled(m) => format!("assembled, nnz = {}", m.nnz()),
            Repr::Blocks { a, b, c } => format!(
                "blocks, m = {}, p = {}, C = {}",
                a.nrows(),
                b.nrows(),
                if c.is_some() { "explicit" } else { "zero" }
            ),
            Repr::MatrixFree(_) => "matrix-free".to_string(),
        };
        write!(f, "SaddleOperator {{ n: {}, {kind} }}", self.n)
    }
}

fn symmetry_tol(m: &CsrMatrix) -> f64 {
    1e-12 * m.norm_inf().max(f64::MIN_POSITIVE)
}

impl SaddleOperator {
    /// Wraps an assembled matrix after checking it is square and symmetric.
    pub fn from_matrix(k: CsrMatrix) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::InvalidInput(format!(
                "operator must be square, got {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let defect = k.symmetry_defect();
        if defect > symmetry_tol(&k) {
            return Err(Error::InvalidInput(format!(
                "operator is not symmetric (max |k_ij - k_ji| = {defect:e})"
            )));
        }
        Ok(SaddleOperator {
            n: k.nrows(),
            repr: Repr::Assembled(k),
        })
    }

    /// Builds `[[A, B^T], [B, -C]]`. `A` is `m x m`, `B` is `p x m` and `C`
    /// (absent means zero) is `p x p`; `A` and `C` must be symmetric.
    pub fn from_blocks(a: CsrMatrix, b: CsrMatrix, c: Option<CsrMatrix>) -> Result<Self> {
        let m = a.nrows();
        let p = b.nrows();
        check_dim("A columns", m, a.ncols())?;
        check_dim("B columns", m, b.ncols())?;
        if a.symmetry_defect() > symmetry_tol(&a) {
            return Err(Error::InvalidInput("block A is not symmetric".into()));
        }
        if let Some(c) = &c {
            check_dim("C rows", p, c.nrows())?;
            check_dim("C columns", p, c.ncols())?;
            if c.symmetry_defect() > symmetry_tol(c) {
                return Err(Error::InvalidInput("block C is not symmetric".into()));
            }
        }
        Ok(SaddleOperator {
            n: m + p,
            repr: Repr::Blocks { a, b, c },
        })
    }

    /// Matrix-free operator. Symmetry is the caller's responsibility; see
    /// [`sampled_symmetry_defect`].
    pub fn from_fn<F>(n: usize, apply: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        SaddleOperator {
            n,
            repr: Repr::MatrixFree(Arc::new(apply)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(A, B, C)` when the operator was built from blocks.
    pub fn blocks(&self) -> Option<(&CsrMatrix, &CsrMatrix, Option<&CsrMatrix>)> {
        match &self.repr {
            Repr::Blocks { a, b, c } => Some((a, b, c.as_ref())),
            _ => None,
        }
    }

    /// Assembled matrix, unless the operator is matrix-free.
    pub fn to_matrix(&self) -> Option<CsrMatrix> {
        match &self.repr {
            Repr::Assembled(k) => Some(k.clone()),
            Repr::Blocks { a, b, c } => {
                let m = a.nrows();
                let mut t: Vec<(usize, usize, f64)> = a.triplets().collect();
                for (i, j, v) in b.triplets() {
                    t.push((m + i, j, v));
                    t.push((j, m + i, v));
                }
                if let Some(c) = c {
                    t.extend(c.triplets().map(|(i, j, v)| (m + i, m + j, -v)));
                }
                Some(CsrMatrix::from_triplets(self.n, self.n, t).expect("valid block layout"))
            }
            Repr::MatrixFree(_) => None,
        }
    }

    /// `K v`
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        check_dim("operator input", self.n, v.len())?;
        let mut out = vec![0.0; self.n];
        self.apply_into(v, &mut out);
        Vector::new(out)
    }
}

impl LinearOperator for SaddleOperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        match &self.repr {
            Repr::Assembled(k) => k.apply_into(x, y),
            Repr::Blocks { a, b, c } => {
                let m = a.nrows();
                let (xu, xp) = x.split_at(m);
                let (yu, yp) = y.split_at_mut(m);
                a.mul_vec_into(xu, yu).expect("checked");
                b.mul_transpose_acc(1.0, xp, yu).expect("checked");
                b.mul_vec_into(xu, yp).expect("checked");
                if let Some(c) = c {
                    for (i, yi) in yp.iter_mut().enumerate() {
                        let (cols, vals) = c.row(i);
                        let cx: f64 = cols.iter().zip(vals).map(|(&j, v)| v * xp[j]).sum();
                        *yi -= cx;
                    }
                }
            }
            Repr::MatrixFree(f) => f(x, y),
        }
    }
}

/// Largest relative symmetry defect `|<Kx, y> - <x, Ky>| / (|x| |y| |K|_est)`
/// over `draws` Gaussian pairs; `|K|_est` is the largest observed `|Kx|/|x|`.
pub fn sampled_symmetry_defect<K: LinearOperator + ?Sized>(op: &K, draws: usize, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kx = vec![0.0; n];
    let mut ky = vec![0.0; n];
    let mut pairs = Vec::with_capacity(draws);
    let mut norm_est: f64 = 0.0;
    for _ in 0..draws {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        op.apply_into(&x, &mut kx);
        op.apply_into(&y, &mut ky);
        let nx = dot(&x, &x).sqrt();
        let ny = dot(&y, &y).sqrt();
        norm_est = norm_est.max(dot(&kx, &kx).sqrt() / nx).max(dot(&ky, &ky).sqrt() / ny);
        pairs.push(((dot(&kx, &y) - dot(&x, &ky)).abs(), nx * ny));
    }
    if norm_est == 0.0 {
        return 0.0;
    }
    pairs
        .into_iter()
        .map(|(d, scale)| d / (scale * norm_est))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_blocks() -> SaddleOperator {
        let a = CsrMatrix::from_diagonal(&[2.0]);
        let b = CsrMatrix::from_triplets(1, 1, vec![(0, 0, 1.0)]).unwrap();
        let c = CsrMatrix::from_diagonal(&[0.0]);
        SaddleOperator::from_blocks(a, b, Some(c)).unwrap()
    }

    #[test]
    fn identity_apply() {
        let k = SaddleOperator::from_matrix(CsrMatrix::identity(2)).unwrap();
        let y = k.apply(&Vector::new(vec![3.0, 4.0]).unwrap()).unwrap();
        assert_eq!(y.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn two_by_two_hand_evaluation() {
        let k = scalar_blocks();
        let y = k.apply(&Vector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(y.as_slice(), &[3.0, 1.0]);
    }

    #[test]
    fn c_block_enters_with_minus_sign() {
        let a = CsrMatrix::from_diagonal(&[1.0]);
        let b = CsrMatrix::zeros(1, 1);
        let c = CsrMatrix::from_diagonal(&[5.0]);
        let k = SaddleOperator::from_blocks(a, b, Some(c)).unwrap();
        let y = k.apply(&Vector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(y.as_slice(), &[1.0, -5.0]);
        let dense = k.to_matrix().unwrap().to_dense();
        assert_eq!(dense, vec![vec![1.0, 0.0], vec![0.0, -5.0]]);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let k = scalar_blocks();
        let err = k.apply(&Vector::new(vec![1.0; 3]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn rejects_nonsymmetric_matrix() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0)]).unwrap();
        assert!(SaddleOperator::from_matrix(m).is_err());
        let rect = CsrMatrix::zeros(2, 3);
        assert!(SaddleOperator::from_matrix(rect).is_err());
    }

    #[test]
    fn sampler_flags_nonsymmetric_matrix_free_operator() {
        let skew = SaddleOperator::from_fn(2, |x, y| {
            y[0] = x[1];
            y[1] = -x[0];
        });
        assert!(sampled_symmetry_defect(&skew, 10, 1) > 0.1);
        assert!(sampled_symmetry_defect(&scalar_blocks(), 10, 1) < 1e-15);
    }
}
