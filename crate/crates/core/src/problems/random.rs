use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

use super::{identity_blocks, GeneratedProblem, ProblemInfo};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Vector};
use crate::operator::SaddleOperator;
use crate::partition::BlockPartition;

/// Random data shared by both generators.
///
/// Stream: `ChaCha8Rng::seed_from_u64(seed)`. Normals come from the ziggurat
/// sampler of `rand_distr::StandardNormal`. Draw order is `B` in column-major
/// order (`m x n`), then the `len_b` entries of `b`, then the `n` diagonal
/// entries of `H` from the open interval `(0, 1)`.
struct RandomData {
    b_mat: CsrMatrix,
    b_vec: Vec<f64>,
    h: Vec<f64>,
}

fn draw(n: usize, m: usize, len_b: usize, seed: u64) -> RandomData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dense = vec![0.0; m * n];
    for col in 0..n {
        for row in 0..m {
            dense[row * n + col] = rng.sample(StandardNormal);
        }
    }
    let b_vec: Vec<f64> = (0..len_b).map(|_| rng.sample(StandardNormal)).collect();
    let h: Vec<f64> = (0..n).map(|_| rng.sample(Open01)).collect();
    let b_mat = CsrMatrix::from_triplets(
        m,
        n,
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, dense[i * n + j])),
    )
    .expect("dimensions match");
    RandomData { b_mat, b_vec, h }
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput(format!("need n, m >= 1 (got n = {n}, m = {m})")));
    }
    if m >= n {
        return Err(Error::InvalidInput(format!(
            "B must be wide with full row rank: need m < n (got n = {n}, m = {m})"
        )));
    }
    Ok(())
}

fn assemble(name: &str, n: usize, m: usize, seed: u64, data: RandomData, rhs: Vec<f64>) -> GeneratedProblem {
    let partition = BlockPartition::contiguous([("u", n), ("p", m)]).expect("non-empty blocks");
    let h_mat = CsrMatrix::from_diagonal(&data.h);
    let operator = SaddleOperator::from_blocks(h_mat.clone(), data.b_mat, None).expect("consistent blocks");
    let mut preconditioners = BTreeMap::new();
    preconditioners.insert("P1".to_string(), identity_blocks(&partition));
    preconditioners.insert("P2".to_string(), vec![h_mat, CsrMatrix::identity(m)]);
    GeneratedProblem {
        info: ProblemInfo {
            generator: name.to_string(),
            params: BTreeMap::from([("n".to_string(), n as f64), ("m".to_string(), m as f64)]),
            seed: Some(seed),
        },
        operator,
        rhs: Vector::new(rhs).expect("finite draws"),
        partition,
        preconditioners,
    }
}

/// `[[H, B^T], [B, 0]] (u, p) = (0, b)` with `B` an `m x n` Gaussian matrix,
/// `b` Gaussian and `H` a diagonal with uniform `(0, 1)` entries.
pub fn least_norm(n: usize, m: usize, seed: u64) -> Result<GeneratedProblem> {
    check_sizes(n, m)?;
    let data = draw(n, m, m, seed);
    let mut rhs = vec![0.0; n];
    rhs.extend_from_slice(&data.b_vec);
    Ok(assemble("least-norm", n, m, seed, data, rhs))
}

/// `[[H, B^T], [B, 0]] (u, p) = (b, 0)` with `b` of length `n`.
pub fn least_squares(n: usize, m: usize, seed: u64) -> Result<GeneratedProblem> {
    check_sizes(n, m)?;
    let data = draw(n, m, n, seed);
    let mut rhs = data.b_vec.clone();
    rhs.extend(std::iter::repeat_n(0.0, m));
    Ok(assemble("least-squares", n, m, seed, data, rhs))
}
