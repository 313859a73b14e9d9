//! A stencil operator given as a closure, driven one iteration at a time.
//!
//! The system is a 1D Poisson problem `A u + Bᵀ p = f`, `B u = 0` where `B`
//! ties together every `stride`-th unknown.

use blockres::operator::sampled_symmetry_defect;
use blockres::{BlockDiagPreconditioner, BlockPartition, CsrMatrix, SaddleOperator, SolverOptions, SolverState, Vector};

fn main() -> blockres::Result<()> {
    let (nu, stride) = (200, 20);
    let np = nu / stride;
    let op = SaddleOperator::from_fn(nu + np, move |x, y| {
        let (u, p) = x.split_at(nu);
        let (yu, yp) = y.split_at_mut(nu);
        for i in 0..nu {
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            let right = if i + 1 < nu { u[i + 1] } else { 0.0 };
            yu[i] = 2.0 * u[i] - left - right;
        }
        for (k, ypk) in yp.iter_mut().enumerate() {
            *ypk = u[k * stride];
            yu[k * stride] += p[k];
        }
    });
    println!("sampled symmetry defect: {:.1e}", sampled_symmetry_defect(&op, 4, 1));

    let part = BlockPartition::contiguous([("u", nu), ("p", np)])?;
    let laplace = CsrMatrix::from_triplets(
        nu,
        nu,
        (0..nu)
            .flat_map(|i| {
                let mut t = vec![(i, i, 2.0)];
                if i + 1 < nu {
                    t.extend([(i, i + 1, -1.0), (i + 1, i, -1.0)]);
                }
                t
            })
            .collect::<Vec<_>>(),
    )?;
    let pre = BlockDiagPreconditioner::new(&part, &[laplace, CsrMatrix::identity(np)])?;
    let f = Vector::new((0..nu + np).map(|i| if i < nu { 1.0 / nu as f64 } else { 0.0 }).collect())?;

    let mut state = SolverState::new(&op, &pre, &part, &f, None, SolverOptions::default())?;
    while !state.is_terminated() {
        state.step()?;
        let blocks = state.block_residual_norms().unwrap();
        println!(
            "j = {:>3}  |r| = {:.3e}  |r_u| = {:.3e}  |r_p| = {:.3e}",
            state.iteration(),
            state.residual_norm(),
            blocks[0],
            blocks[1]
        );
    }
    println!("{}", state.termination().unwrap());
    Ok(())
}
