//! Stops as soon as each block residual is below its own absolute
//! tolerance instead of waiting for the total relative reduction.

use blockres::problems::least_norm;
use blockres::{solve, SolverOptions};

fn main() -> blockres::Result<()> {
    let problem = least_norm(100, 30, 42)?;
    let pre = problem.preconditioner("P1")?;

    let total = solve(&problem.operator, &pre, &problem.partition, &problem.rhs, None, &SolverOptions::default())?;
    let eta0 = total.history.eta0();

    let opts = SolverOptions {
        rel_tol: 1e-12,
        per_block_tol: Some(vec![1e-2 * eta0, 1e-5 * eta0]),
        ..Default::default()
    };
    let blockwise = solve(&problem.operator, &pre, &problem.partition, &problem.rhs, None, &opts)?;

    for (name, out) in [("rel_tol 1e-6", &total), ("per-block", &blockwise)] {
        let last = out.history.rows.last().unwrap();
        println!(
            "{name:<13} {:<20} j = {:>3}  |r_u|/eta0 = {:.1e}  |r_p|/eta0 = {:.1e}",
            out.termination().to_string(),
            out.history.iterations(),
            last.eta_blocks[0] / eta0,
            last.eta_blocks[1] / eta0
        );
    }
    Ok(())
}
