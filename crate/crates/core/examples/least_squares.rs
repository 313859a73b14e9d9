//! Random least-squares problem `min |Bᵀp - b|_{H⁻¹}`: with `P2` the
//! constraint residual carries most of the total.

use blockres::problems::least_squares;
use blockres::{solve, SolverOptions};

fn main() -> blockres::Result<()> {
    let problem = least_squares(100, 30, 42)?;
    for name in ["P1", "P2"] {
        let pre = problem.preconditioner(name)?;
        let out = solve(&problem.operator, &pre, &problem.partition, &problem.rhs, None, &SolverOptions::default())?;
        let last = out.history.rows.last().unwrap();
        println!(
            "{name}: {:>3} iterations, final |r_u| = {:.2e}, |r_p| = {:.2e}, average mu_p = {:.3}",
            out.history.iterations(),
            last.eta_blocks[0],
            last.eta_blocks[1],
            out.history.average_fraction(1).unwrap()
        );
    }
    Ok(())
}
