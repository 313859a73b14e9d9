//! Random least-norm problem `min |u|_H s.t. Bu = b` solved with the two
//! block preconditioners; prints how the residual splits between the blocks.

use blockres::problems::least_norm;
use blockres::{solve, SolverOptions};

fn main() -> blockres::Result<()> {
    let problem = least_norm(100, 30, 42)?;
    for name in ["P1", "P2"] {
        let pre = problem.preconditioner(name)?;
        let out = solve(&problem.operator, &pre, &problem.partition, &problem.rhs, None, &SolverOptions::default())?;
        let h = &out.history;
        println!("{name}: {} after {} iterations", out.termination(), h.iterations());
        println!("{:>5} {:>12} {:>12} {:>12} {:>7}", "j", "|r|", "|r_u|", "|r_p|", "mu_p");
        for row in h.rows.iter().step_by(10) {
            println!(
                "{:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>7.3}",
                row.iter, row.eta, row.eta_blocks[0], row.eta_blocks[1], row.mu[1]
            );
        }
        println!("average mu_p = {:.3}\n", h.average_fraction(1).unwrap());
    }
    Ok(())
}
