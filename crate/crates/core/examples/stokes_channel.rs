//! Channel flow on a staggered grid at two resolutions. The iteration count
//! barely moves under refinement, and the pressure-block (mass conservation)
//! residual lags behind the momentum residual.

use std::time::Instant;

use blockres::problems::{stokes_mac, StokesParams};
use blockres::{solve, SolverOptions};

fn main() -> blockres::Result<()> {
    for (nx, ny) in [(16, 8), (32, 16), (64, 32)] {
        let problem = stokes_mac(StokesParams::new(nx, ny))?;
        let pre = problem.preconditioner("P2")?;
        let start = Instant::now();
        let out = solve(&problem.operator, &pre, &problem.partition, &problem.rhs, None, &SolverOptions::default())?;
        let h = &out.history;
        let p = h.block_index("p").unwrap();
        let lag = h.rows.iter().filter(|r| r.mu[p] > 0.5).count();
        println!(
            "{nx:>3}x{ny:<3} n = {:>6}  {:>3} iterations ({})  avg mu_p = {:.3}  mu_p > 0.5 on {lag}/{} rows  {:.1?}",
            problem.dim(),
            h.iterations(),
            out.termination(),
            h.average_fraction(p).unwrap(),
            h.rows.len(),
            start.elapsed()
        );
    }
    Ok(())
}
