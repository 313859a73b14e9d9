//! Keeps every iterate, recomputes `|f - K x_j|` per block from scratch and
//! compares it with the values the solver produced on the fly.

use blockres::problems::least_squares;
use blockres::verify::{compare_histories, oracle_rows};
use blockres::{solve, SolverOptions};

fn main() -> blockres::Result<()> {
    let problem = least_squares(100, 30, 7)?;
    let pre = problem.preconditioner("P2")?;
    let opts = SolverOptions {
        store_iterates: true,
        ..Default::default()
    };
    let out = solve(&problem.operator, &pre, &problem.partition, &problem.rhs, None, &opts)?;
    let iterates = out.history.iterates.as_ref().unwrap();
    let explicit = oracle_rows(&problem.operator, &pre, &problem.partition, &problem.rhs, iterates)?;
    let report = compare_histories(&out.history, &explicit, 1e-8)?;

    for row in report.rows.iter().step_by(8) {
        println!(
            "j = {:>3}  progressive {:.6e} {:.6e}  explicit {:.6e} {:.6e}  dev/eta0 {:.1e}",
            row.iter, row.progressive[0], row.progressive[1], row.explicit[0], row.explicit[1], row.rel_deviation
        );
    }
    println!(
        "max deviation {:.2e} eta0 at j = {} -> {}",
        report.max_rel_deviation,
        report.worst_iter,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(())
}
