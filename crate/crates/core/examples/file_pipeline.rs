//! Round trip through files: export a generated problem as Matrix Market,
//! read it back, solve, and write the convergence history as CSV.

use blockres::io::{read_matrix_market, read_partition, read_vector, write_convergence_csv};
use blockres::problems::least_norm;
use blockres::{cli, solve, BlockDiagPreconditioner, SaddleOperator, SolverOptions, Vector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("blockres-file-pipeline");
    cli::export_problem(&least_norm(60, 20, 3)?, &dir)?;

    let op = SaddleOperator::from_matrix(read_matrix_market(dir.join("K.mtx"))?)?;
    let rhs = Vector::new(read_vector(dir.join("rhs.mtx"))?)?;
    let part = read_partition(dir.join("partition.txt"))?;
    let blocks = part
        .labels()
        .iter()
        .map(|l| read_matrix_market(dir.join(format!("P2_{l}.mtx"))))
        .collect::<blockres::Result<Vec<_>>>()?;
    let pre = BlockDiagPreconditioner::new(&part, &blocks)?;

    let out = solve(&op, &pre, &part, &rhs, None, &SolverOptions::default())?;
    let csv = dir.join("convergence.csv");
    write_convergence_csv(&out.history, &csv)?;
    println!("{} in {} iterations; history written to {}", out.termination(), out.history.iterations(), csv.display());
    for line in std::fs::read_to_string(&csv)?.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
