//! Command-line front end.
//!
//! ```text
//! blockres gen <least-norm|least-squares|stokes-mac> [params] --out DIR
//! blockres solve --matrix K.mtx --rhs f.mtx --precond Pu.mtx,Pp.mtx \
//!                --partition part.txt [--tol T] [--maxit N] [--block-tol e1,e2] [--verify] --out DIR
//! blockres verify --run-dir DIR
//! ```
//!
//! Exit codes: 0 converged (and verified, if asked), 2 iteration cap reached,
//! 3 breakdown or indefinite preconditioner, 4 input error, 5 verification
//! failed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::Vector;
use crate::operator::SaddleOperator;
use crate::partition::BlockPartition;
use crate::precond::BlockDiagPreconditioner;
use crate::problems::{self, GeneratedProblem, StokesParams};
use crate::solver::{solve, SolveOutcome, SolverOptions, Termination};
use crate::verify::{compare_histories, oracle_rows, OracleReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_BREAKDOWN: i32 = 3;
pub const EXIT_INPUT: i32 = 4;
pub const EXIT_VERIFY_FAILED: i32 = 5;

/// Default oracle tolerance, relative to `eta_0`.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

pub const CSV_FILE: &str = "convergence.csv";
pub const SOLUTION_FILE: &str = "solution.mtx";
pub const MANIFEST_FILE: &str = "run.json";
pub const REPORT_FILE: &str = "oracle_report.json";

#[derive(Debug, Parser)]
#[command(name = "blockres", version, about = "MINRES with per-block residual monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a test problem as Matrix Market files.
    Gen {
        #[command(subcommand)]
        problem: GenProblem,
    },
    /// Solve a system read from files.
    Solve(SolveArgs),
    /// Re-run a recorded solve and check its CSV against explicit residuals.
    Verify {
        #[arg(long)]
        run_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
enum GenProblem {
    LeastNorm(RandomArgs),
    LeastSquares(RandomArgs),
    StokesMac {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value_t = 1e-3)]
        viscosity: f64,
        /// Accepted for interface uniformity; the grid problem is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    /// One SPD Matrix Market file per partition block, in partition order.
    #[arg(long, value_delimiter = ',', required = true)]
    precond: Vec<PathBuf>,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    maxit: usize,
    /// Absolute per-block tolerances, one per partition block.
    #[arg(long, value_delimiter = ',')]
    block_tol: Option<Vec<f64>>,
    /// Check the progressive block norms against explicit residuals.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    verify_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Everything needed to repeat a solve, stored next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub matrix: PathBuf,
    pub rhs: PathBuf,
    pub precond: Vec<PathBuf>,
    pub partition: PathBuf,
    pub options: SolverOptions,
    pub termination: Termination,
    pub iterations: usize,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let result = match cli.command {
        Command::Gen { problem } => run_gen(problem),
        Command::Solve(args) => run_solve(args),
        Command::Verify { run_dir, tol } => run_verify(&run_dir, tol),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    })
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::IndefinitePreconditioner { .. } | Error::Breakdown(_) | Error::DegenerateRotation => EXIT_BREAKDOWN,
        _ => EXIT_INPUT,
    }
}

fn termination_code(t: Termination) -> i32 {
    match t {
        Termination::Converged | Termination::PerBlockConverged => EXIT_OK,
        Termination::MaxIterations => EXIT_MAX_ITER,
        Termination::Breakdown => EXIT_BREAKDOWN,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes `K.mtx`, `rhs.mtx`, `partition.txt`, one `<name>_<label>.mtx` per
/// preconditioner block and `problem.json`.
pub fn export_problem(problem: &GeneratedProblem, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let k = problem
        .operator
        .to_matrix()
        .ok_or_else(|| Error::InvalidInput("matrix-free problems cannot be exported".into()))?;
    io::write_matrix_market(dir.join("K.mtx"), &k, true)?;
    io::write_vector(dir.join("rhs.mtx"), &problem.rhs)?;
    io::write_partition(dir.join("partition.txt"), &problem.partition)?;
    for (name, blocks) in &problem.preconditioners {
        for (label, block) in problem.partition.labels().iter().zip(blocks) {
            io::write_matrix_market(dir.join(format!("{name}_{label}.mtx")), block, true)?;
        }
    }
    write_json(&dir.join("problem.json"), &problem.info)
}

fn run_gen(problem: GenProblem) -> Result<i32> {
    let (generated, out) = match problem {
        GenProblem::LeastNorm(a) => (problems::least_norm(a.n, a.m, a.seed)?, a.out),
        GenProblem::LeastSquares(a) => (problems::least_squares(a.n, a.m, a.seed)?, a.out),
        GenProblem::StokesMac {
            nx,
            ny,
            viscosity,
            seed: _,
            out,
        } => {
            let params = StokesParams {
                viscosity,
                ..StokesParams::new(nx, ny)
            };
            (problems::stokes_mac(params)?, out)
        }
    };
    export_problem(&generated, &out)?;
    println!(
        "wrote {} problem (n = {}) to {}",
        generated.info.generator,
        generated.dim(),
        out.display()
    );
    Ok(EXIT_OK)
}

struct LoadedSystem {
    operator: SaddleOperator,
    rhs: Vector,
    partition: BlockPartition,
    precond: BlockDiagPreconditioner,
}

fn load_system(matrix: &Path, rhs: &Path, precond: &[PathBuf], partition: &Path) -> Result<LoadedSystem> {
    let k = io::read_matrix_market(matrix)?;
    let operator = SaddleOperator::from_matrix(k)?;
    let rhs = Vector::new(io::read_vector(rhs)?)?;
    let partition = io::read_partition(partition)?;
    if partition.dim() != operator.n() || rhs.len() != operator.n() {
        return Err(Error::InvalidInput(format!(
            "size mismatch: matrix n = {}, rhs = {}, partition covers {}",
            operator.n(),
            rhs.len(),
            partition.dim()
        )));
    }
    if precond.len() != partition.num_blocks() {
        return Err(Error::InvalidInput(format!(
            "{} preconditioner files for {} partition blocks",
            precond.len(),
            partition.num_blocks()
        )));
    }
    let blocks = precond
        .iter()
        .map(io::read_matrix_market)
        .collect::<Result<Vec<_>>>()?;
    let precond = BlockDiagPreconditioner::new(&partition, &blocks)?;
    Ok(LoadedSystem {
        operator,
        rhs,
        partition,
        precond,
    })
}

fn absolute(p: &Path) -> PathBuf {
    fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}

fn oracle_check(sys: &LoadedSystem, outcome: &SolveOutcome, history_csv: &crate::solver::ConvergenceHistory, tol: f64) -> Result<OracleReport> {
    let iterates = outcome
        .history
        .iterates
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("solve did not store iterates".into()))?;
    let oracle = oracle_rows(&sys.operator, &sys.precond, &sys.partition, &sys.rhs, iterates)?;
    compare_histories(history_csv, &oracle, tol)
}

fn print_report(report: &OracleReport) {
    println!(
        "oracle: max deviation {:.3e} * eta0 at iteration {} (tolerance {:.1e}): {}",
        report.max_rel_deviation,
        report.worst_iter,
        report.tolerance,
        if report.pass { "pass" } else { "FAIL" }
    );
}

fn run_solve(args: SolveArgs) -> Result<i32> {
    let sys = load_system(&args.matrix, &args.rhs, &args.precond, &args.partition)?;
    let options = SolverOptions {
        rel_tol: args.tol,
        max_iter: args.maxit,
        per_block_tol: args.block_tol.clone(),
        monitor: true,
        store_iterates: args.verify,
        ..Default::default()
    };
    let outcome = solve(&sys.operator, &sys.precond, &sys.partition, &sys.rhs, None, &options)?;
    let termination = outcome.termination();

    create_dir(&args.out)?;
    io::write_convergence_csv(&outcome.history, args.out.join(CSV_FILE))?;
    io::write_vector(args.out.join(SOLUTION_FILE), &outcome.x)?;
    let manifest = RunManifest {
        matrix: absolute(&args.matrix),
        rhs: absolute(&args.rhs),
        precond: args.precond.iter().map(|p| absolute(p)).collect(),
        partition: absolute(&args.partition),
        options: SolverOptions {
            store_iterates: false,
            ..options
        },
        termination,
        iterations: outcome.history.iterations(),
    };
    write_json(&args.out.join(MANIFEST_FILE), &manifest)?;

    let last = outcome.history.rows.last().expect("at least one row");
    let blocks: Vec<String> = outcome
        .history
        .labels
        .iter()
        .zip(&last.eta_blocks)
        .map(|(l, e)| format!("|r_{l}| = {e:.3e}"))
        .collect();
    println!(
        "{termination} after {} iterations: |r| / |r0| = {:.3e}, {}",
        outcome.history.iterations(),
        last.eta_rel,
        blocks.join(", ")
    );

    if args.verify {
        let report = oracle_check(&sys, &outcome, &outcome.history, args.verify_tol)?;
        write_json(&args.out.join(REPORT_FILE), &report)?;
        print_report(&report);
        if !report.pass {
            return Ok(EXIT_VERIFY_FAILED);
        }
    }
    Ok(termination_code(termination))
}

fn run_verify(run_dir: &Path, tol: f64) -> Result<i32> {
    let manifest_path = run_dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", manifest_path.display())))?;
    let recorded = io::read_convergence_csv(run_dir.join(CSV_FILE))?;

    let sys = load_system(&manifest.matrix, &manifest.rhs, &manifest.precond, &manifest.partition)?;
    let options = SolverOptions {
        store_iterates: true,
        ..manifest.options.clone()
    };
    let outcome = solve(&sys.operator, &sys.precond, &sys.partition, &sys.rhs, None, &options)?;
    if recorded.labels != sys.partition.labels() {
        return Err(Error::InvalidInput(format!(
            "CSV block labels {:?} do not match the partition {:?}",
            recorded.labels,
            sys.partition.labels()
        )));
    }
    let report = oracle_check(&sys, &outcome, &recorded, tol)?;
    write_json(&run_dir.join(REPORT_FILE), &report)?;
    print_report(&report);
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
