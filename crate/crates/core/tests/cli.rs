use std::path::Path;
use std::process::Command;

use blockres::cli::{self, RunManifest};
use blockres::io::{format_matrix_market, parse_matrix_market, read_convergence_csv, read_matrix_market};
use blockres::problems::least_norm;

fn blockres(args: &[&str]) -> i32 {
    let mut argv = vec!["blockres"];
    argv.extend_from_slice(args);
    cli::run(argv)
}

fn gen_least_norm(dir: &Path) {
    let out = dir.to_str().unwrap();
    assert_eq!(blockres(&["gen", "least-norm", "--n", "100", "--m", "30", "--seed", "42", "--out", out]), 0);
}

fn solve_args<'a>(prob: &'a str, out: &'a str, pc: &'a str) -> Vec<String> {
    [
        "solve",
        "--matrix",
        &format!("{prob}/K.mtx"),
        "--rhs",
        &format!("{prob}/rhs.mtx"),
        "--precond",
        &format!("{prob}/{pc}_u.mtx,{prob}/{pc}_p.mtx"),
        "--partition",
        &format!("{prob}/partition.txt"),
        "--out",
        out,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn run_strings(args: &[String]) -> i32 {
    blockres(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn gen_then_verified_solve_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    gen_least_norm(&prob);
    for f in ["K.mtx", "rhs.mtx", "partition.txt", "P1_u.mtx", "P2_p.mtx", "problem.json"] {
        assert!(prob.join(f).exists(), "{f}");
    }
    for pc in ["P1", "P2"] {
        let out = tmp.path().join(format!("run_{pc}"));
        let mut args = solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), pc);
        args.push("--verify".into());
        assert_eq!(run_strings(&args), 0);
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join(cli::REPORT_FILE)).unwrap()).unwrap();
        assert_eq!(report["pass"], true);
        assert!(report["max_rel_deviation"].as_f64().unwrap() <= 1e-8);

        let history = read_convergence_csv(out.join(cli::CSV_FILE)).unwrap();
        for row in &history.rows {
            let sum: f64 = row.eta_blocks.iter().map(|e| e * e).sum();
            assert!((row.eta * row.eta - sum).abs() <= 1e-10 * row.eta * row.eta);
        }

        assert_eq!(blockres(&["verify", "--run-dir", out.to_str().unwrap()]), 0);
    }
}

#[test]
fn maxit_one_exits_two_and_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    gen_least_norm(&prob);
    let out = tmp.path().join("run");
    let mut args = solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P1");
    args.extend(["--maxit".into(), "1".into()]);
    assert_eq!(run_strings(&args), 2);
    let history = read_convergence_csv(out.join(cli::CSV_FILE)).unwrap();
    assert_eq!(history.rows.len(), 2);
    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(out.join(cli::MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.iterations, 1);
}

#[test]
fn input_errors_exit_four() {
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    gen_least_norm(&prob);
    let out = tmp.path().join("run");
    let mut args = solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P1");
    args[2] = tmp.path().join("missing.mtx").to_str().unwrap().to_string();
    assert_eq!(run_strings(&args), 4);

    assert_eq!(blockres(&["gen", "least-norm", "--n", "3", "--m", "5", "--out", out.to_str().unwrap()]), 4);
    assert_eq!(blockres(&["solve"]), 4);
    assert_eq!(blockres(&["--help"]), 0);

    std::fs::write(prob.join("partition.txt"), "u 0:100\np 99:130\n").unwrap();
    let args = solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P1");
    assert_eq!(run_strings(&args), 4);
}

#[test]
fn indefinite_preconditioner_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    gen_least_norm(&prob);
    let neg = "%%MatrixMarket matrix coordinate real symmetric\n30 30 30\n"
        .to_string()
        + &(1..=30).map(|i| format!("{i} {i} -1.0\n")).collect::<String>();
    std::fs::write(prob.join("P1_p.mtx"), neg).unwrap();
    let out = tmp.path().join("run");
    let args = solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P1");
    assert_eq!(run_strings(&args), 3);
}

#[test]
fn block_tolerance_stops_early() {
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    gen_least_norm(&prob);
    let out = tmp.path().join("run");
    let mut args = solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P1");
    args.extend(["--block-tol".into(), "1e-1,1e-1".into(), "--tol".into(), "1e-12".into()]);
    assert_eq!(run_strings(&args), 0);
    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(out.join(cli::MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.termination, blockres::Termination::PerBlockConverged);
}

#[test]
fn csv_output_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    gen_least_norm(&prob);
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        assert_eq!(run_strings(&solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P2")), 0);
        csvs.push(std::fs::read(out.join(cli::CSV_FILE)).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);

    let again = tmp.path().join("prob2");
    gen_least_norm(&again);
    assert_eq!(std::fs::read(prob.join("K.mtx")).unwrap(), std::fs::read(again.join("K.mtx")).unwrap());
}

#[test]
fn matrix_market_round_trip_is_bitwise() {
    let k = least_norm(100, 30, 42).unwrap().operator.to_matrix().unwrap();
    for symmetric in [true, false] {
        let back = parse_matrix_market(&format_matrix_market(&k, symmetric), "mem").unwrap();
        let bits = |m: &blockres::CsrMatrix| m.triplets().map(|(i, j, v)| (i, j, v.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&k), bits(&back));
    }
}

#[test]
fn hand_written_matrix_market_files() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("k.mtx");
    std::fs::write(&path, "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2.0\n2 1 1.0\n").unwrap();
    let k = read_matrix_market(&path).unwrap();
    assert_eq!(k.to_dense(), vec![vec![2.0, 1.0], vec![1.0, 0.0]]);

    let z = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n3 3 0\n", "z").unwrap();
    assert_eq!((z.nrows(), z.nnz()), (3, 0));

    let err = parse_matrix_market("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n", "c");
    assert!(matches!(err, Err(blockres::Error::UnsupportedFormat(_))));
    let err = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1.0\n", "bad");
    assert!(matches!(err, Err(blockres::Error::Parse { line: 3, .. })), "{err:?}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_blockres");
    let tmp = tempfile::tempdir().unwrap();
    let prob = tmp.path().join("prob");
    let status = Command::new(bin)
        .args(["gen", "stokes-mac", "--nx", "8", "--ny", "4", "--out", prob.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let out = tmp.path().join("run");
    let status = Command::new(bin)
        .args(solve_args(prob.to_str().unwrap(), out.to_str().unwrap(), "P2"))
        .arg("--verify")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin).args(["verify", "--run-dir", "/nonexistent/run"]).status().unwrap();
    assert_eq!(status.code(), Some(4));
}
