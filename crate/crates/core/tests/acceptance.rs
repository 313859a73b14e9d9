//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p blockres --test acceptance`.

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::time::{Duration, Instant};

use blockres::problems::{least_norm, least_squares, stokes_mac, GeneratedProblem, StokesParams};
use blockres::verify::{compare_histories, oracle_rows};
use blockres::{
    solve, BlockDiagPreconditioner, CsrMatrix, SaddleOperator, SolveOutcome, SolverOptions, SolverState,
    Termination, Vector,
};

struct CountingAlloc;

thread_local! {
    static TRACK_SIZE: Cell<usize> = const { Cell::new(0) };
    static LIVE: Cell<isize> = const { Cell::new(0) };
}

fn tracked(size: usize) -> bool {
    TRACK_SIZE.try_with(|t| t.get() != 0 && t.get() == size).unwrap_or(false)
}

fn bump(delta: isize) {
    let _ = LIVE.try_with(|l| l.set(l.get() + delta));
}

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        if tracked(layout.size()) {
            bump(1);
        }
        unsafe { System.alloc(layout) }
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        if tracked(layout.size()) {
            bump(1);
        }
        unsafe { System.alloc_zeroed(layout) }
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        if tracked(layout.size()) {
            bump(-1);
        }
        unsafe { System.dealloc(ptr, layout) }
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        if tracked(layout.size()) {
            bump(-1);
        }
        if tracked(new_size) {
            bump(1);
        }
        unsafe { System.realloc(ptr, layout, new_size) }
    }
}

#[global_allocator]
static GLOBAL: CountingAlloc = CountingAlloc;

struct Case {
    name: String,
    problem: GeneratedProblem,
    pre: BlockDiagPreconditioner,
}

fn case(name: &str, problem: GeneratedProblem, pc: &str) -> Case {
    let pre = problem.preconditioner(pc).unwrap();
    Case {
        name: format!("{name}/{pc}"),
        problem,
        pre,
    }
}

fn run(c: &Case, opts: &SolverOptions) -> SolveOutcome {
    let p = &c.problem;
    solve(&p.operator, &c.pre, &p.partition, &p.rhs, None, opts).unwrap()
}

fn oracle_opts() -> SolverOptions {
    SolverOptions {
        store_iterates: true,
        ..Default::default()
    }
}

fn random_suite(seed: u64) -> Vec<Case> {
    let mut out = Vec::new();
    for pc in ["P1", "P2"] {
        out.push(case(&format!("least-norm(seed {seed})"), least_norm(100, 30, seed).unwrap(), pc));
        out.push(case(&format!("least-squares(seed {seed})"), least_squares(100, 30, seed).unwrap(), pc));
    }
    out
}

fn suite() -> Vec<Case> {
    let mut out = random_suite(42);
    out.push(case("stokes-mac(8x4)", stokes_mac(StokesParams::new(8, 4)).unwrap(), "P2"));
    out.push(case("stokes-mac(16x8)", stokes_mac(StokesParams::new(16, 8)).unwrap(), "P2"));
    out
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn c1_oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for c in random_suite(42) {
        let out = run(&c, &oracle_opts());
        let p = &c.problem;
        let explicit = oracle_rows(&p.operator, &c.pre, &p.partition, &p.rhs, out.history.iterates.as_ref().unwrap())
            .unwrap();
        let report = compare_histories(&out.history, &explicit, 1e-8).unwrap();
        worst = worst.max(report.max_rel_deviation);
        if !report.pass || !out.converged() {
            failures.push(format!("{} (dev {:.2e} at j={})", c.name, report.max_rel_deviation, report.worst_iter));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(5);
    verdict(
        pass,
        format!("max dev {worst:.2e}·eta0 (tol 1e-8), {:.2?} (limit 5 s) {failures:?}", elapsed),
    )
}

fn c2_conservation(outs: &[(String, SolveOutcome)]) -> Verdict {
    let mut worst = 0.0f64;
    for (_, out) in outs {
        for row in &out.history.rows {
            let sp: f64 = row.psi.iter().sum();
            let sm: f64 = row.mu.iter().sum();
            worst = worst.max((sp - 1.0).abs()).max((sm - 1.0).abs());
        }
    }
    verdict(worst <= 1e-10, format!("max |sum - 1| = {worst:.2e} (tol 1e-10)"))
}

fn c3_norm_decomposition(outs: &[(String, SolveOutcome)]) -> Verdict {
    let mut worst = 0.0f64;
    for (_, out) in outs {
        for row in &out.history.rows {
            let sum: f64 = row.eta_blocks.iter().map(|e| e * e).sum();
            let total = row.eta * row.eta;
            if total > 0.0 {
                worst = worst.max((total - sum).abs() / total);
            }
        }
    }
    verdict(worst <= 1e-10, format!("max rel |eta^2 - sum eta_b^2| = {worst:.2e} (tol 1e-10)"))
}

fn c4_transparency(cases: &[Case]) -> Verdict {
    let mut mismatches = Vec::new();
    for c in cases {
        let on = run(c, &oracle_opts());
        let off = run(
            c,
            &SolverOptions {
                monitor: false,
                ..oracle_opts()
            },
        );
        let same_rows = on.history.rows.len() == off.history.rows.len()
            && on.history.rows.iter().zip(&off.history.rows).all(|(a, b)| {
                a.eta_signed.to_bits() == b.eta_signed.to_bits()
                    && match (a.recurrence, b.recurrence) {
                        (None, None) => true,
                        (Some(x), Some(y)) => {
                            x.delta.to_bits() == y.delta.to_bits()
                                && x.gamma_next.to_bits() == y.gamma_next.to_bits()
                                && x.c.to_bits() == y.c.to_bits()
                                && x.s.to_bits() == y.s.to_bits()
                        }
                        _ => false,
                    }
            });
        let bits = |v: &Vector| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        let same_iterates = on
            .history
            .iterates
            .as_ref()
            .unwrap()
            .iter()
            .zip(off.history.iterates.as_ref().unwrap())
            .all(|(a, b)| bits(a) == bits(b));
        if !(same_rows && same_iterates && bits(&on.x) == bits(&off.x)) {
            mismatches.push(c.name.clone());
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("{} problems, eta/delta/gamma/c/s/x^(j) bitwise equal; mismatches {mismatches:?}", cases.len()),
    )
}

fn c5_qualitative() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    for seed in [42, 7, 2024] {
        let avg = |p: GeneratedProblem, pc: &str| {
            let c = case("", p, pc);
            let out = run(&c, &SolverOptions::default());
            out.history.average_fraction(1).unwrap()
        };
        let ln1 = avg(least_norm(100, 30, seed).unwrap(), "P1");
        let ln2 = avg(least_norm(100, 30, seed).unwrap(), "P2");
        let ls1 = avg(least_squares(100, 30, seed).unwrap(), "P1");
        let ls2 = avg(least_squares(100, 30, seed).unwrap(), "P2");
        pass &= ln1 < 0.5 && ln2 > 0.9 && ls2 > ls1;
        lines.push(format!("seed {seed}: LN {ln1:.2}->{ln2:.2}, LS {ls1:.2}->{ls2:.2}"));
    }
    verdict(pass, format!("avg mu_p {}", lines.join("; ")))
}

fn c6_stokes_mesh_independence() -> Verdict {
    let start = Instant::now();
    let its: Vec<(usize, f64)> = [(16, 8), (32, 16)]
        .into_iter()
        .map(|(nx, ny)| {
            let c = case("", stokes_mac(StokesParams::new(nx, ny)).unwrap(), "P2");
            let out = run(&c, &SolverOptions::default());
            assert!(out.converged(), "stokes {nx}x{ny}: {}", out.termination());
            (out.history.iterations(), out.history.average_fraction(1).unwrap())
        })
        .collect();
    let elapsed = start.elapsed();
    let (a, b) = (its[0].0 as f64, its[1].0 as f64);
    let ratio = a.max(b) / a.min(b);
    verdict(
        ratio <= 1.5 && elapsed < Duration::from_secs(30),
        format!(
            "iterations 16x8: {}, 32x16: {} (ratio {ratio:.2}, limit 1.5), avg mu_p {:.2}/{:.2}, {:.2?}",
            its[0].0, its[1].0, its[0].1, its[1].1, elapsed
        ),
    )
}

fn c7_monotonicity(outs: &[(String, SolveOutcome)]) -> Verdict {
    let mut bad = Vec::new();
    for (name, out) in outs {
        for w in out.history.rows.windows(2) {
            if w[1].eta > w[0].eta * (1.0 + 1e-12) {
                bad.push(format!("{name} j={}", w[1].iter));
            }
        }
    }
    verdict(bad.is_empty(), format!("|eta_j| <= |eta_(j-1)|(1+1e-12) on {} runs {bad:?}", outs.len()))
}

/// Net live allocations of exactly `n` f64s while a state is built and
/// stepped a few times.
fn persistent_full_length(c: &Case, monitor: bool) -> (isize, usize) {
    let p = &c.problem;
    let n = p.dim();
    let opts = SolverOptions {
        monitor,
        ..Default::default()
    };
    LIVE.with(|l| l.set(0));
    TRACK_SIZE.with(|t| t.set(n * std::mem::size_of::<f64>()));
    let mut state = SolverState::new(&p.operator, &c.pre, &p.partition, &p.rhs, None, opts).unwrap();
    for _ in 0..5 {
        state.step().unwrap();
    }
    let live = LIVE.with(|l| l.get());
    TRACK_SIZE.with(|t| t.set(0));
    let reported = state.full_length_vectors();
    drop(state);
    (live, reported)
}

fn c8_storage_audit() -> Verdict {
    // Block sizes 100 and 30 differ from n = 130, so only full-length buffers are counted.
    let c = case("least-norm", least_norm(100, 30, 42).unwrap(), "P2");
    let (base, base_reported) = persistent_full_length(&c, false);
    let (mon, mon_reported) = persistent_full_length(&c, true);
    verdict(
        mon - base == 1 && base == base_reported as isize && mon == mon_reported as isize,
        format!("full-length vectors alive: baseline {base}, monitored {mon} (difference must be 1)"),
    )
}

fn c9_small_exact() -> Verdict {
    let k = SaddleOperator::from_blocks(
        CsrMatrix::from_diagonal(&[2.0]),
        CsrMatrix::from_triplets(1, 1, vec![(0, 0, 1.0)]).unwrap(),
        None,
    )
    .unwrap();
    let part = blockres::BlockPartition::contiguous([("u", 1), ("p", 1)]).unwrap();
    let pre = BlockDiagPreconditioner::identity(&part);
    let f = Vector::new(vec![1.0, 0.0]).unwrap();
    let opts = SolverOptions {
        rel_tol: 1e-12,
        ..Default::default()
    };
    let out = solve(&k, &pre, &part, &f, None, &opts).unwrap();
    let err = out.x[0].abs().max((out.x[1] - 1.0).abs());
    let eta = out.history.rows.last().unwrap().eta;
    verdict(
        out.history.iterations() <= 2 && err <= 1e-12 && eta <= 1e-12,
        format!("{} iterations, x = ({:e}, {}), |x - (0,1)| = {err:.1e}, |eta| = {eta:.1e}", out.history.iterations(), out.x[0], out.x[1]),
    )
}

fn c10_per_block_stopping() -> Verdict {
    let c = case("least-norm", least_norm(100, 30, 42).unwrap(), "P1");
    let p = &c.problem;
    let eta0 = run(&c, &SolverOptions::default()).history.eta0();
    let eps = vec![1e-2 * eta0, 1e-4 * eta0];
    let opts = SolverOptions {
        rel_tol: 1e-300,
        per_block_tol: Some(eps.clone()),
        store_iterates: true,
        ..Default::default()
    };
    let out = run(&c, &opts);
    let explicit = oracle_rows(&p.operator, &c.pre, &p.partition, &p.rhs, out.history.iterates.as_ref().unwrap())
        .unwrap();
    let slack = 1e-8 * eta0;
    let meets = |norms: &[f64], s: f64| norms.iter().zip(&eps).all(|(n, e)| *n <= e + s);
    let first_progressive = out.history.rows.iter().position(|r| meets(&r.eta_blocks, 0.0));
    let stop = out.history.iterations();
    let oracle_ok_at_stop = meets(&explicit[stop].per_block, slack);
    let oracle_not_before = explicit[..stop].iter().all(|b| !meets(&b.per_block, -slack));
    let pass = out.termination() == Termination::PerBlockConverged
        && first_progressive == Some(stop)
        && oracle_ok_at_stop
        && oracle_not_before;
    verdict(
        pass,
        format!(
            "stopped at j={stop} ({}), first j meeting eps = {:?}; oracle confirms: at stop {oracle_ok_at_stop}, none earlier {oracle_not_before}",
            out.termination(),
            first_progressive
        ),
    )
}

fn main() {
    let cases = suite();
    let outs: Vec<(String, SolveOutcome)> = cases.iter().map(|c| (c.name.clone(), run(c, &SolverOptions::default()))).collect();

    let results = [
        ("1 oracle equivalence", c1_oracle_equivalence()),
        ("2 fraction conservation", c2_conservation(&outs)),
        ("3 norm decomposition", c3_norm_decomposition(&outs)),
        ("4 monitoring transparency", c4_transparency(&cases)),
        ("5 qualitative reproduction", c5_qualitative()),
        ("6 stokes mesh independence", c6_stokes_mesh_independence()),
        ("7 minimal-residual monotonicity", c7_monotonicity(&outs)),
        ("8 storage audit", c8_storage_audit()),
        ("9 small-instance exactness", c9_small_exact()),
        ("10 per-block stopping", c10_per_block_stopping()),
    ];
    for (name, v) in &results {
        println!("criterion {name}: {} - {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    let failed = results.iter().filter(|(_, v)| !v.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
