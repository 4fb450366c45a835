//! Acceptance suite: one test and one printed pass/fail line per criterion.
//!
//! Run with `cargo test -p fmlog-cli --test acceptance -- --nocapture` to see
//! the per-criterion lines; `--test-threads=1` keeps them in order.  Every
//! tolerance and bound is pinned here, not read from flags.

use fmlog::logdf::Variant;
use fmlog::nested::enumerate_stable_trees;
use fmlog::verify::{
    verify_bridge, verify_fm_axioms, verify_fm_coordinates, verify_framed_axioms, verify_kn_all,
    verify_logdf_associativity, verify_logdf_equivariance, verify_logdf_flags,
    verify_logdf_legality, verify_logdf_units, verify_screens, verify_strata, verify_strict_units,
    CaseReport, KnScale,
};
use std::time::{Duration, Instant};

const SEED: u64 = 42;
const KN_TOL: f64 = 1e-9;

/// Runs one criterion, prints exactly one pass/fail line for it, and fails
/// the test on a violated check or budget.
fn criterion(n: u32, what: &str, f: impl FnOnce() -> Result<String, String>) {
    let t0 = Instant::now();
    let outcome = f();
    let dt = t0.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("criterion {n} ({what}): PASS [{dt:.1}s] {detail}"),
        Err(why) => {
            println!("criterion {n} ({what}): FAIL [{dt:.1}s] {why}");
            panic!("criterion {n} ({what}) failed: {why}");
        }
    }
}

/// Every case passed; returns a one-line summary of the volume checked.
fn all_pass(cases: &[CaseReport]) -> Result<String, String> {
    for c in cases {
        if !c.passed() {
            return Err(format!("{}: {:?}", c.name, c.failures()));
        }
    }
    Ok(format!(
        "{} cases, {} checks",
        cases.len(),
        cases.iter().map(|c| c.checked).sum::<u64>()
    ))
}

/// The campaign used exact arithmetic throughout: no numerical deviation may
/// have been recorded at all.
fn all_exact(cases: &[CaseReport]) -> Result<(), String> {
    for c in cases {
        if c.max_error != 0.0 {
            return Err(format!(
                "{} reported a numerical deviation {:e} in an exact campaign",
                c.name, c.max_error
            ));
        }
    }
    Ok(())
}

fn budget(t0: Instant, limit: Duration) -> Result<(), String> {
    let dt = t0.elapsed();
    if dt > limit {
        return Err(format!(
            "exceeded the {:.0} s budget: took {:.1} s",
            limit.as_secs_f64(),
            dt.as_secs_f64()
        ));
    }
    Ok(())
}

#[test]
fn criterion_1_operad_axioms() {
    criterion(
        1,
        "operad axioms, exact, dimensions 1-4, arity <= 5, 500 instances each",
        || {
            let t0 = Instant::now();
            let cases: Vec<CaseReport> = (1..=4)
                .map(|dim| verify_fm_axioms(dim, 5, 500, SEED))
                .collect();
            for c in &cases {
                if c.checked < 500 {
                    return Err(format!("{}: only {} instances", c.name, c.checked));
                }
            }
            all_exact(&cases)?;
            let detail = all_pass(&cases)?;
            budget(t0, Duration::from_secs(120))?;
            Ok(detail)
        },
    );
}

#[test]
fn criterion_2_coordinate_law() {
    criterion(
        2,
        "composite coordinates match the piecewise restriction/degeneration law on the same samples",
        || {
            let cases: Vec<CaseReport> = (1..=4)
                .map(|dim| verify_fm_coordinates(dim, 5, 500, SEED))
                .collect();
            all_exact(&cases)?;
            all_pass(&cases)
        },
    );
}

#[test]
fn criterion_3_framed_axioms() {
    criterion(
        3,
        "circle-framed operad axioms, exact, half-dimensions 1-2, 200 instances each",
        || {
            let cases: Vec<CaseReport> = [1, 2]
                .into_iter()
                .map(|d| verify_framed_axioms(d, 200, SEED))
                .collect();
            for c in &cases {
                if c.checked < 200 {
                    return Err(format!("{}: only {} instances", c.name, c.checked));
                }
            }
            all_exact(&cases)?;
            all_pass(&cases)
        },
    );
}

#[test]
fn criterion_4_strata_counts() {
    criterion(
        4,
        "stratum counts 1,1,4,26 with brute-force oracle and tree/nested bijection through 6 points",
        || {
            let t0 = Instant::now();
            for (n, want) in [(1u32, 1usize), (2, 1), (3, 4), (4, 26)] {
                let got = enumerate_stable_trees(n, 6).map_err(|e| e.to_string())?.len();
                if got != want {
                    return Err(format!("{n} points: {got} trees, expected {want}"));
                }
            }
            let detail = all_pass(&verify_strata(6))?;
            budget(t0, Duration::from_secs(60))?;
            Ok(detail)
        },
    );
}

#[test]
fn criterion_5_screen_bijection() {
    criterion(
        5,
        "screen compose/decompose are mutually inverse on 200 instances and composites satisfy all vanishing conditions",
        || {
            let cases = verify_screens(200, 4, 3, SEED);
            for c in &cases {
                if c.name.contains("roundtrip") && c.checked < 200 {
                    return Err(format!("{}: only {} instances", c.name, c.checked));
                }
            }
            all_exact(&cases)?;
            all_pass(&cases)
        },
    );
}

#[test]
fn criterion_6_log_calculus() {
    criterion(
        6,
        "divisor-lattice calculus: legality through arity 6, associativity and equivariance as integer-matrix identities, both unit axioms, no strict unit",
        || {
            let t0 = Instant::now();
            let mut cases = Vec::new();
            for variant in [Variant::Log, Variant::VLog] {
                cases.push(verify_logdf_legality(6, variant));
                cases.push(verify_logdf_associativity(6, 5, variant));
                cases.push(verify_logdf_equivariance(6, variant));
            }
            cases.push(verify_logdf_units(5));
            cases.push(verify_logdf_flags(4));
            cases.push(verify_strict_units(3, 3));
            all_exact(&cases)?;
            let detail = all_pass(&cases)?;
            budget(t0, Duration::from_secs(120))?;
            Ok(detail)
        },
    );
}

#[test]
fn criterion_7_blowup_chart_numerics() {
    criterion(
        7,
        "blow-up chart numerics: Hopf, circle splitting, sphere action, Cartesian squares, invariants, all under 1e-9",
        || {
            let t0 = Instant::now();
            let cases = verify_kn_all(KnScale::full(), KN_TOL, SEED);
            for c in &cases {
                if c.name.starts_with("kn/hopf") && !(c.max_error < KN_TOL) {
                    return Err(format!("{}: max_error {:e}", c.name, c.max_error));
                }
            }
            let detail = all_pass(&cases)?;
            budget(t0, Duration::from_secs(60))?;
            Ok(detail)
        },
    );
}

#[test]
fn criterion_8_screen_direction_bridge() {
    criterion(
        8,
        "screens and sphere-coordinate direction classes determine each other on 100 configurations",
        || {
            let c = verify_bridge(100, SEED);
            if c.checked < 100 {
                return Err(format!("only {} configurations", c.checked));
            }
            all_exact(std::slice::from_ref(&c))?;
            all_pass(std::slice::from_ref(&c))
        },
    );
}

#[test]
fn criterion_9_deterministic_reports() {
    criterion(
        9,
        "verify all --seed S emits byte-identical reports on consecutive runs",
        || {
            let exe = env!("CARGO_BIN_EXE_fmlog");
            let run = || {
                std::process::Command::new(exe)
                    .args(["verify", "all", "--seed", "42", "--quick", "--format", "json"])
                    .output()
                    .map_err(|e| format!("running the binary failed: {e}"))
            };
            let a = run()?;
            let b = run()?;
            if !a.status.success() {
                return Err(format!(
                    "first run exited with {:?}: {}",
                    a.status.code(),
                    String::from_utf8_lossy(&a.stderr)
                ));
            }
            if !b.status.success() {
                return Err(format!("second run exited with {:?}", b.status.code()));
            }
            if a.stdout.is_empty() {
                return Err("report was empty".into());
            }
            if a.stdout != b.stdout {
                return Err("reports differ between runs".into());
            }
            Ok(format!("{} identical bytes", a.stdout.len()))
        },
    );
}
