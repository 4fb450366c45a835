//! `fmlog` — command line front end for the exact verification library.
//!
//! Subcommands expose the stratification enumerator (`strata`), operadic
//! composition and its axiom campaigns (`fm`), screen composition and
//! decomposition (`screen`), the divisor-lattice log calculus (`logcalc`),
//! the floating-point blow-up charts (`kn`), and the combined campaign
//! (`verify all`).
//!
//! Exit status: 0 when every requested check passes, 1 when a verification
//! fails (witnesses are part of the report), 2 for malformed inputs or flags.
//! Identical configuration and seed always produce byte-identical JSON.

mod plot;

use clap::{Parser, Subcommand, ValueEnum};
use fmlog::json::{
    self, fm_point_from_value, fm_point_value, framed_point_from_value, framed_point_value,
    morphism_value, nested_value, screen_from_value, screen_value, stable_tree_value,
    to_pretty_bytes,
};
use fmlog::kn::{self, CartesianCase, KnReport, SplitCase};
use fmlog::logdf::{gamma, LogMorphism, Variant};
use fmlog::nested::{closure_covers, enumerate_nested_collections, nested_to_tree};
use fmlog::points::{compose, framed_compose, FMPoint, FramedPoint};
use fmlog::screen::{screen_compose, screen_decompose, Screen};
use fmlog::sets::{Subset, Surjection};
use fmlog::verify::{
    campaign_passed, campaign_value, verify_all, verify_fm_axioms, verify_fm_coordinates,
    verify_logdf_associativity, verify_logdf_equivariance, verify_logdf_flags,
    verify_logdf_legality, verify_logdf_units, CaseReport, VerifyConfig,
};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable overriding the default arity bounds of `strata --n`
/// and `logcalc verify --max-arity`.
const MAX_ARITY_ENV: &str = "FMLOG_MAX_ARITY";

const DEFAULT_STRATA_N: u32 = 4;
const DEFAULT_LOGCALC_ARITY: u32 = 6;
/// Hard bounds keeping every subcommand desk-scale.
const STRATA_ENUM_CAP: u32 = 7;
const STRATA_POSET_CAP: u32 = 6;
const LOGCALC_ARITY_CAP: u32 = 7;
const FM_N_CAP: usize = 6;
const FM_DIM_CAP: usize = 6;

#[derive(Parser)]
#[command(
    name = "fmlog",
    version,
    about = "Exact verification of configuration-space operads, screen moduli, \
             divisor-lattice log morphisms, and blow-up chart numerics",
    propagate_version = true
)]
struct Cli {
    /// Seed determining every randomized campaign.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Tolerance for the floating-point chart checks (exact modules ignore it).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Strata of the compactified configuration spaces: stable trees and
    /// nested collections.
    Strata {
        #[command(subcommand)]
        cmd: StrataCmd,
    },
    /// Exact points of the compactified configuration spaces and their
    /// operadic composition.
    Fm {
        #[command(subcommand)]
        cmd: FmCmd,
    },
    /// Screens: the linear-algebra model of moduli points.
    Screen {
        #[command(subcommand)]
        cmd: ScreenCmd,
    },
    /// Divisor-lattice log structures and their composition calculus.
    Logcalc {
        #[command(subcommand)]
        cmd: LogcalcCmd,
    },
    /// Floating-point verification of real-oriented-blow-up and circle-bundle
    /// charts.
    Kn {
        #[command(subcommand)]
        cmd: KnCmd,
    },
    /// Combined verification campaigns.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum StrataCmd {
    /// List every stratum: nested collection and stable tree.
    Enumerate {
        /// Number of marked points (default from FMLOG_MAX_ARITY, then 4).
        #[arg(long)]
        n: Option<u32>,
    },
    /// Covering relations of the closure order on the strata.
    Poset {
        /// Number of marked points (default from FMLOG_MAX_ARITY, then 4).
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Subcommand)]
enum FmCmd {
    /// Compose points along a surjection read from a JSON spec file.
    Compose {
        /// JSON file with fields "q", "outer", and "inners".
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run the operad axiom and coordinate-law campaigns at one dimension.
    VerifyAxioms {
        /// Ambient dimension.
        #[arg(long = "D")]
        dim: usize,
        /// Largest arity sampled.
        #[arg(long)]
        n: usize,
        /// Number of random instances.
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Render a planar point as an SVG scatter (requires --out FILE.svg).
    Plot {
        /// Ambient dimension; must be 2.
        #[arg(long = "D", default_value_t = 2)]
        dim: usize,
        /// JSON file holding the point.
        #[arg(long = "in")]
        input: PathBuf,
        /// Display scale for infinitesimal levels (visual only).
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
    },
}

#[derive(Subcommand)]
enum ScreenCmd {
    /// Compose an outer screen with one inner screen per fiber.
    Compose {
        /// JSON file with fields "outer" and "inners".
        #[arg(long = "in")]
        input: PathBuf,
        /// Surjection, written as the list of values ("1,1,2").
        #[arg(long)]
        q: String,
    },
    /// Split a screen satisfying the vanishing conditions into outer and
    /// inner screens.
    Decompose {
        /// JSON file holding the screen.
        #[arg(long = "in")]
        input: PathBuf,
        /// Surjection, written as the list of values ("1,1,2").
        #[arg(long)]
        q: String,
    },
    /// Check well-formedness, and the vanishing conditions when -q is given.
    Validate {
        /// JSON file holding the screen.
        #[arg(long = "in")]
        input: PathBuf,
        /// Optional surjection for the vanishing conditions.
        #[arg(long)]
        q: Option<String>,
    },
}

#[derive(Subcommand)]
enum LogcalcCmd {
    /// Composition morphism of the log calculus along one surjection.
    Gamma {
        /// Surjection, written as the list of values ("1,1,2").
        #[arg(long)]
        q: String,
        /// Calculus variant: log | vlog.
        #[arg(long)]
        variant: String,
        /// Emit the full matrix instead of the summary.
        #[arg(long)]
        dump: bool,
    },
    /// Exhaustive legality, associativity, and equivariance sweep.
    Verify {
        /// Largest arity swept (default from FMLOG_MAX_ARITY, then 6).
        #[arg(long = "max-arity")]
        max_arity: Option<u32>,
        /// Calculus variant: log | vlog.
        #[arg(long)]
        variant: String,
    },
}

#[derive(Subcommand)]
enum KnCmd {
    /// Hopf-fibration chart checks on the unit sphere in C^(m+1).
    Hopf {
        /// Complex dimension parameter.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Circle splitting of a tensor-product blow-up (catalog case).
    Split {
        /// One of: trivial, disk-zero, double-wind, two-bundle.
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 1_000)]
        samples: usize,
    },
    /// Circle action on blow-up charts of C^n.
    S1 {
        /// Complex dimension.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Cartesian blow-up square of a strict chart morphism (catalog case).
    Cartesian {
        /// One of: trivial, point-circle, line-in-plane.
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 150)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every campaign in every module.
    All {
        /// Reduced bounds finishing in well under a minute.
        #[arg(long)]
        quick: bool,
    },
}

// ---------------------------------------------------------------------------
// Entry point and error-to-exit-code mapping
// ---------------------------------------------------------------------------

type CliError = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Strata { cmd } => run_strata(cli, cmd),
        Command::Fm { cmd } => run_fm(cli, cmd),
        Command::Screen { cmd } => run_screen(cli, cmd),
        Command::Logcalc { cmd } => run_logcalc(cli, cmd),
        Command::Kn { cmd } => run_kn(cli, cmd),
        Command::Verify { cmd } => run_verify(cli, cmd),
    }
}

/// Writes the report in the chosen format to --out or standard output.
fn emit(cli: &Cli, value: &Value, table: String) -> Result<(), CliError> {
    let bytes = match cli.format {
        Format::Json => to_pretty_bytes(value),
        Format::Table => {
            let mut t = table.into_bytes();
            if t.last() != Some(&b'\n') {
                t.push(b'\n');
            }
            t
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn read_json(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| format!("malformed JSON in {}: {e}", path.display()))?;
    Ok(value)
}

fn env_arity(default: u32) -> Result<u32, CliError> {
    match std::env::var(MAX_ARITY_ENV) {
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .map_err(|_| format!("{MAX_ARITY_ENV} must be a positive integer, got {s:?}").into()),
        Err(_) => Ok(default),
    }
}

fn check_cap(what: &str, value: u32, cap: u32) -> Result<(), CliError> {
    if value == 0 || value > cap {
        return Err(format!("{what} must lie in 1..={cap}, got {value}").into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Report rendering shared by the verification subcommands
// ---------------------------------------------------------------------------

fn case_value(c: &CaseReport) -> Value {
    json!({
        "name": c.name,
        "passed": c.passed(),
        "checked": c.checked,
        "max_error": c.max_error,
        "failures": c.failures(),
    })
}

fn cases_table(cases: &[CaseReport]) -> String {
    let mut out = String::new();
    for c in cases {
        out.push_str(&c.summary_line());
        out.push('\n');
        for f in c.failures() {
            let _ = writeln!(out, "    {f}");
        }
    }
    let failed = cases.iter().filter(|c| !c.passed()).count();
    if failed == 0 {
        let _ = writeln!(out, "PASS ({} cases)", cases.len());
    } else {
        let _ = writeln!(out, "FAIL ({failed} of {} cases)", cases.len());
    }
    out
}

fn emit_cases(cli: &Cli, extra: &[(&str, Value)], cases: Vec<CaseReport>) -> Result<bool, CliError> {
    let passed = campaign_passed(&cases);
    let mut obj = serde_json::Map::new();
    for (k, v) in extra {
        obj.insert((*k).to_string(), v.clone());
    }
    obj.insert("passed".into(), json!(passed));
    obj.insert(
        "cases".into(),
        Value::Array(cases.iter().map(case_value).collect()),
    );
    emit(cli, &Value::Object(obj), cases_table(&cases))?;
    Ok(passed)
}

fn kn_table(r: &KnReport) -> String {
    let mut out = format!(
        "{}: checked={} max_error={:.3e} {}\n",
        r.name,
        r.checked,
        r.max_error,
        if r.passed() { "PASS" } else { "FAIL" }
    );
    for f in &r.failures {
        let _ = writeln!(out, "    {f}");
    }
    out
}

// ---------------------------------------------------------------------------
// strata
// ---------------------------------------------------------------------------

fn run_strata(cli: &Cli, cmd: &StrataCmd) -> Result<bool, CliError> {
    match cmd {
        StrataCmd::Enumerate { n } => {
            let n = match n {
                Some(v) => *v,
                None => env_arity(DEFAULT_STRATA_N)?,
            };
            check_cap("--n", n, STRATA_ENUM_CAP)?;
            let collections = enumerate_nested_collections(Subset::range(n)?, n)?;
            let strata: Vec<Value> = collections
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let tree = nested_to_tree(c)?;
                    Ok(json!({
                        "index": i,
                        "nested": nested_value(c),
                        "tree": stable_tree_value(&tree),
                    }))
                })
                .collect::<Result<_, CliError>>()?;
            let mut table = format!("strata of the {n}-point space: {}\n", collections.len());
            for (i, c) in collections.iter().enumerate() {
                let members: Vec<String> = c.members().iter().map(|m| m.key()).collect();
                let _ = writeln!(
                    table,
                    "{i:4}  {{{}}}",
                    members
                        .iter()
                        .map(|k| format!("{{{k}}}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            emit(
                cli,
                &json!({ "n": n, "count": collections.len(), "strata": strata }),
                table,
            )?;
            Ok(true)
        }
        StrataCmd::Poset { n } => {
            let n = match n {
                Some(v) => *v,
                None => env_arity(DEFAULT_STRATA_N)?,
            };
            check_cap("--n", n, STRATA_POSET_CAP)?;
            let collections = enumerate_nested_collections(Subset::range(n)?, n)?;
            let covers = closure_covers(&collections);
            let mut table = format!(
                "closure order on {} strata: {} covering relations (stratum -> one-step degeneration)\n",
                collections.len(),
                covers.len()
            );
            for (i, j) in &covers {
                let _ = writeln!(table, "{j:4} -> {i}");
            }
            let cover_values: Vec<Value> = covers.iter().map(|(i, j)| json!([i, j])).collect();
            emit(
                cli,
                &json!({ "n": n, "count": collections.len(), "covers": cover_values }),
                table,
            )?;
            Ok(true)
        }
    }
}

// ---------------------------------------------------------------------------
// fm
// ---------------------------------------------------------------------------

/// Relabels an inner point onto the fiber it is grafted into when its labels
/// do not already match (order-preservingly; arities must agree).
fn fit_to_fiber(point: &FMPoint, fiber: Subset, r: u32) -> Result<FMPoint, CliError> {
    if point.leaf_set() == fiber {
        return Ok(point.clone());
    }
    if point.leaf_set().len() != fiber.len() {
        return Err(format!(
            "inner point for label {r} has {} leaves but the fiber {} has {}",
            point.leaf_set().len(),
            fiber.key(),
            fiber.len()
        )
        .into());
    }
    let pairs: Vec<(u32, u32)> = point.leaf_set().labels().zip(fiber.labels()).collect();
    Ok(point.relabel(&Surjection::new(pairs)?)?)
}

fn run_fm(cli: &Cli, cmd: &FmCmd) -> Result<bool, CliError> {
    match cmd {
        FmCmd::Compose { spec } => {
            let v = read_json(spec)?;
            let o = v
                .as_object()
                .ok_or("compose spec must be a JSON object with \"q\", \"outer\", \"inners\"")?;
            let q = Surjection::parse(
                o.get("q")
                    .and_then(Value::as_str)
                    .ok_or("compose spec missing string field \"q\"")?,
            )?;
            let outer_v = o.get("outer").ok_or("compose spec missing \"outer\"")?;
            let inners_v = o
                .get("inners")
                .and_then(Value::as_object)
                .ok_or("compose spec missing object field \"inners\" keyed by output label")?;
            let inner_of = |r: u32| -> Result<&Value, CliError> {
                inners_v
                    .get(&r.to_string())
                    .ok_or_else(|| format!("compose spec missing inner point for label {r}").into())
            };
            let framed = outer_v.get("frames").is_some();
            if framed {
                let outer = framed_point_from_value(outer_v)?;
                let mut ys: Vec<FramedPoint> = Vec::new();
                for (r, fiber) in q.fibers() {
                    let y = framed_point_from_value(inner_of(r)?)?;
                    let fitted = fit_to_fiber(y.point(), fiber, r)?;
                    let frames = y
                        .point()
                        .leaf_set()
                        .labels()
                        .zip(fiber.labels())
                        .map(|(old, new)| (new, y.frames()[&old].clone()))
                        .collect();
                    ys.push(FramedPoint::new(fitted, frames)?);
                }
                let composed = framed_compose(&q, &outer, &ys)?;
                let value = framed_point_value(&composed);
                let table = format!(
                    "framed composite: 2d={} arity={} nested={}\n",
                    composed.point().dim(),
                    composed.point().arity(),
                    nested_table(composed.point())
                );
                emit(cli, &value, table)?;
            } else {
                let outer = fm_point_from_value(outer_v)?;
                let mut ys: Vec<FMPoint> = Vec::new();
                for (r, fiber) in q.fibers() {
                    let y = fm_point_from_value(inner_of(r)?)?;
                    ys.push(fit_to_fiber(&y, fiber, r)?);
                }
                let composed = compose(&q, &outer, &ys)?;
                let value = fm_point_value(&composed);
                let table = format!(
                    "composite: D={} arity={} nested={}\n",
                    composed.dim(),
                    composed.arity(),
                    nested_table(&composed)
                );
                emit(cli, &value, table)?;
            }
            Ok(true)
        }
        FmCmd::VerifyAxioms { dim, n, trials } => {
            check_cap("--D", *dim as u32, FM_DIM_CAP as u32)?;
            if *n < 2 || *n > FM_N_CAP {
                return Err(format!("--n must lie in 2..={FM_N_CAP}, got {n}").into());
            }
            let cases = vec![
                verify_fm_axioms(*dim, *n, *trials, cli.seed),
                verify_fm_coordinates(*dim, *n, *trials, cli.seed),
            ];
            emit_cases(
                cli,
                &[
                    ("dim", json!(dim)),
                    ("max_n", json!(n)),
                    ("trials", json!(trials)),
                    ("seed", json!(cli.seed)),
                ],
                cases,
            )
        }
        FmCmd::Plot { dim, input, epsilon } => {
            if *dim != 2 {
                return Err(format!("plotting is available for --D 2 only, got {dim}").into());
            }
            let out = cli
                .out
                .as_ref()
                .ok_or("fm plot writes an SVG file; pass --out FILE.svg")?;
            let point = fm_point_from_value(&read_json(input)?)?;
            let svg = plot::render_svg(&point, *epsilon)?;
            std::fs::write(out, svg)?;
            let stats = plot::plot_stats(&point);
            println!(
                "wrote {}: {} marked points, {} infinitesimal clusters",
                out.display(),
                stats.leaves,
                stats.clusters
            );
            Ok(true)
        }
    }
}

fn nested_table(p: &FMPoint) -> String {
    let sets: Vec<String> = p.nested_sets().iter().map(|s| format!("{{{}}}", s.key())).collect();
    if sets.is_empty() {
        "none (interior point)".to_string()
    } else {
        sets.join(" ")
    }
}

// ---------------------------------------------------------------------------
// screen
// ---------------------------------------------------------------------------

fn run_screen(cli: &Cli, cmd: &ScreenCmd) -> Result<bool, CliError> {
    match cmd {
        ScreenCmd::Compose { input, q } => {
            let q = Surjection::parse(q)?;
            let v = read_json(input)?;
            let o = v
                .as_object()
                .ok_or("screen compose input must be a JSON object with \"outer\" and \"inners\"")?;
            let outer = screen_from_value(o.get("outer").ok_or("input missing \"outer\"")?)?;
            let inners_v = o
                .get("inners")
                .and_then(Value::as_object)
                .ok_or("input missing object field \"inners\" keyed by output label")?;
            let mut inners: Vec<Screen> = Vec::new();
            for (r, fiber) in q.fibers() {
                let sv = inners_v
                    .get(&r.to_string())
                    .ok_or_else(|| format!("input missing inner screen for label {r}"))?;
                let s = screen_from_value(sv)?;
                if s.index_set() != fiber {
                    return Err(format!(
                        "inner screen for label {r} is indexed by {} but the fiber is {}",
                        s.index_set().key(),
                        fiber.key()
                    )
                    .into());
                }
                inners.push(s);
            }
            let composed = screen_compose(&q, &outer, &inners)?;
            let table = format!(
                "composed screen on {{{}}} in dimension {}\n",
                composed.index_set().key(),
                composed.dim()
            );
            emit(cli, &screen_value(&composed), table)?;
            Ok(true)
        }
        ScreenCmd::Decompose { input, q } => {
            let q = Surjection::parse(q)?;
            let screen = screen_from_value(&read_json(input)?)?;
            let (outer, inners) = screen_decompose(&q, &screen)?;
            let inner_map: serde_json::Map<String, Value> = q
                .fibers()
                .iter()
                .zip(&inners)
                .map(|((r, _), s)| (r.to_string(), screen_value(s)))
                .collect();
            let value = json!({ "outer": screen_value(&outer), "inners": inner_map });
            let table = format!(
                "decomposed along {}: outer on {{{}}}, {} inner screens\n",
                q,
                outer.index_set().key(),
                inners.len()
            );
            emit(cli, &value, table)?;
            Ok(true)
        }
        ScreenCmd::Validate { input, q } => {
            let screen = screen_from_value(&read_json(input)?)?;
            let violation = screen.validate()?;
            let vanishing = match q {
                Some(text) => Some(screen.vanishing_satisfied(&Surjection::parse(text)?)?),
                None => None,
            };
            let ok = violation.is_none() && vanishing.unwrap_or(true);
            let value = json!({
                "valid": violation.is_none(),
                "violation": violation.map(|(inner, outer)| json!([inner.key(), outer.key()])),
                "vanishing": vanishing,
            });
            let mut table = match violation {
                None => "well-formed: every component spans its vertex\n".to_string(),
                Some((inner, outer)) => format!(
                    "INVALID: component at {{{}}} degenerates when restricted to {{{}}}\n",
                    outer.key(),
                    inner.key()
                ),
            };
            if let Some(v) = vanishing {
                let _ = writeln!(
                    table,
                    "vanishing conditions: {}",
                    if v { "satisfied" } else { "NOT satisfied" }
                );
            }
            emit(cli, &value, table)?;
            Ok(ok)
        }
    }
}

// ---------------------------------------------------------------------------
// logcalc
// ---------------------------------------------------------------------------

fn morphism_summary(q: &Surjection, variant: Variant, g: &LogMorphism) -> Value {
    json!({
        "q": q.to_string(),
        "variant": variant.name(),
        "source_bundles": g.source.len(),
        "target_bundles": g.target.len(),
        "df_legal": g.legality_df().is_none(),
        "virtual_legal": g.legality_virtual().is_none(),
    })
}

fn run_logcalc(cli: &Cli, cmd: &LogcalcCmd) -> Result<bool, CliError> {
    match cmd {
        LogcalcCmd::Gamma { q, variant, dump } => {
            let variant = Variant::parse(variant)?;
            let q = Surjection::parse(q)?;
            let g = gamma(&q, variant)?;
            let summary = morphism_summary(&q, variant, &g);
            let value = if *dump {
                json!({
                    "summary": summary,
                    "morphism": morphism_value(&g),
                })
            } else {
                summary.clone()
            };
            let mut table = format!(
                "gamma[{}] along {}: {} -> {} bundles, df-legal: {}, virtually legal: {}\n",
                variant.name(),
                q,
                g.source.len(),
                g.target.len(),
                g.legality_df().is_none(),
                g.legality_virtual().is_none(),
            );
            if *dump {
                for (j, row) in g.rows.iter().enumerate() {
                    let terms: Vec<String> = row
                        .exponents
                        .iter()
                        .map(|(i, e)| format!("{:+}*{}", e, g.source.bundles[*i].tag.key()))
                        .collect();
                    let _ = writeln!(
                        table,
                        "  {} <- {}",
                        g.target.bundles[j].tag.key(),
                        if terms.is_empty() {
                            "0".to_string()
                        } else {
                            terms.join(" ")
                        }
                    );
                }
            }
            emit(cli, &value, table)?;
            Ok(true)
        }
        LogcalcCmd::Verify { max_arity, variant } => {
            let variant = Variant::parse(variant)?;
            let max_arity = match max_arity {
                Some(v) => *v,
                None => env_arity(DEFAULT_LOGCALC_ARITY)?,
            };
            check_cap("--max-arity", max_arity, LOGCALC_ARITY_CAP)?;
            let labeled_max = max_arity.min(5);
            let mut cases = vec![
                verify_logdf_legality(max_arity, variant),
                verify_logdf_associativity(max_arity, labeled_max, variant),
                verify_logdf_equivariance(max_arity, variant),
            ];
            if variant == Variant::VLog {
                cases.push(verify_logdf_units(max_arity.min(5)));
                cases.push(verify_logdf_flags(max_arity.min(4)));
            }
            emit_cases(
                cli,
                &[
                    ("variant", json!(variant.name())),
                    ("max_arity", json!(max_arity)),
                ],
                cases,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// kn
// ---------------------------------------------------------------------------

fn run_kn(cli: &Cli, cmd: &KnCmd) -> Result<bool, CliError> {
    let report = match cmd {
        KnCmd::Hopf { m, samples } => kn::hopf_verify(*m, *samples, cli.tol, cli.seed)?,
        KnCmd::Split { case, samples } => {
            kn::circle_split_verify(SplitCase::parse(case)?, *samples, cli.tol, cli.seed)?
        }
        KnCmd::S1 { n, samples } => kn::s1_action_verify(*n, *samples, cli.tol, cli.seed)?,
        KnCmd::Cartesian { case, samples } => {
            kn::strict_cartesian_verify(CartesianCase::parse(case)?, *samples, cli.tol, cli.seed)?
        }
    };
    emit(cli, &json::kn_report_value(&report), kn_table(&report))?;
    Ok(report.passed())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn run_verify(cli: &Cli, cmd: &VerifyCmd) -> Result<bool, CliError> {
    match cmd {
        VerifyCmd::All { quick } => {
            let cfg = VerifyConfig::new(cli.seed, cli.tol, *quick);
            let cases = verify_all(&cfg);
            let passed = campaign_passed(&cases);
            emit(cli, &campaign_value(&cfg, &cases), cases_table(&cases))?;
            Ok(passed)
        }
    }
}
