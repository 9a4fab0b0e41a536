//! `krphase` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 gap closed, 3 cross-check
//! discrepancy (or a failing self-test suite).

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bloch::{closing_set, gap, is_near_closing, ModelSpec, CLOSING_EPS};
use crate::check::{default_grid, degree_with_refinement, measured_orientation, run_all, CheckConfig};
use crate::clifford::ALGEBRA_TOL;
use crate::error::KrError;
use crate::invariants::{closed_form, kr_class, pullback_stacked};
use crate::symmetry::{build_symmetry_ops, classify, table_mismatch};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GAP_CLOSED: i32 = 2;
pub const EXIT_DISCREPANCY: i32 = 3;

/// Largest dimension for which `compute` runs the degree oracle.
const ORACLE_MAX_D: usize = 3;

#[derive(Parser, Debug)]
#[command(name = "krphase", version, about = "KR-theory invariants of model Hamiltonians on the real torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant vector with closed-form and degree cross-checks
    Compute(ModelArgs),
    /// Spectral gap on a uniform k-grid
    Gap(ModelArgs),
    /// Symmetry type of Cliff(a, b)
    Classify(ClassifyArgs),
    /// Run the algebraic self-test battery
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Torus dimension
    #[arg(long)]
    d: usize,
    /// Mass parameter
    #[arg(long, allow_hyphen_values = true)]
    m: f64,
    /// Active axes, comma separated and 1-based (default: all)
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<usize>>,
    /// Extra negative Clifford generators (0, 1 or 2)
    #[arg(long, default_value_t = 0)]
    extra_b: usize,
    /// Grid points per axis (even)
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    a: usize,
    #[arg(long)]
    b: usize,
    /// Include the Altland-Zirnbauer label
    #[arg(long)]
    cartan: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Largest torus dimension for the dimension-dependent suites
    #[arg(long, default_value_t = 3)]
    max_d: usize,
    /// Tolerance for exact algebraic identities
    #[arg(long, default_value_t = ALGEBRA_TOL)]
    tol: f64,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(&args, out, err),
        Command::Gap(args) => cmd_gap(&args, out),
        Command::Classify(args) => cmd_classify(&args, out),
        Command::Check(args) => cmd_check(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                KrError::GapClosed { .. } => EXIT_GAP_CLOSED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn io_err(e: std::io::Error) -> KrError {
    KrError::InvalidSpec(format!("write failed: {e}"))
}

fn build_spec(args: &ModelArgs) -> Result<ModelSpec, KrError> {
    let axes = args.axes.clone().unwrap_or_else(|| (1..=args.d).collect());
    ModelSpec::stacked(args.d, axes, args.m, args.extra_b)
}

fn print_json(out: &mut dyn Write, value: &Value) -> Result<(), KrError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    writeln!(out, "{text}").map_err(io_err)
}

fn cmd_compute(args: &ModelArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, KrError> {
    let spec = build_spec(args)?;
    if let Some(grid) = args.grid {
        if grid < 2 || !grid.is_multiple_of(2) {
            return Err(KrError::InvalidGrid(grid));
        }
    }
    let class = kr_class(&spec)?;
    let mut discrepancies: Vec<String> = Vec::new();

    let k = spec.k();
    let mut expected = pullback_stacked(&closed_form(k, spec.m())?, spec.axes(), spec.d())?;
    if spec.extra_b() > 0 {
        expected = expected.reduce_mod2();
    }
    let closed_agrees = expected == class;
    if !closed_agrees {
        discrepancies.push(format!(
            "closed form (p-labeling, sign (-1)^(d+p)) gives strong {} but enumeration gives {}",
            expected.strong(),
            class.strong()
        ));
    }

    let oracle = if spec.d() <= ORACLE_MAX_D && spec.has_full_axes() && spec.extra_b() == 0 {
        let grid = args.grid.unwrap_or_else(|| default_grid(spec.d()));
        let degree = degree_with_refinement(&spec, grid)?;
        let orientation = measured_orientation(spec.d(), grid)?;
        if degree.rounded != orientation * class.strong() {
            discrepancies.push(format!(
                "degree {} differs from s_d * strong = {} * {} (s_d measured at m = d - 1)",
                degree.rounded,
                orientation,
                class.strong()
            ));
        }
        Some(json!({
            "degree": degree.rounded,
            "raw": format!("{}", degree.raw),
            "residual": format!("{:.3e}", degree.residual),
            "grid_n": degree.grid_n,
            "orientation_sign": orientation,
        }))
    } else {
        None
    };

    match args.format {
        Format::Json => print_json(
            out,
            &json!({
                "class": class.to_json(),
                "closed_form": { "agrees": closed_agrees, "class": expected.to_json() },
                "oracle": oracle,
                "discrepancies": discrepancies,
            }),
        )?,
        Format::Table => {
            write!(out, "{class}").map_err(io_err)?;
            writeln!(out, "closed form agrees: {closed_agrees}").map_err(io_err)?;
            if let Some(o) = &oracle {
                writeln!(
                    out,
                    "degree oracle: {} (raw {}, grid {}, s_d = {})",
                    o["degree"], o["raw"].as_str().unwrap_or(""), o["grid_n"], o["orientation_sign"]
                )
                .map_err(io_err)?;
            }
        }
    }
    for d in &discrepancies {
        let _ = writeln!(err, "discrepancy: {d}");
    }
    Ok(if discrepancies.is_empty() { EXIT_OK } else { EXIT_DISCREPANCY })
}

fn cmd_gap(args: &ModelArgs, out: &mut dyn Write) -> Result<i32, KrError> {
    let spec = build_spec(args)?;
    let grid = args.grid.unwrap_or_else(|| default_grid(spec.k()));
    let value = gap(&spec, grid)?;
    let set = closing_set(spec.k());
    let in_set = is_near_closing(spec.k(), spec.m(), CLOSING_EPS);
    match args.format {
        Format::Json => print_json(
            out,
            &json!({
                "d": spec.d(),
                "m": format!("{}", spec.m()),
                "axes": spec.axes(),
                "grid_n": grid,
                "gap": format!("{value}"),
                "closing_set": set,
                "in_closing_set": in_set,
            }),
        )?,
        Format::Table => {
            writeln!(out, "gap {value}").map_err(io_err)?;
            writeln!(out, "closing set {set:?}").map_err(io_err)?;
            if in_set {
                writeln!(out, "m in closing set").map_err(io_err)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<i32, KrError> {
    let class = classify(args.a, args.b)?;
    let ops = build_symmetry_ops(args.a, args.b)?;
    let problems = table_mismatch(&class, &ops);
    let json = class.to_json(args.cartan);
    match args.format {
        Format::Json => print_json(out, &serde_json::to_value(&json).expect("serializable"))?,
        Format::Table => {
            writeln!(out, "Cliff({}, {})  j = {}", json.a, json.b, json.j).map_err(io_err)?;
            writeln!(out, "Theta^2 = {:+}  role {:?}", json.theta_sq, json.theta_role).map_err(io_err)?;
            match json.xi_theta_sq {
                Some(s) => writeln!(out, "chiral Xi present, (Xi Theta)^2 = {s:+}"),
                None => writeln!(out, "no chiral symmetry"),
            }
            .map_err(io_err)?;
            writeln!(out, "real subalgebra {}", json.real_subalgebra).map_err(io_err)?;
            if let Some(label) = &json.cartan_label {
                writeln!(out, "class {label}").map_err(io_err)?;
            }
        }
    }
    Ok(if problems.is_empty() { EXIT_OK } else { EXIT_DISCREPANCY })
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, KrError> {
    let cfg = CheckConfig {
        max_d: args.max_d.max(1),
        tol: args.tol,
    };
    for outcome in run_all(&cfg) {
        let status = if outcome.passed { "pass" } else { "FAIL" };
        writeln!(
            out,
            "{:<11} {status}  {:>7.3}s  {}",
            outcome.name, outcome.seconds, outcome.detail
        )
        .map_err(io_err)?;
        if !outcome.passed {
            writeln!(out, "first failing suite: {}", outcome.name).map_err(io_err)?;
            return Ok(EXIT_DISCREPANCY);
        }
    }
    Ok(EXIT_OK)
}

