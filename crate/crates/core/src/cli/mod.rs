//! The `kyano` command line.
//!
//! ```text
//! kyano verify-ky  --manifold flat:3 --field ky.json [--samples 20] [--seed 0] [--tol 1e-10]
//! kyano geodesic   --manifold const-curvature:1 --x 0.1,0,0 --p 0,1,0 --dt 1e-3 --steps 10000 --monitor H
//! kyano multipole  [--samples 1000] [--seed 42] [--format json|table|csv]
//! kyano report     [--seed 42] [--skip taub-nut] --out report.json
//! ```
//!
//! Exit codes: 0 success, 1 verification or regression failure, 2 usage or
//! input error. `KYANO_THREADS` caps the worker pool.

mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dynamics::{
    conservation_monitor, geodesic_integrate, DynamicsError, PhaseFunction, PhasePoint,
};
use crate::geometry::{dual_metric, ChartRole, CurvatureChart, MetricKind, MetricSpec};
use crate::kysym::{
    constcurv_printed_field, flat_ky_field, ky_report, taubnut_field, AntisymField, KyTolerances,
};
use crate::multipole::{identity_suite, Expectations};
use crate::sampling;

pub use report::{run_report, ReportOptions, Section, SECTIONS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "kyano",
    version,
    about = "Killing-Yano tensor verification runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a field against the Killing-Yano equation on a manifold.
    VerifyKy {
        /// Manifold file or catalog name (`flat:N`, `const-curvature:K`,
        /// `const-curvature-spherical:K`, `taub-nut:M`; prefix `dual:` for the
        /// momentum chart).
        #[arg(long)]
        manifold: String,
        /// Field file or catalog name (`flat`, `taub-nut:I`, `const-curvature-printed`).
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Killing-Yano residual tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Integrate a geodesic and monitor conserved quantities.
    Geodesic {
        #[arg(long)]
        manifold: String,
        /// Initial position, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        x: Vec<f64>,
        /// Initial momentum, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Quantities to monitor: `H`, `K`, `L1`..`L3` or a phase expression in
        /// `x1..xn, p1..pn`.
        #[arg(long, value_delimiter = ',', default_value = "H")]
        monitor: Vec<String>,
        /// Field for `K` (file or catalog name); defaults to the flat field.
        #[arg(long)]
        field: Option<String>,
        /// Fail when a relative drift exceeds this.
        #[arg(long)]
        tol: Option<f64>,
        /// CSV trajectory path; the JSON sidecar goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the multipole identity suite against the shipped expectation table.
    Multipole {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Alternative expectation table.
        #[arg(long)]
        expectations: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run every catalog check and write one aggregated document.
    Report {
        /// Samples for the multipole section.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Sections to skip.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SECTIONS))]
        skip: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An input problem (exit 2) or a failed verification (exit 1).
#[derive(Debug)]
enum Outcome {
    Usage(String),
    Fail(String),
}

fn usage(msg: impl std::fmt::Display) -> Outcome {
    Outcome::Usage(msg.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Outcome> {
    match out {
        Some(path) => crate::io::write_atomic(path, text.as_bytes())
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn read_file(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Manifold from a file path or a catalog name.
pub fn load_manifold(arg: &str) -> Result<MetricSpec, String> {
    let path = Path::new(arg);
    if path.is_file() {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        return MetricSpec::from_json_str(&src).map_err(|e| format!("{arg}: {e}"));
    }
    let (dual, name) = match arg.strip_prefix("dual:") {
        Some(rest) => (true, rest),
        None => (false, arg),
    };
    let spec = MetricSpec::from_name(name)
        .ok_or_else(|| format!("'{arg}' is neither a readable file nor a catalog manifold"))?;
    Ok(if dual { dual_metric(&spec) } else { spec })
}

/// Field from a file path or a catalog name, read on the chart of `spec`.
pub fn load_field(arg: &str, spec: &MetricSpec) -> Result<AntisymField, String> {
    let path = Path::new(arg);
    if path.is_file() {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?;
        return AntisymField::from_json_str(&src).map_err(|e| format!("{arg}: {e}"));
    }
    let role = spec.role();
    let field = match (arg, spec.kind()) {
        ("flat", _) if spec.dim() >= 2 => flat_ky_field(spec.dim(), ChartRole::Position),
        (
            "const-curvature-printed",
            MetricKind::ConstCurvature3 {
                k,
                chart: CurvatureChart::Spherical,
            },
        ) => return Ok(constcurv_printed_field(*k, role)),
        (name, MetricKind::TaubNut { m, .. }) if name.starts_with("taub-nut:") => {
            let i: usize = name["taub-nut:".len()..]
                .parse()
                .map_err(|_| format!("bad Taub-NUT field index in '{name}'"))?;
            taubnut_field(i, *m, ChartRole::Position).map_err(|e| e.to_string())?
        }
        _ => {
            return Err(format!(
                "'{arg}' is neither a readable file nor a catalog field for {}",
                spec.label()
            ))
        }
    };
    Ok(match role {
        ChartRole::Position => field,
        ChartRole::Momentum => field.twin(),
    })
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    #[serde(flatten)]
    report: &'a crate::kysym::KyReport,
    seed: u64,
    generator: &'static str,
    version: &'static str,
}

fn verify_ky(
    manifold: &str,
    field: &str,
    samples: usize,
    seed: u64,
    tol: f64,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Outcome> {
    let spec = load_manifold(manifold).map_err(usage)?;
    let field = load_field(field, &spec).map_err(usage)?;
    if field.dim() != spec.dim() {
        return Err(usage(format!(
            "field has dimension {}, manifold has {}",
            field.dim(),
            spec.dim()
        )));
    }
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let points = sampling::regular_points(&spec, &mut sampling::rng(seed), samples);
    let tolerances = KyTolerances {
        ky: tol,
        ..KyTolerances::default()
    };
    let report = ky_report(&spec, &field, &points, tolerances).map_err(usage)?;
    let text = match format {
        Format::Json => crate::io::to_json_string(&VerifyOutput {
            report: &report,
            seed,
            generator: sampling::GENERATOR,
            version: env!("CARGO_PKG_VERSION"),
        }),
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
    };
    emit(out, &text)?;
    if report.is_ky {
        Ok(())
    } else {
        Err(Outcome::Fail(format!(
            "not Killing-Yano: max residual {:e} exceeds {:e}",
            report.max_ky_residual, tol
        )))
    }
}

fn monitor_function(
    name: &str,
    spec: &MetricSpec,
    field: Option<&str>,
) -> Result<PhaseFunction, String> {
    let n = spec.dim();
    match name {
        "H" => Ok(PhaseFunction::Hamiltonian(spec.clone())),
        "K" => {
            let f = match field {
                Some(arg) => load_field(arg, spec)?,
                None => flat_ky_field(n, ChartRole::Position),
            };
            if f.rank() != 2 || f.dim() != n {
                return Err(format!("K needs a rank-2 field in dimension {n}"));
            }
            Ok(PhaseFunction::KillingQuadratic(spec.clone(), f))
        }
        "L1" | "L2" | "L3" if n == 3 => {
            PhaseFunction::angular_momentum(name.as_bytes()[1] as usize - b'1' as usize)
                .map_err(|e| e.to_string())
        }
        expr => PhaseFunction::parse(expr, n).map_err(|e| format!("monitor '{expr}': {e}")),
    }
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[allow(clippy::too_many_arguments)]
fn geodesic(
    manifold: &str,
    x: Vec<f64>,
    p: Vec<f64>,
    dt: f64,
    steps: usize,
    monitor: &[String],
    field: Option<&str>,
    tol: Option<f64>,
    out: Option<&Path>,
) -> Result<(), Outcome> {
    let spec = load_manifold(manifold).map_err(usage)?;
    if x.len() != spec.dim() || p.len() != spec.dim() {
        return Err(usage(format!(
            "--x and --p need {} components each",
            spec.dim()
        )));
    }
    let z0 = PhasePoint::new(x, p).map_err(usage)?;
    spec.check_domain(&z0.x)
        .map_err(|e| usage(format!("initial point: {e}")))?;
    let quantities = monitor
        .iter()
        .map(|m| monitor_function(m, &spec, field))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let (traj, exit) = match geodesic_integrate(&spec, &z0, dt, steps) {
        Ok(t) => (t, None),
        Err(DynamicsError::DomainExit {
            step,
            reason,
            partial,
        }) => (
            *partial,
            Some(format!("left the chart domain at step {step}: {reason}")),
        ),
        Err(e) => return Err(usage(e)),
    };
    let drifts = quantities
        .iter()
        .map(|q| conservation_monitor(&traj, q))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let sidecar = traj.sidecar_json(&drifts);
    match out {
        Some(path) => {
            emit(Some(path), &traj.to_csv())?;
            emit(Some(&sidecar_path(path)), &sidecar)?;
        }
        None => emit(None, &sidecar)?,
    }
    if let Some(msg) = exit {
        return Err(Outcome::Fail(msg));
    }
    if let Some(tol) = tol {
        if let Some(d) = drifts.iter().find(|d| d.max_rel > tol) {
            return Err(Outcome::Fail(format!(
                "{} drifted by {:e} (relative), above {tol:e}",
                d.quantity, d.max_rel
            )));
        }
    }
    Ok(())
}

/// Uniform phase points in `[-1, 1]^6`.
pub fn phase_samples(seed: u64, count: usize) -> Vec<PhasePoint> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            PhasePoint::from_slice(&sampling::uniform_box(&mut rng, 6, 1.0)).expect("even length")
        })
        .collect()
}

fn multipole(
    samples: usize,
    seed: u64,
    expectations: Option<&Path>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Outcome> {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let table = match expectations {
        Some(path) => Expectations::from_json_str(&read_file(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => Expectations::shipped(),
    };
    let report = identity_suite(&phase_samples(seed, samples));
    let text = match format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
    };
    emit(out, &text)?;
    let mismatches = table.compare(&report);
    if mismatches.is_empty() {
        Ok(())
    } else {
        let ids: Vec<&str> = mismatches.iter().map(|m| m.id.as_str()).collect();
        Err(Outcome::Fail(format!(
            "verdicts differ from the expectation table for: {}",
            ids.join(", ")
        )))
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("KYANO_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        // a pool configured earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Parses `args` (including the program name) and runs the command; returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::VerifyKy {
            manifold,
            field,
            samples,
            seed,
            tol,
            out,
            format,
        } => verify_ky(
            &manifold,
            &field,
            samples,
            seed,
            tol,
            out.as_deref(),
            format,
        ),
        Command::Geodesic {
            manifold,
            x,
            p,
            dt,
            steps,
            monitor,
            field,
            tol,
            out,
        } => geodesic(
            &manifold,
            x,
            p,
            dt,
            steps,
            &monitor,
            field.as_deref(),
            tol,
            out.as_deref(),
        ),
        Command::Multipole {
            samples,
            seed,
            expectations,
            out,
            format,
        } => multipole(
            samples,
            seed,
            expectations.as_deref(),
            out.as_deref(),
            format,
        ),
        Command::Report {
            samples,
            seed,
            skip,
            out,
        } => {
            if samples == 0 {
                Err(usage("--samples must be at least 1"))
            } else {
                let doc = run_report(&ReportOptions {
                    seed,
                    multipole_samples: samples,
                    skip,
                });
                emit(out.as_deref(), &crate::io::to_json_string(&doc)).and_then(|_| {
                    if doc.passed {
                        Ok(())
                    } else {
                        Err(Outcome::Fail(format!(
                            "required sections failed: {}",
                            doc.failed_sections().join(", ")
                        )))
                    }
                })
            }
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Outcome::Fail(msg)) => {
            eprintln!("kyano: {msg}");
            EXIT_FAIL
        }
        Err(Outcome::Usage(msg)) => {
            eprintln!("kyano: error: {msg}");
            EXIT_USAGE
        }
    }
}
