//! The aggregated `kyano report` document.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::expr::{parse_expression, Expr};
use crate::geometry::{
    curvature_at, dual_metric, ChartRole, CurvatureChart, MetricSpec, TaubNutNormalization,
};
use crate::kysym::{
    constcurv_printed_field, flat_ky_field, flat_ky_pair, ky_report, ky_residual, ky_solve_ansatz,
    reconstruct_momentum, reconstruct_position, taubnut_field, KyTolerances, SolverOptions,
};
use crate::multipole::{identity_suite, Expectations};
use crate::sampling;
use crate::tensor::max_abs;

pub const SECTIONS: [&str; 6] = [
    "flat-ky",
    "taub-nut",
    "const-curvature",
    "constcurv-printed",
    "ansatz",
    "multipole",
];

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub seed: u64,
    pub multipole_samples: usize,
    pub skip: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Recorded for inspection; no pass criterion.
    Measured,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub required: bool,
    pub status: Status,
    pub data: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub version: &'static str,
    pub generator: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub sections: Vec<Section>,
}

impl ReportDocument {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn failed_sections(&self) -> Vec<&'static str> {
        self.sections
            .iter()
            .filter(|s| s.required && s.status == Status::Fail)
            .map(|s| s.name)
            .collect()
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn error_section(name: &'static str, required: bool, err: impl std::fmt::Display) -> Section {
    Section {
        name,
        required,
        status: Status::Fail,
        data: json!({ "error": err.to_string() }),
    }
}

fn flat_ky(seed: u64) -> Section {
    const KY_TOL: f64 = 1e-12;
    const ROUND_TRIP_TOL: f64 = 1e-15;
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 3..=6 {
        let spec = MetricSpec::flat(n);
        let mut rng = sampling::rng(seed.wrapping_add(n as u64));
        let points: Vec<Vec<f64>> = (0..100)
            .map(|_| sampling::uniform_box(&mut rng, n, 1.0))
            .collect();
        let tol = KyTolerances {
            ky: KY_TOL,
            ..KyTolerances::default()
        };
        let x_report = ky_report(&spec, &flat_ky_field(n, ChartRole::Position), &points, tol);
        let p_report = ky_report(
            &dual_metric(&spec),
            &flat_ky_field(n, ChartRole::Momentum),
            &points,
            tol,
        );
        let (x_report, p_report) = match (x_report, p_report) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return error_section("flat-ky", true, e),
        };
        let mut round_trip: f64 = 0.0;
        for _ in 0..100 {
            let x = sampling::uniform_box(&mut rng, n, 1.0);
            let p = sampling::uniform_box(&mut rng, n, 1.0);
            let (f, ft) = flat_ky_pair(n, &x, &p).expect("matching lengths");
            let xr = reconstruct_position(&f).expect("antisymmetric");
            let pr = reconstruct_momentum(&ft).expect("antisymmetric");
            for (a, b) in x.iter().zip(&xr).chain(p.iter().zip(&pr)) {
                round_trip = round_trip.max((a - b).abs());
            }
        }
        let pass = x_report.max_ky_residual <= KY_TOL
            && p_report.max_ky_residual <= KY_TOL
            && round_trip <= ROUND_TRIP_TOL;
        ok &= pass;
        rows.push(json!({
            "n": n,
            "rank": n - 1,
            "samples": points.len(),
            "max_ky_residual_position": x_report.max_ky_residual,
            "max_ky_residual_momentum": p_report.max_ky_residual,
            "max_round_trip_error": round_trip,
            "pass": pass,
        }));
    }
    Section {
        name: "flat-ky",
        required: true,
        status: status(ok),
        data: json!({ "ky_tolerance": KY_TOL, "round_trip_tolerance": ROUND_TRIP_TOL, "dimensions": rows }),
    }
}

fn taub_nut(seed: u64) -> Section {
    const DET_MIN: f64 = 1e-6;
    let m = 1.0;
    let validated = TaubNutNormalization::default();
    let alternate = TaubNutNormalization::SixteenMSquared;
    let (spec, alt) = match (
        MetricSpec::taub_nut_with(m, validated),
        MetricSpec::taub_nut_with(m, alternate),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return error_section("taub-nut", true, e),
    };
    let points = sampling::regular_points(&spec, &mut sampling::rng(seed), 20);
    let mut rows = Vec::new();
    let mut ok = true;
    for i in 1..=3 {
        let field = match taubnut_field(i, m, ChartRole::Position) {
            Ok(f) => f,
            Err(e) => return error_section("taub-nut", true, e),
        };
        let (r, r_alt) = match (
            ky_report(&spec, &field, &points, KyTolerances::default()),
            ky_report(&alt, &field, &points, KyTolerances::default()),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return error_section("taub-nut", true, e),
        };
        let min_det = r
            .determinants
            .as_ref()
            .map(|d| d.iter().fold(f64::INFINITY, |a, v| a.min(v.abs())))
            .unwrap_or(0.0);
        let pass = r.is_covariant_constant && min_det > DET_MIN;
        ok &= pass;
        rows.push(json!({
            "field": i,
            "max_covariant_constancy_residual": r.max_covariant_constancy_residual,
            "max_ky_residual": r.max_ky_residual,
            "min_abs_det": min_det,
            "alternate_max_covariant_constancy_residual": r_alt.max_covariant_constancy_residual,
            "pass": pass,
        }));
    }
    Section {
        name: "taub-nut",
        required: true,
        status: status(ok),
        data: json!({
            "m": m,
            "samples": points.len(),
            "validated_normalization": validated.name(),
            "alternate_normalization": alternate.name(),
            "covariant_constancy_tolerance": KyTolerances::default().covariant_constancy,
            "min_abs_det_required": DET_MIN,
            "fields": rows,
        }),
    }
}

fn const_curvature(seed: u64) -> Section {
    const TOL: f64 = 1e-6;
    let mut rows = Vec::new();
    let mut ok = true;
    for k in [-1.0, 0.5, 1.0] {
        let spec = MetricSpec::const_curvature3(k);
        let points = sampling::regular_points(&spec, &mut sampling::rng(seed), 50);
        let scalars: Result<Vec<f64>, _> = points
            .iter()
            .map(|p| curvature_at(&spec, p).map(|c| c.scalar))
            .collect();
        let scalars = match scalars {
            Ok(s) => s,
            Err(e) => return error_section("const-curvature", true, e),
        };
        let min = scalars.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scalars.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let dev = scalars
            .iter()
            .fold(0.0f64, |a, s| a.max((s - 6.0 * k).abs()));
        let pass = max - min <= TOL && dev <= TOL;
        ok &= pass;
        rows.push(json!({
            "K": k,
            "samples": points.len(),
            "scalar_min": min,
            "scalar_max": max,
            "expected": 6.0 * k,
            "max_deviation": dev,
            "pass": pass,
        }));
    }
    Section {
        name: "const-curvature",
        required: true,
        status: status(ok),
        data: json!({ "tolerance": TOL, "curvatures": rows }),
    }
}

fn constcurv_printed(seed: u64) -> Section {
    let mut rows = Vec::new();
    for k in [-1.0, 0.5, 1.0] {
        let spec = MetricSpec::const_curvature3_in(k, CurvatureChart::Spherical);
        let points = sampling::regular_points(&spec, &mut sampling::rng(seed), 20);
        let x = ky_report(
            &spec,
            &constcurv_printed_field(k, ChartRole::Position),
            &points,
            KyTolerances::default(),
        );
        let p = ky_report(
            &dual_metric(&spec),
            &constcurv_printed_field(k, ChartRole::Momentum),
            &points,
            KyTolerances::default(),
        );
        match (x, p) {
            (Ok(x), Ok(p)) => rows.push(json!({
                "K": k,
                "samples": points.len(),
                "position_max_ky_residual": x.max_ky_residual,
                "position_is_ky": x.is_ky,
                "momentum_max_ky_residual": p.max_ky_residual,
                "momentum_is_ky": p.is_ky,
            })),
            (Err(e), _) | (_, Err(e)) => return error_section("constcurv-printed", false, e),
        }
    }
    Section {
        name: "constcurv-printed",
        required: false,
        status: Status::Measured,
        data: json!({ "chart": "spherical", "curvatures": rows }),
    }
}

fn parse_basis(src: &[String], n: usize) -> Vec<Expr> {
    src.iter()
        .map(|s| parse_expression(s, n).expect("catalog basis parses"))
        .collect()
}

/// `(1 + K r^2/4)^-3` times every monomial of degree at most two.
pub fn constcurv_basis(k: f64) -> Vec<String> {
    let mut monomials = vec!["1".to_string()];
    for i in 1..=3 {
        monomials.push(format!("x{i}"));
    }
    for i in 1..=3 {
        for j in i..=3 {
            monomials.push(format!("x{i}*x{j}"));
        }
    }
    let omega = format!("(1 + {k}*(x1^2 + x2^2 + x3^2)/4)");
    monomials
        .into_iter()
        .map(|m| format!("{m} / {omega}^3"))
        .collect()
}

/// Label, manifold, basis, sample count, expected dimension.
type AnsatzCase = (&'static str, MetricSpec, Vec<String>, usize, Option<usize>);

fn ansatz(seed: u64) -> Section {
    const FRESH_TOL: f64 = 1e-10;
    let cases: [AnsatzCase; 3] = [
        (
            "flat3-linear",
            MetricSpec::flat(3),
            ["1", "x1", "x2", "x3"].map(String::from).to_vec(),
            12,
            Some(4),
        ),
        (
            "flat2-constant",
            MetricSpec::flat(2),
            vec!["1".to_string()],
            4,
            Some(1),
        ),
        (
            "const-curvature-1",
            MetricSpec::const_curvature3(1.0),
            constcurv_basis(1.0),
            20,
            None,
        ),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (label, spec, src, samples, expected) in cases {
        let basis = parse_basis(&src, spec.dim());
        let mut dims = Vec::new();
        let mut fresh_max: f64 = 0.0;
        for s in [seed, seed.wrapping_add(1)] {
            let pts = sampling::regular_points(&spec, &mut sampling::rng(s), samples);
            let sol = match ky_solve_ansatz(&spec, &basis, &pts, SolverOptions::default()) {
                Ok(sol) => sol,
                Err(e) => return error_section("ansatz", true, e),
            };
            dims.push(sol.dimension);
            let fresh =
                sampling::regular_points(&spec, &mut sampling::rng(s.wrapping_add(1000)), 50);
            for f in &sol.fields {
                for p in &fresh {
                    match ky_residual(&spec, f, p) {
                        Ok(r) => fresh_max = fresh_max.max(max_abs(&r)),
                        Err(e) => return error_section("ansatz", true, e),
                    }
                }
            }
        }
        let stable = dims.windows(2).all(|w| w[0] == w[1]);
        let pass = stable && fresh_max <= FRESH_TOL && expected.is_none_or(|e| dims[0] == e);
        ok &= pass;
        rows.push(json!({
            "case": label,
            "manifold": spec.label(),
            "basis": src,
            "samples": samples,
            "dimension": dims[0],
            "dimension_per_seed": dims,
            "expected_dimension": expected,
            "max_fresh_ky_residual": fresh_max,
            "pass": pass,
        }));
    }
    Section {
        name: "ansatz",
        required: true,
        status: status(ok),
        data: json!({ "fresh_point_tolerance": FRESH_TOL, "cases": rows }),
    }
}

fn multipole(seed: u64, samples: usize) -> Section {
    let points = super::phase_samples(seed, samples);
    let report = identity_suite(&points);
    let mismatches = Expectations::shipped().compare(&report);
    let report_value: Value = serde_json::to_value(&report).expect("report serializes");
    Section {
        name: "multipole",
        required: true,
        status: status(mismatches.is_empty()),
        data: json!({ "mismatches": mismatches, "report": report_value }),
    }
}

/// Runs every section not listed in `skip`. Sections are independent and run
/// in parallel; their order in the document is fixed.
pub fn run_report(options: &ReportOptions) -> ReportDocument {
    let sections: Vec<Section> = SECTIONS
        .par_iter()
        .map(|&name| {
            if options.skip.iter().any(|s| s == name) {
                return Section {
                    name,
                    required: name != "constcurv-printed",
                    status: Status::Skipped,
                    data: Value::Null,
                };
            }
            match name {
                "flat-ky" => flat_ky(options.seed),
                "taub-nut" => taub_nut(options.seed),
                "const-curvature" => const_curvature(options.seed),
                "constcurv-printed" => constcurv_printed(options.seed),
                "ansatz" => ansatz(options.seed),
                "multipole" => multipole(options.seed, options.multipole_samples),
                _ => unreachable!("unknown section {name}"),
            }
        })
        .collect();
    let passed = !sections
        .iter()
        .any(|s| s.required && s.status == Status::Fail);
    ReportDocument {
        schema: crate::SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        generator: sampling::GENERATOR,
        seed: options.seed,
        passed,
        sections,
    }
}
