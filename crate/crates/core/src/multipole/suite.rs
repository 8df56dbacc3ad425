//! Numeric adjudication of the multipole identities.
//!
//! Each row compares two tensors at every sample and keeps the max-norm
//! residual. Printed forms are always evaluated as written; corrected forms
//! sit in their own rows and are marked as such.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{conformal, eps_expand, evaluate_multipoles, runge_lenz, KyPair, MultipoleSet};
use crate::dynamics::PhasePoint;
use crate::io::format_f64;

/// Max-norm gate for `holds`.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    HoldsAfterCorrection,
    NotEvaluable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::HoldsAfterCorrection => "holds-after-correction",
            Verdict::NotEvaluable => "not-evaluable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub id: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// `None` for rows that cannot be evaluated.
    pub residual: Option<f64>,
    pub verdict: Verdict,
    /// Row holding the corrected form, when one exists.
    pub corrected_by: Option<&'static str>,
}

/// Least-squares fit of `a (f f)_ij + b d_ij f^2` to the direct quadrupole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrupoleFit {
    pub a: f64,
    pub b: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub schema: &'static str,
    pub samples: usize,
    pub tolerance: f64,
    pub quadrupole_fit: Option<QuadrupoleFit>,
    pub identities: Vec<IdentityRow>,
}

enum Kind {
    Plain,
    Corrected,
}

struct Identity {
    id: &'static str,
    name: &'static str,
    anchor: &'static str,
    lhs: &'static str,
    rhs: &'static str,
    kind: Kind,
    corrected_by: Option<&'static str>,
    eval: fn(&Sample) -> f64,
}

struct Sample {
    x: Vector3<f64>,
    p: Vector3<f64>,
    ky: KyPair,
    m: MultipoleSet,
}

fn vmax(v: Vector3<f64>) -> f64 {
    v.abs().max()
}

fn mmax(m: Matrix3<f64>) -> f64 {
    m.abs().max()
}

/// `-eps_ijk v_i` as a matrix in `(j, k)`.
fn neg_eps(v: Vector3<f64>) -> Matrix3<f64> {
    -eps_expand(&v)
}

/// `2 A~ + C` with both generators in Killing-Yano form.
fn tilde_pairing(s: &Sample) -> Vector3<f64> {
    2.0 * s.m.a_tilde_ky + s.m.c_ky
}

/// `2 A + C~`, direct forms.
fn plain_pairing(s: &Sample) -> Vector3<f64> {
    2.0 * runge_lenz(&s.x, &s.p) + conformal(&s.p, &s.x)
}

const IDENTITIES: &[Identity] = &[
    Identity {
        id: "1a",
        name: "radius squared",
        anchor: "square of the radius",
        lhs: "r^2",
        rhs: "1/2 f^2",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| (s.x.norm_squared() - s.m.r2_ky).abs(),
    },
    Identity {
        id: "1b",
        name: "impulse squared",
        anchor: "square of the impulse",
        lhs: "p^2",
        rhs: "1/2 f~^2",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| (s.p.norm_squared() - s.m.p2_ky).abs(),
    },
    Identity {
        id: "2",
        name: "magnetic dipole",
        anchor: "magnetic dipole tensor",
        lhs: "L_i",
        rhs: "1/2 eps_klm f_ki f~_lm",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(s.m.l - s.m.mu_ky),
    },
    Identity {
        id: "3",
        name: "dilatation",
        anchor: "dilatation",
        lhs: "x.p",
        rhs: "1/2 f_ij f~_ij",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| (s.m.dilatation - s.m.dilatation_ky).abs(),
    },
    Identity {
        id: "4",
        name: "quadrupole (printed)",
        anchor: "quadrupole mass-inertia tensor",
        lhs: "x_i x_j - 1/3 r^2 d_ij",
        rhs: "1/4 (f_im f_mj - 1/3 d_ij f^2)",
        kind: Kind::Plain,
        corrected_by: Some("5"),
        eval: |s| mmax(s.m.q_direct - s.m.q_ky_paper),
    },
    Identity {
        id: "5",
        name: "quadrupole (corrected)",
        anchor: "quadrupole mass-inertia tensor",
        lhs: "x_i x_j - 1/3 r^2 d_ij",
        rhs: "f_im f_mj + 1/3 d_ij f^2",
        kind: Kind::Corrected,
        corrected_by: None,
        eval: |s| mmax(s.m.q_direct - s.m.q_ky_corrected),
    },
    Identity {
        id: "6",
        name: "toroid dipole",
        anchor: "poloidal currents on a torus",
        lhs: "1/10 (x_i D - 2 r^2 p_i)",
        rhs: "1/40 eps_ijk (f_jk f.f~ - 2 f~_jk f^2)",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(s.m.t_dipole_direct - s.m.t_dipole_ky),
    },
    Identity {
        id: "7",
        name: "toroid dipole (transversal)",
        anchor: "purely transversal velocity fields",
        lhs: "1/2 x_i D",
        rhs: "1/8 eps_ijk f_jk f.f~",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(0.5 * s.x * s.m.dilatation - s.m.t_dipole_transversal),
    },
    Identity {
        id: "8",
        name: "conformal operator",
        anchor: "conformal operator",
        lhs: "2 x_i D - r^2 p_i",
        rhs: "1/4 eps_ijk (2 f_jk f.f~ - f~_jk f^2)",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(s.m.c - s.m.c_ky),
    },
    Identity {
        id: "9",
        name: "conjugate Runge-Lenz vector",
        anchor: "momentum conjugate",
        lhs: "1/2 p_i r^2 - x_i D - 1/2 p_i",
        rhs: "1/8 eps_ijk ((f^2 - 2) f~_jk - 2 f_jk f.f~)",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(s.m.a_tilde_swap - s.m.a_tilde_ky),
    },
    Identity {
        id: "10a",
        name: "f from generators (printed)",
        anchor: "Killing-Yano tensors from generators",
        lhs: "f_jk",
        rhs: "-eps_ijk (2 A~_i + C_i)",
        kind: Kind::Plain,
        corrected_by: Some("10c"),
        eval: |s| mmax(s.ky.f - neg_eps(tilde_pairing(s))),
    },
    Identity {
        id: "10b",
        name: "f~ from generators (printed)",
        anchor: "Killing-Yano tensors from generators",
        lhs: "f~_jk",
        rhs: "-eps_ijk (2 A_i + C~_i)",
        kind: Kind::Plain,
        corrected_by: Some("10d"),
        eval: |s| mmax(s.ky.f_tilde - neg_eps(plain_pairing(s))),
    },
    Identity {
        id: "10c",
        name: "f from generators (swapped)",
        anchor: "Killing-Yano tensors from generators",
        lhs: "f_jk",
        rhs: "-eps_ijk (2 A_i + C~_i)",
        kind: Kind::Corrected,
        corrected_by: None,
        eval: |s| mmax(s.ky.f - neg_eps(plain_pairing(s))),
    },
    Identity {
        id: "10d",
        name: "f~ from generators (swapped)",
        anchor: "Killing-Yano tensors from generators",
        lhs: "f~_jk",
        rhs: "-eps_ijk (2 A~_i + C_i)",
        kind: Kind::Corrected,
        corrected_by: None,
        eval: |s| mmax(s.ky.f_tilde - neg_eps(tilde_pairing(s))),
    },
    Identity {
        id: "11a",
        name: "toroid dipole from generators",
        anchor: "symmetry generators in the phase-space",
        lhs: "1/10 (x_i D - 2 r^2 p_i)",
        rhs: "(2 A~_i + C_i) D",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(s.m.t_dipole_direct - tilde_pairing(s) * s.m.dilatation),
    },
    Identity {
        id: "11b",
        name: "transversal toroid dipole from generators",
        anchor: "symmetry generators in the phase-space",
        lhs: "1/2 x_i D",
        rhs: "(2 A~_i + C_i) D",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(0.5 * s.x * s.m.dilatation - tilde_pairing(s) * s.m.dilatation),
    },
    Identity {
        id: "11c",
        name: "transversal toroid dipole from swapped generators",
        anchor: "symmetry generators in the phase-space",
        lhs: "1/2 x_i D",
        rhs: "(2 A_i + C~_i) D",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| vmax(0.5 * s.x * s.m.dilatation - plain_pairing(s) * s.m.dilatation),
    },
    Identity {
        id: "12",
        name: "magnetic quadrupole",
        anchor: "magnetic quadrupole tensor",
        lhs: "1/3 (x_i L_j + x_j L_i)",
        rhs: "-1/3 (f_ik f_kl f~_lj + f_jk f_kl f~_li)",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| mmax(s.m.mu_quad_direct - s.m.mu_quad_ky),
    },
    Identity {
        id: "13a",
        name: "transversal toroid quadrupole (1/3 trace)",
        anchor: "toroid quadrupole tensor",
        lhs: "Q_ij D",
        rhs: "1/8 (f_im f_mj - 1/3 d_ij f^2) f.f~",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| mmax(s.m.q_direct * s.m.dilatation - s.m.t_quad_transversal),
    },
    Identity {
        id: "13b",
        name: "toroid quadrupole (1/4 trace)",
        anchor: "toroid quadrupole tensor",
        lhs: "Q_ij D",
        rhs: "(f_im f_mj - 1/4 d_ij f^2) f.f~ - 5/2 f_im f~_mj f^2",
        kind: Kind::Plain,
        corrected_by: None,
        eval: |s| mmax(s.m.q_direct * s.m.dilatation - s.m.t_quad_ky),
    },
    Identity {
        id: "14",
        name: "printed quadrupole trace",
        anchor: "quadrupole mass-inertia tensor",
        lhs: "tr 1/4 (f_im f_mj - 1/3 d_ij f^2)",
        rhs: "0",
        kind: Kind::Plain,
        corrected_by: Some("5"),
        eval: |s| s.m.q_ky_paper.trace().abs(),
    },
];

fn octupole_row() -> IdentityRow {
    IdentityRow {
        id: "oct",
        name: "charge octupole",
        anchor: "charge octupole tensor",
        lhs: "x_i x_j x_k - r^2/5 (x_i d_jk + x_j d_ik + x_k d_ij)",
        rhs: "index-inconsistent (free m, n on the right-hand side), not evaluable",
        residual: None,
        verdict: Verdict::NotEvaluable,
        corrected_by: None,
    }
}

fn sample(z: &PhasePoint) -> Sample {
    Sample {
        x: Vector3::new(z.x[0], z.x[1], z.x[2]),
        p: Vector3::new(z.p[0], z.p[1], z.p[2]),
        ky: KyPair::at(z),
        m: evaluate_multipoles(z),
    }
}

/// Least-squares coefficients of `a (f f) + b d f^2` against `Q_direct`.
pub fn fit_quadrupole(points: &[PhasePoint]) -> Option<QuadrupoleFit> {
    if points.is_empty() {
        return None;
    }
    let rows = 9 * points.len();
    let mut design = DMatrix::zeros(rows, 2);
    let mut target = DVector::zeros(rows);
    for (k, z) in points.iter().enumerate() {
        let s = sample(z);
        let ff = s.ky.f * s.ky.f;
        let f2 = s.ky.f2();
        for i in 0..3 {
            for j in 0..3 {
                let r = 9 * k + 3 * i + j;
                design[(r, 0)] = ff[(i, j)];
                design[(r, 1)] = if i == j { f2 } else { 0.0 };
                target[r] = s.m.q_direct[(i, j)];
            }
        }
    }
    let coef = design.clone().svd(true, true).solve(&target, 1e-14).ok()?;
    let resid = (&design * &coef - &target).abs().max();
    Some(QuadrupoleFit {
        a: coef[0],
        b: coef[1],
        max_residual: resid,
    })
}

/// Evaluates every identity at every sample, in parallel, keeping maxima.
pub fn identity_suite(points: &[PhasePoint]) -> IdentityReport {
    let per_point = |z: &PhasePoint| {
        let s = sample(z);
        IDENTITIES
            .iter()
            .map(|id| (id.eval)(&s))
            .collect::<Vec<f64>>()
    };
    let maxima = points.par_iter().map(per_point).reduce(
        || vec![0.0; IDENTITIES.len()],
        |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
    );
    let mut rows: Vec<IdentityRow> = IDENTITIES
        .iter()
        .zip(maxima)
        .map(|(id, r)| {
            let verdict = match (r <= IDENTITY_TOLERANCE && !points.is_empty(), &id.kind) {
                (true, Kind::Plain) => Verdict::Holds,
                (true, Kind::Corrected) => Verdict::HoldsAfterCorrection,
                (false, _) => Verdict::Fails,
            };
            IdentityRow {
                id: id.id,
                name: id.name,
                anchor: id.anchor,
                lhs: id.lhs,
                rhs: id.rhs,
                residual: Some(r),
                verdict,
                corrected_by: id.corrected_by.filter(|_| verdict == Verdict::Fails),
            }
        })
        .collect();
    rows.push(octupole_row());
    IdentityReport {
        schema: crate::SCHEMA,
        samples: points.len(),
        tolerance: IDENTITY_TOLERANCE,
        quadrupole_fit: fit_quadrupole(points),
        identities: rows,
    }
}

impl IdentityReport {
    pub fn row(&self, id: &str) -> Option<&IdentityRow> {
        self.identities.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json_string(self)
    }

    /// Columns: identity, anchor, residual, verdict.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<5} {:<50} {:<38} {:>11}  verdict",
            "id", "identity", "anchor", "residual"
        );
        for r in &self.identities {
            let res = r
                .residual
                .map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
            let mut verdict = r.verdict.name().to_string();
            if let Some(c) = r.corrected_by {
                let _ = write!(verdict, " (see {c})");
            }
            let _ = writeln!(
                out,
                "{:<5} {:<50} {:<38} {:>11}  {}",
                r.id, r.name, r.anchor, res, verdict
            );
        }
        if let Some(fit) = &self.quadrupole_fit {
            let _ = writeln!(
                out,
                "quadrupole fit: a = {:.12}, b = {:.12}, max residual {:.3e}",
                fit.a, fit.b, fit.max_residual
            );
        }
        out
    }

    /// `id,name,anchor,lhs,rhs,residual,verdict,corrected_by`
    pub fn to_csv(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        let mut out = String::from("id,name,anchor,lhs,rhs,residual,verdict,corrected_by\n");
        for r in &self.identities {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.id,
                quote(r.name),
                quote(r.anchor),
                quote(r.lhs),
                quote(r.rhs),
                r.residual.map(format_f64).unwrap_or_default(),
                r.verdict.name(),
                r.corrected_by.unwrap_or("")
            );
        }
        out
    }
}

/// Verdict each identity is expected to reach; used as a regression table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub schema: String,
    pub verdicts: BTreeMap<String, Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub id: String,
    pub expected: Option<Verdict>,
    pub actual: Option<Verdict>,
}

impl Expectations {
    pub fn shipped() -> Self {
        serde_json::from_str(include_str!("../../data/multipole_expectations.json"))
            .expect("shipped expectation table parses")
    }

    pub fn from_json_str(source: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(source)
    }

    /// Every identity whose verdict differs from the table, plus ids present on
    /// one side only.
    pub fn compare(&self, report: &IdentityReport) -> Vec<Mismatch> {
        let actual: BTreeMap<&str, Verdict> = report
            .identities
            .iter()
            .map(|r| (r.id, r.verdict))
            .collect();
        let mut out = Vec::new();
        for (id, v) in &self.verdicts {
            let got = actual.get(id.as_str()).copied();
            if got != Some(*v) {
                out.push(Mismatch {
                    id: id.clone(),
                    expected: Some(*v),
                    actual: got,
                });
            }
        }
        for (id, v) in actual {
            if !self.verdicts.contains_key(id) {
                out.push(Mismatch {
                    id: id.to_string(),
                    expected: None,
                    actual: Some(v),
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn points(seed: u64, count: usize) -> Vec<PhasePoint> {
        let mut rng = sampling::rng(seed);
        (0..count)
            .map(|_| PhasePoint::from_slice(&sampling::uniform_box(&mut rng, 6, 1.0)).unwrap())
            .collect()
    }

    #[test]
    fn quadrupole_fit_recovers_corrected_coefficients() {
        let fit = fit_quadrupole(&points(1, 200)).unwrap();
        assert!((fit.a - 1.0).abs() <= 1e-10, "{fit:?}");
        assert!((fit.b - 1.0 / 3.0).abs() <= 1e-10, "{fit:?}");
        assert!(fit.max_residual <= 1e-10);
    }

    #[test]
    fn suite_matches_shipped_table() {
        let report = identity_suite(&points(42, 300));
        let mismatches = Expectations::shipped().compare(&report);
        assert!(
            mismatches.is_empty(),
            "{mismatches:?}\n{}",
            report.to_table()
        );
        assert_eq!(report.row("4").unwrap().corrected_by, Some("5"));
        assert_eq!(report.row("oct").unwrap().residual, None);
    }

    #[test]
    fn printed_trace_equals_minus_r_squared() {
        let s = sample(&PhasePoint::new(vec![0.3, -0.4, 1.2], vec![0.0; 3]).unwrap());
        assert!((s.m.q_ky_paper.trace() + s.x.norm_squared()).abs() < 1e-14);
    }

    #[test]
    fn empty_sample_set_fails_everything() {
        let report = identity_suite(&[]);
        assert!(report
            .identities
            .iter()
            .all(|r| matches!(r.verdict, Verdict::Fails | Verdict::NotEvaluable)));
        assert!(report.quadrupole_fit.is_none());
    }

    #[test]
    fn table_and_csv_list_every_row() {
        let report = identity_suite(&points(3, 10));
        let n = report.identities.len();
        assert_eq!(report.to_csv().lines().count(), n + 1);
        assert!(report.to_table().contains("not-evaluable"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["identities"].as_array().unwrap().len(), n);
    }

    #[test]
    fn comparison_reports_unknown_ids() {
        let report = identity_suite(&points(3, 5));
        let mut table = Expectations::shipped();
        table.verdicts.remove("1a");
        table.verdicts.insert("99".into(), Verdict::Holds);
        let m = table.compare(&report);
        assert_eq!(m.len(), 2);
    }
}
