use serde::Serialize;

use super::{CurvatureChart, GeometryError, MetricKind};
use crate::expr::{Expr, Node, Vars};

/// Coefficient `c^2` of the `V^-1 (dpsi + cos(theta) dphi)^2` fiber term.
///
/// The two-forms `f_i = 4m (dpsi + cos(theta) dphi) ^ dx_i - eps_ijk V dx_j ^ dx_k`
/// are covariant constant for `c^2 = 4 m^2` only; `16 m^2` is kept so the
/// check can be rerun against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TaubNutNormalization {
    #[default]
    #[serde(rename = "4m^2")]
    FourMSquared,
    #[serde(rename = "16m^2")]
    SixteenMSquared,
}

impl TaubNutNormalization {
    pub fn fiber_coefficient(self, m: f64) -> f64 {
        match self {
            TaubNutNormalization::FourMSquared => 4.0 * m * m,
            TaubNutNormalization::SixteenMSquared => 16.0 * m * m,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TaubNutNormalization::FourMSquared => "4m^2",
            TaubNutNormalization::SixteenMSquared => "16m^2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "4m^2" | "4m2" => Some(TaubNutNormalization::FourMSquared),
            "16m^2" | "16m2" => Some(TaubNutNormalization::SixteenMSquared),
            _ => None,
        }
    }
}

/// `(1 + K r^2 / 4)` with `r^2` taken from the chart.
pub(crate) fn conformal_base(k: f64, chart: CurvatureChart) -> Node {
    let r2 = match chart {
        CurvatureChart::Cartesian => (0..3)
            .map(|i| Node::var(i).powi(2))
            .reduce(|a, b| a + b)
            .expect("three terms"),
        CurvatureChart::Spherical => Node::var(0).powi(2),
    };
    Node::num(1.0) + Node::num(k / 4.0) * r2
}

pub(super) fn components(kind: &MetricKind) -> Result<Vec<Expr>, GeometryError> {
    let (n, full): (usize, Box<dyn Fn(usize, usize) -> Node>) = match kind {
        MetricKind::Flat { dim } => {
            if *dim == 0 {
                return Err(GeometryError::Invalid("flat metric needs dim >= 1".into()));
            }
            (
                *dim,
                Box::new(|i, j| Node::num(if i == j { 1.0 } else { 0.0 })),
            )
        }
        MetricKind::ConstCurvature3 { k, chart } => {
            if !k.is_finite() {
                return Err(GeometryError::Invalid("curvature must be finite".into()));
            }
            let (k, chart) = (*k, *chart);
            (
                3,
                Box::new(move |i, j| {
                    if i != j {
                        return Node::num(0.0);
                    }
                    let omega2 = conformal_base(k, chart).powi(-2);
                    match (chart, i) {
                        (CurvatureChart::Cartesian, _) | (CurvatureChart::Spherical, 0) => omega2,
                        (CurvatureChart::Spherical, 1) => omega2 * Node::var(0).powi(2),
                        _ => omega2 * Node::var(0).powi(2) * Node::var(1).sin().powi(2),
                    }
                }),
            )
        }
        MetricKind::TaubNut { m, normalization } => {
            if !(m.is_finite() && *m > 0.0) {
                return Err(GeometryError::Invalid(format!(
                    "Taub-NUT mass parameter must be positive, got {m}"
                )));
            }
            let (m, c2) = (*m, normalization.fiber_coefficient(*m));
            (
                4,
                Box::new(move |i, j| {
                    let v = || Node::num(1.0) + Node::num(2.0 * m) / Node::var(0);
                    let r2 = || Node::var(0).powi(2);
                    let cos = || Node::var(1).cos();
                    let fiber = || Node::num(c2) / v();
                    match (i, j) {
                        (0, 0) => v(),
                        (1, 1) => v() * r2(),
                        (2, 2) => v() * r2() * Node::var(1).sin().powi(2) + fiber() * cos().powi(2),
                        (2, 3) | (3, 2) => fiber() * cos(),
                        (3, 3) => fiber(),
                        _ => Node::num(0.0),
                    }
                }),
            )
        }
        MetricKind::Custom { .. } => {
            return Err(GeometryError::Invalid(
                "custom metrics carry their own components".into(),
            ))
        }
    };
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(Expr::new(full(i, j), Vars::Coords(n))?);
        }
    }
    Ok(out)
}
