//! Metrics on coordinate charts, their Levi-Civita connection and curvature.
//!
//! Every metric, catalog or custom, is stored as a symmetric matrix of
//! [`Expr`] components. Derivatives of the metric come from second-order dual
//! numbers, so Christoffel symbols and curvature carry no truncation error.

mod catalog;
mod connection;
pub mod file;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::{Expr, ExprError};

pub use catalog::TaubNutNormalization;
pub use connection::{
    christoffel_at, covariant_derivative, covariant_derivative_2form, curvature_at,
    metric_covariant_derivative, Christoffel, Connection, Curvature,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("point outside the chart domain: {0}")]
    Domain(String),
    #[error("metric is singular at this point (det = {det:e})")]
    SingularMetric { det: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid metric: {0}")]
    Invalid(String),
}

/// Whether chart variables are read as positions or as momenta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartRole {
    Position,
    Momentum,
}

impl ChartRole {
    pub fn flipped(self) -> Self {
        match self {
            ChartRole::Position => ChartRole::Momentum,
            ChartRole::Momentum => ChartRole::Position,
        }
    }
}

/// Coordinates used by the constant-curvature catalog metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureChart {
    /// `(q1, q2, q3)`
    Cartesian,
    /// `(r, theta, phi)`
    Spherical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Flat {
        dim: usize,
    },
    /// `ds^2 = (1 + K r^2 / 4)^-2 sum (dq^i)^2`
    ConstCurvature3 {
        k: f64,
        chart: CurvatureChart,
    },
    /// Self-dual Taub-NUT in `(r, theta, phi, psi)`:
    /// `V (dr^2 + r^2 dOmega^2) + c^2 V^-1 (dpsi + cos(theta) dphi)^2`, `V = 1 + 2m/r`.
    TaubNut {
        m: f64,
        normalization: TaubNutNormalization,
    },
    Custom {
        dim: usize,
        coordinates: Vec<String>,
    },
}

/// A chart-based Riemannian metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    kind: MetricKind,
    role: ChartRole,
    // upper triangle, row-major, i <= j
    components: Vec<Expr>,
}

/// Covariant metric components at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue(pub DMatrix<f64>);

/// Metric with its first and second partial derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `dg[l] = d_l g`
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[l * n + r] = d_l d_r g`
    pub ddg: Vec<DMatrix<f64>>,
}

impl MetricSpec {
    pub fn flat(dim: usize) -> Self {
        Self::from_kind(MetricKind::Flat { dim }).expect("flat metric is always valid")
    }

    pub fn const_curvature3(k: f64) -> Self {
        Self::const_curvature3_in(k, CurvatureChart::Cartesian)
    }

    pub fn const_curvature3_in(k: f64, chart: CurvatureChart) -> Self {
        Self::from_kind(MetricKind::ConstCurvature3 { k, chart })
            .expect("constant-curvature metric is always valid")
    }

    /// Taub-NUT with the normalization validated by the covariant-constancy check.
    pub fn taub_nut(m: f64) -> Result<Self, GeometryError> {
        Self::taub_nut_with(m, TaubNutNormalization::default())
    }

    pub fn taub_nut_with(
        m: f64,
        normalization: TaubNutNormalization,
    ) -> Result<Self, GeometryError> {
        Self::from_kind(MetricKind::TaubNut { m, normalization })
    }

    /// A custom metric from a full `n x n` matrix of expressions in `x1..xn`.
    pub fn custom(
        matrix: Vec<Vec<Expr>>,
        coordinates: Option<Vec<String>>,
    ) -> Result<Self, GeometryError> {
        let dim = matrix.len();
        if dim == 0 {
            return Err(GeometryError::Invalid("empty metric matrix".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != dim {
                return Err(GeometryError::Invalid(format!(
                    "row {} has {} entries, expected {dim}",
                    i + 1,
                    row.len()
                )));
            }
            for e in row {
                if e.arity() != dim {
                    return Err(GeometryError::Invalid(format!(
                        "component `{e}` is not an expression in {dim} coordinates"
                    )));
                }
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if matrix[i][j] != matrix[j][i] {
                    return Err(GeometryError::Invalid(format!(
                        "metric is not declared symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let coordinates =
            coordinates.unwrap_or_else(|| (1..=dim).map(|i| format!("x{i}")).collect());
        if coordinates.len() != dim {
            return Err(GeometryError::Dimension {
                expected: dim,
                got: coordinates.len(),
            });
        }
        let mut components = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                components.push(matrix[i][j].clone());
            }
        }
        Ok(Self {
            kind: MetricKind::Custom { dim, coordinates },
            role: ChartRole::Position,
            components,
        })
    }

    fn from_kind(kind: MetricKind) -> Result<Self, GeometryError> {
        let components = catalog::components(&kind)?;
        Ok(Self {
            kind,
            role: ChartRole::Position,
            components,
        })
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn role(&self) -> ChartRole {
        self.role
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MetricKind::Flat { dim } | MetricKind::Custom { dim, .. } => *dim,
            MetricKind::ConstCurvature3 { .. } => 3,
            MetricKind::TaubNut { .. } => 4,
        }
    }

    /// Short name, e.g. `flat:3` or `taub-nut:1`.
    pub fn label(&self) -> String {
        let base = match &self.kind {
            MetricKind::Flat { dim } => format!("flat:{dim}"),
            MetricKind::ConstCurvature3 { k, chart } => match chart {
                CurvatureChart::Cartesian => format!("const-curvature:{k}"),
                CurvatureChart::Spherical => format!("const-curvature-spherical:{k}"),
            },
            MetricKind::TaubNut { m, .. } => format!("taub-nut:{m}"),
            MetricKind::Custom { dim, .. } => format!("custom:{dim}"),
        };
        match self.role {
            ChartRole::Position => base,
            ChartRole::Momentum => format!("{base}~"),
        }
    }

    pub fn coordinate_names(&self) -> Vec<String> {
        let spatial = |role: ChartRole| match role {
            ChartRole::Position => "r",
            ChartRole::Momentum => "p",
        };
        match &self.kind {
            MetricKind::Flat { dim } => {
                let prefix = match self.role {
                    ChartRole::Position => "x",
                    ChartRole::Momentum => "p",
                };
                (1..=*dim).map(|i| format!("{prefix}{i}")).collect()
            }
            MetricKind::ConstCurvature3 { chart, .. } => match (chart, self.role) {
                (CurvatureChart::Cartesian, ChartRole::Position) => vec!["q1", "q2", "q3"],
                (CurvatureChart::Cartesian, ChartRole::Momentum) => vec!["p1", "p2", "p3"],
                (CurvatureChart::Spherical, role) => vec![spatial(role), "theta", "phi"],
            }
            .into_iter()
            .map(String::from)
            .collect(),
            MetricKind::TaubNut { .. } => [spatial(self.role), "theta", "phi", "psi"]
                .into_iter()
                .map(String::from)
                .collect(),
            MetricKind::Custom { coordinates, .. } => coordinates.clone(),
        }
    }

    /// Component expression `g_ij`.
    pub fn component(&self, i: usize, j: usize) -> &Expr {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let n = self.dim();
        // row i of the packed upper triangle starts after sum_{a<i} (n - a) entries
        let start: usize = (0..i).map(|a| n - a).sum();
        &self.components[start + (j - i)]
    }

    /// Rejects coordinate singularities of the catalog charts.
    pub fn check_domain(&self, point: &[f64]) -> Result<(), GeometryError> {
        let n = self.dim();
        if point.len() != n {
            return Err(GeometryError::Dimension {
                expected: n,
                got: point.len(),
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::Domain("non-finite coordinate".into()));
        }
        const GUARD: f64 = 1e-9;
        let polar_guard = |r: f64, theta: f64| {
            if r < GUARD {
                return Err(GeometryError::Domain(format!("radius {r} below {GUARD:e}")));
            }
            if theta.sin().abs() < GUARD {
                return Err(GeometryError::Domain(format!(
                    "polar angle {theta} on the coordinate axis"
                )));
            }
            Ok(())
        };
        match &self.kind {
            MetricKind::ConstCurvature3 { k, chart } => {
                let r2 = match chart {
                    CurvatureChart::Cartesian => point.iter().map(|q| q * q).sum::<f64>(),
                    CurvatureChart::Spherical => {
                        polar_guard(point[0], point[1])?;
                        point[0] * point[0]
                    }
                };
                let factor = 1.0 + k * r2 / 4.0;
                if factor.abs() < GUARD {
                    return Err(GeometryError::Domain(format!(
                        "conformal factor 1 + K r^2/4 = {factor:e} vanishes"
                    )));
                }
            }
            MetricKind::TaubNut { .. } => polar_guard(point[0], point[1])?,
            MetricKind::Flat { .. } | MetricKind::Custom { .. } => {}
        }
        Ok(())
    }

    /// Metric value and derivatives up to second order.
    pub fn jet(&self, point: &[f64]) -> Result<MetricJet, GeometryError> {
        self.check_domain(point)?;
        let n = self.dim();
        let mut g = DMatrix::zeros(n, n);
        let mut dg = vec![DMatrix::zeros(n, n); n];
        let mut ddg = vec![DMatrix::zeros(n, n); n * n];
        for i in 0..n {
            for j in i..n {
                let d = self.component(i, j).eval2(point)?;
                g[(i, j)] = d.value;
                g[(j, i)] = d.value;
                for l in 0..n {
                    dg[l][(i, j)] = d.gradient[l];
                    dg[l][(j, i)] = d.gradient[l];
                    for r in 0..n {
                        ddg[l * n + r][(i, j)] = d.hess(l, r);
                        ddg[l * n + r][(j, i)] = d.hess(l, r);
                    }
                }
            }
        }
        let g_inv = invert(&g)?;
        Ok(MetricJet { g, g_inv, dg, ddg })
    }
}

fn invert(g: &DMatrix<f64>) -> Result<DMatrix<f64>, GeometryError> {
    let n = g.nrows();
    let det = g.determinant();
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if !det.is_finite() || det.abs() <= 1e-12 * scale.powi(n as i32) {
        return Err(GeometryError::SingularMetric { det });
    }
    g.clone()
        .try_inverse()
        .ok_or(GeometryError::SingularMetric { det })
}

pub fn metric_at(spec: &MetricSpec, point: &[f64]) -> Result<MetricValue, GeometryError> {
    spec.check_domain(point)?;
    let n = spec.dim();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = spec.component(i, j).eval2(point)?.value;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    invert(&g)?;
    Ok(MetricValue(g))
}

pub fn inverse_metric_at(spec: &MetricSpec, point: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    let MetricValue(g) = metric_at(spec, point)?;
    invert(&g)
}

/// The metric on momentum space: same components, chart variables read as momenta.
/// Applying it twice returns the original spec.
pub fn dual_metric(spec: &MetricSpec) -> MetricSpec {
    MetricSpec {
        role: spec.role.flipped(),
        ..spec.clone()
    }
}
