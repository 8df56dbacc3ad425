use nalgebra::DMatrix;
use ndarray::{Array3, Array4, ArrayD, IxDyn};

use super::{GeometryError, MetricJet, MetricSpec};
use crate::kysym::{AntisymField, KyError};
use crate::tensor;

/// Levi-Civita connection at a point, `gamma[[l, m, n]] = Gamma^l_mn`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub gamma: Array3<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.gamma.shape()[0]
    }

    pub fn get(&self, l: usize, m: usize, n: usize) -> f64 {
        self.gamma[[l, m, n]]
    }
}

/// Metric jet plus connection and, optionally, its first derivatives.
#[derive(Debug, Clone)]
pub struct Connection {
    pub metric: MetricJet,
    pub christoffel: Christoffel,
    /// `dgamma[[r, l, m, n]] = d_r Gamma^l_mn`
    pub dgamma: Option<Array4<f64>>,
}

impl Connection {
    pub fn at(spec: &MetricSpec, point: &[f64], derivatives: bool) -> Result<Self, GeometryError> {
        let metric = spec.jet(point)?;
        Ok(Self::from_jet(metric, derivatives))
    }

    pub fn from_jet(metric: MetricJet, derivatives: bool) -> Self {
        let n = metric.g.nrows();
        // first kind: a[[s, m, n]] = 1/2 (d_m g_sn + d_n g_sm - d_s g_mn)
        let mut first = Array3::zeros((n, n, n));
        for s in 0..n {
            for a in 0..n {
                for b in a..n {
                    let v =
                        0.5 * (metric.dg[a][(s, b)] + metric.dg[b][(s, a)] - metric.dg[s][(a, b)]);
                    first[[s, a, b]] = v;
                    first[[s, b, a]] = v;
                }
            }
        }
        let mut gamma = Array3::zeros((n, n, n));
        for l in 0..n {
            for a in 0..n {
                for b in a..n {
                    let v: f64 = (0..n)
                        .map(|s| metric.g_inv[(l, s)] * first[[s, a, b]])
                        .sum();
                    gamma[[l, a, b]] = v;
                    gamma[[l, b, a]] = v;
                }
            }
        }
        let dgamma = derivatives.then(|| {
            let mut out = Array4::zeros((n, n, n, n));
            for r in 0..n {
                // d_r g^-1 = -g^-1 (d_r g) g^-1
                let dginv: DMatrix<f64> = -(&metric.g_inv * &metric.dg[r] * &metric.g_inv);
                for l in 0..n {
                    for a in 0..n {
                        for b in a..n {
                            let mut v = 0.0;
                            for s in 0..n {
                                let dfirst = 0.5
                                    * (metric.ddg[r * n + a][(s, b)]
                                        + metric.ddg[r * n + b][(s, a)]
                                        - metric.ddg[r * n + s][(a, b)]);
                                v += dginv[(l, s)] * first[[s, a, b]]
                                    + metric.g_inv[(l, s)] * dfirst;
                            }
                            out[[r, l, a, b]] = v;
                            out[[r, l, b, a]] = v;
                        }
                    }
                }
            }
            out
        });
        Self {
            metric,
            christoffel: Christoffel { gamma },
            dgamma,
        }
    }
}

pub fn christoffel_at(spec: &MetricSpec, point: &[f64]) -> Result<Christoffel, GeometryError> {
    Ok(Connection::at(spec, point, false)?.christoffel)
}

/// Covariant derivative of a fully covariant tensor given its value and
/// partial derivatives (`grad[[l, ..]] = d_l value[[..]]`).
///
/// `out[[l, m1, .., mr]] = d_l T_{m1..mr} - sum_k Gamma^s_{l mk} T_{m1..s..mr}`
pub fn covariant_derivative(
    christoffel: &Christoffel,
    value: &ArrayD<f64>,
    grad: &ArrayD<f64>,
) -> ArrayD<f64> {
    let n = christoffel.dim();
    let rank = value.ndim();
    let mut out = grad.clone();
    for idx in tensor::all_indices(n, rank + 1) {
        let (l, rest) = idx.split_first().expect("rank + 1 >= 1");
        let mut correction = 0.0;
        for k in 0..rank {
            let mut swapped = rest.to_vec();
            for s in 0..n {
                let g = christoffel.gamma[[s, *l, rest[k]]];
                if g != 0.0 {
                    swapped[k] = s;
                    correction += g * value[IxDyn(&swapped)];
                }
            }
        }
        out[IxDyn(&idx)] -= correction;
    }
    out
}

/// `D_l f_mn` for a rank-2 antisymmetric field.
pub fn covariant_derivative_2form(
    spec: &MetricSpec,
    field: &AntisymField,
    point: &[f64],
) -> Result<ArrayD<f64>, KyError> {
    if field.rank() != 2 {
        return Err(KyError::Rank {
            expected: 2,
            got: field.rank(),
        });
    }
    crate::kysym::covariant_constancy_residual(spec, field, point)
}

/// `D_l g_mn`, which vanishes for the Levi-Civita connection.
pub fn metric_covariant_derivative(
    spec: &MetricSpec,
    point: &[f64],
) -> Result<ArrayD<f64>, GeometryError> {
    let conn = Connection::at(spec, point, false)?;
    let n = spec.dim();
    let mut value = tensor::zeros(n, 2);
    let mut grad = tensor::zeros(n, 3);
    for a in 0..n {
        for b in 0..n {
            value[[a, b].as_slice()] = conn.metric.g[(a, b)];
            for l in 0..n {
                grad[[l, a, b].as_slice()] = conn.metric.dg[l][(a, b)];
            }
        }
    }
    Ok(covariant_derivative(&conn.christoffel, &value, &grad))
}

/// Riemann, Ricci and scalar curvature at a point.
#[derive(Debug, Clone)]
pub struct Curvature {
    /// `riemann[[r, s, m, n]] = R^r_smn`
    pub riemann: Array4<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// `R^r_smn = d_m Gamma^r_ns - d_n Gamma^r_ms + Gamma^r_ml Gamma^l_ns - Gamma^r_nl Gamma^l_ms`,
/// `R_sn = R^r_srn`, `R = g^sn R_sn`.
pub fn curvature_at(spec: &MetricSpec, point: &[f64]) -> Result<Curvature, GeometryError> {
    let conn = Connection::at(spec, point, true)?;
    let n = spec.dim();
    let g = &conn.christoffel.gamma;
    let dg = conn.dgamma.as_ref().expect("requested derivatives");
    let mut riemann = Array4::zeros((n, n, n, n));
    for r in 0..n {
        for s in 0..n {
            for m in 0..n {
                for nu in (m + 1)..n {
                    let mut v = dg[[m, r, nu, s]] - dg[[nu, r, m, s]];
                    for l in 0..n {
                        v += g[[r, m, l]] * g[[l, nu, s]] - g[[r, nu, l]] * g[[l, m, s]];
                    }
                    riemann[[r, s, m, nu]] = v;
                    riemann[[r, s, nu, m]] = -v;
                }
            }
        }
    }
    let mut ricci = DMatrix::zeros(n, n);
    for s in 0..n {
        for nu in 0..n {
            ricci[(s, nu)] = (0..n).map(|r| riemann[[r, s, r, nu]]).sum();
        }
    }
    let ginv = &conn.metric.g_inv;
    let scalar = (0..n)
        .flat_map(|s| (0..n).map(move |nu| (s, nu)))
        .map(|(s, nu)| ginv[(s, nu)] * ricci[(s, nu)])
        .sum();
    Ok(Curvature {
        riemann,
        ricci,
        scalar,
    })
}
