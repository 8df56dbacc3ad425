//! Catalog Killing-Yano candidates on the curved charts.

use ndarray::ArrayD;

use super::{AntisymField, KyError};
use crate::expr::Node;
use crate::geometry::ChartRole;
use crate::tensor::levi_civita;

fn role_label(base: &str, role: ChartRole) -> String {
    match role {
        ChartRole::Position => base.to_string(),
        ChartRole::Momentum => format!("{base}~"),
    }
}

/// The printed constant-curvature components on the spherical chart
/// `(r, theta, phi)`, transcribed verbatim (including the `1/16` on `f_12` and
/// the `16` on its momentum twin). On the momentum chart `r` reads as `p`.
///
/// Whether these satisfy the Killing-Yano equation is measured, not assumed.
pub fn constcurv_printed_field(k: f64, role: ChartRole) -> AntisymField {
    let r = || Node::var(0);
    let theta = || Node::var(1);
    let phi = || Node::var(2);
    // (1 + K r^2 / 4)^2
    let base2 = || (Node::num(1.0) + Node::num(k / 4.0) * r().powi(2)).powi(2);
    let f12 = match role {
        ChartRole::Position => r() * phi().sin() / (Node::num(16.0) * base2()),
        ChartRole::Momentum => Node::num(16.0) * r() * phi().sin() / base2(),
    };
    let f13 = r() * (Node::num(2.0) * theta()).sin() * phi().cos() / (Node::num(32.0) * base2());
    let f23 = r().powi(2)
        * theta().sin().powi(2)
        * phi().cos()
        * (Node::num(k) * r().powi(2) - Node::num(4.0))
        / ((Node::num(4.0) + Node::num(k) * r().powi(2)) * base2());
    AntisymField::from_nodes(
        3,
        2,
        [(vec![0, 1], f12), (vec![0, 2], f13), (vec![1, 2], f23)],
    )
    .expect("three components of a rank-2 field in 3 dimensions")
    .with_role(role)
    .with_label(role_label("const-curvature printed f", role))
}

/// Printed constant-curvature field evaluated at a spherical-chart point.
pub fn constcurv_ky(point: &[f64], k: f64, role: ChartRole) -> Result<ArrayD<f64>, KyError> {
    if point.len() != 3 {
        return Err(KyError::Dimension {
            expected: 3,
            got: point.len(),
        });
    }
    if point[0].abs() < 1e-9 || point[1].sin().abs() < 1e-9 {
        return Err(
            crate::geometry::GeometryError::Domain("spherical chart singularity".into()).into(),
        );
    }
    constcurv_printed_field(k, role).value_at(point)
}

/// Cartesian `d x_i / d q^a` on the Taub-NUT chart `(r, theta, phi, psi)`.
fn cartesian_jacobian(i: usize, a: usize) -> Node {
    let (r, th, ph) = (|| Node::var(0), || Node::var(1), || Node::var(2));
    match (i, a) {
        (0, 0) => th().sin() * ph().cos(),
        (0, 1) => r() * th().cos() * ph().cos(),
        (0, 2) => -(r() * th().sin() * ph().sin()),
        (1, 0) => th().sin() * ph().sin(),
        (1, 1) => r() * th().cos() * ph().sin(),
        (1, 2) => r() * th().sin() * ph().cos(),
        (2, 0) => th().cos(),
        (2, 1) => -(r() * th().sin()),
        _ => Node::num(0.0),
    }
}

/// Components of `(dpsi + cos(theta) dphi)`.
fn fiber_form(a: usize) -> Node {
    match a {
        2 => Node::var(1).cos(),
        3 => Node::num(1.0),
        _ => Node::num(0.0),
    }
}

/// `f_i = 4m (dpsi + cos(theta) dphi) ^ dx_i - eps_ijk (1 + 2m/r) dx_j ^ dx_k`
/// on the chart `(r, theta, phi, psi)`, with `(a ^ b)_mn = a_m b_n - a_n b_m`
/// and the sum over `j, k` taken in full. `index` is 1-based.
pub fn taubnut_two_form(index: usize, m: f64) -> Result<AntisymField, KyError> {
    if !(1..=3).contains(&index) {
        return Err(KyError::Index { index });
    }
    let i = index - 1;
    let v = || Node::num(1.0) + Node::num(2.0 * m) / Node::var(0);
    let mut comps = Vec::new();
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let mut terms = vec![
                Node::num(4.0 * m) * fiber_form(mu) * cartesian_jacobian(i, nu),
                -(Node::num(4.0 * m) * fiber_form(nu) * cartesian_jacobian(i, mu)),
            ];
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita(&[i, j, k]);
                    if e == 0 {
                        continue;
                    }
                    let wedge = cartesian_jacobian(j, mu) * cartesian_jacobian(k, nu)
                        - cartesian_jacobian(j, nu) * cartesian_jacobian(k, mu);
                    terms.push(Node::num(-f64::from(e)) * v() * wedge);
                }
            }
            let node = terms
                .into_iter()
                .reduce(|a, b| a + b)
                .unwrap_or(Node::num(0.0));
            comps.push((vec![mu, nu], node));
        }
    }
    Ok(AntisymField::from_nodes(4, 2, comps)?.with_label(format!("taub-nut f_{index}")))
}

/// Taub-NUT two-form `f_index` (or its momentum twin) for mass parameter `m`.
pub fn taubnut_field(index: usize, m: f64, role: ChartRole) -> Result<AntisymField, KyError> {
    let f = taubnut_two_form(index, m)?;
    Ok(match role {
        ChartRole::Position => f,
        ChartRole::Momentum => f.twin(),
    })
}

/// `f_index` evaluated at a regular chart point.
pub fn taubnut_ky(index: usize, point: &[f64], m: f64) -> Result<ArrayD<f64>, KyError> {
    if point.len() != 4 {
        return Err(KyError::Dimension {
            expected: 4,
            got: point.len(),
        });
    }
    if point[0] < 1e-9 || point[1].sin().abs() < 1e-9 {
        return Err(
            crate::geometry::GeometryError::Domain("Taub-NUT chart singularity".into()).into(),
        );
    }
    taubnut_two_form(index, m)?.value_at(point)
}
