use super::{DynamicsError, PhaseFunction, PhaseJet, PhasePoint};
use crate::expr::Expr;

/// `sum_i (dF/dx_i dG/dp_i - dF/dp_i dG/dx_i)` from two gradients.
pub fn poisson_from_jets(f: &PhaseJet, g: &PhaseJet) -> f64 {
    let n = f.gradient.len() / 2;
    (0..n)
        .map(|i| f.gradient[i] * g.gradient[n + i] - f.gradient[n + i] * g.gradient[i])
        .sum()
}

pub fn poisson_bracket(
    f: &PhaseFunction,
    g: &PhaseFunction,
    z: &PhasePoint,
) -> Result<f64, DynamicsError> {
    Ok(poisson_from_jets(&f.jet(z, false)?, &g.jet(z, false)?))
}

/// Gradient of `{F, G}` in `(x, p)`; needs second derivatives of both.
pub fn bracket_gradient(
    f: &PhaseFunction,
    g: &PhaseFunction,
    z: &PhasePoint,
) -> Result<Vec<f64>, DynamicsError> {
    let fj = f.jet(z, true)?;
    let gj = g.jet(z, true)?;
    let (fh, gh) = match (&fj.hessian, &gj.hessian) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(DynamicsError::NoHessian(format!(
                "{} / {}",
                f.label(),
                g.label()
            )))
        }
    };
    let m = fj.gradient.len();
    let n = m / 2;
    Ok((0..m)
        .map(|a| {
            (0..n)
                .map(|i| {
                    fh[a * m + i] * gj.gradient[n + i] + fj.gradient[i] * gh[a * m + n + i]
                        - fh[a * m + n + i] * gj.gradient[i]
                        - fj.gradient[n + i] * gh[a * m + i]
                })
                .sum()
        })
        .collect())
}

/// Ternary bracket `eps_ijk d_i F1 d_j F2 d_k F3` of three functions of three
/// variables, i.e. the Jacobian determinant.
///
/// Permuting the arguments flips the sign exactly: every term is a product of
/// sorted factors, and positive and negative terms are summed separately in
/// ascending order before the final subtraction.
pub fn nambu_bracket(fs: [&Expr; 3], point: &[f64]) -> Result<f64, DynamicsError> {
    let mut jac = [[0.0; 3]; 3];
    for (row, f) in fs.iter().enumerate() {
        if f.arity() != 3 {
            return Err(DynamicsError::Dimension {
                expected: 3,
                got: f.arity(),
            });
        }
        let d = f.eval2(point)?;
        jac[row].copy_from_slice(&d.gradient[..3]);
    }
    Ok(det3_symmetric(&jac))
}

fn det3_symmetric(m: &[[f64; 3]; 3]) -> f64 {
    const PERMS: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
        ([1, 0, 2], -1.0),
    ];
    let mut pos = Vec::with_capacity(6);
    let mut neg = Vec::with_capacity(6);
    for (cols, sign) in PERMS {
        let mut f = [m[0][cols[0]], m[1][cols[1]], m[2][cols[2]]];
        f.sort_by(f64::total_cmp);
        let t = sign * (f[0] * f[1] * f[2]);
        if t > 0.0 {
            pos.push(t);
        } else if t < 0.0 {
            neg.push(-t);
        }
    }
    let total = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.iter().fold(0.0, |acc, t| acc + t)
    };
    total(&mut pos) - total(&mut neg)
}
