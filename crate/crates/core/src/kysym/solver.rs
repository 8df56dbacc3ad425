//! Linear-ansatz Killing-Yano solver.
//!
//! Each independent component is expanded as `f_I = sum_a c_{I,a} phi_a(x)`.
//! The residual `D_l f_mn + D_m f_ln` is linear in the coefficients, so sampling
//! it at points gives a homogeneous system `A c = 0` whose numerical null space
//! is read off an SVD. Null directions whose field vanishes at every sample are
//! discarded afterwards.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{symmetrize_first_pair, AntisymField, KyError};
use crate::expr::{Expr, Node};
use crate::geometry::{covariant_derivative, Connection, MetricSpec};
use crate::tensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Singular values below `null_tolerance * sigma_max` span the null space.
    pub null_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            null_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KySolution {
    pub dimension: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub underdetermined: bool,
    /// Singular values of the residual system, descending.
    pub singular_values: Vec<f64>,
    /// Orthonormal coefficient vectors, indexed `component * basis_len + a`.
    pub coefficients: Vec<Vec<f64>>,
    pub fields: Vec<AntisymField>,
}

/// Residual columns for every unknown at one point.
fn point_block(
    spec: &MetricSpec,
    basis: &[Expr],
    keys: &[Vec<usize>],
    point: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>), KyError> {
    let n = spec.dim();
    let conn = Connection::at(spec, point, false)?;
    let jets = basis
        .iter()
        .map(|e| e.eval2(point))
        .collect::<Result<Vec<_>, _>>()?;
    let unknowns = keys.len() * basis.len();
    let rows = n * n * n;
    let mut a = DMatrix::zeros(rows, unknowns);
    let mut e = DMatrix::zeros(keys.len(), unknowns);
    for (c, key) in keys.iter().enumerate() {
        let (i, j) = (key[0], key[1]);
        for (b, d) in jets.iter().enumerate() {
            let col = c * basis.len() + b;
            let mut value = tensor::zeros(n, 2);
            let mut grad = tensor::zeros(n, 3);
            value[[i, j].as_slice()] = d.value;
            value[[j, i].as_slice()] = -d.value;
            for l in 0..n {
                grad[[l, i, j].as_slice()] = d.gradient[l];
                grad[[l, j, i].as_slice()] = -d.gradient[l];
            }
            let r = symmetrize_first_pair(&covariant_derivative(&conn.christoffel, &value, &grad));
            for (row, v) in r.iter().enumerate() {
                a[(row, col)] = *v;
            }
            e[(c, col)] = d.value;
        }
    }
    Ok((a, e))
}

fn stack(blocks: &[DMatrix<f64>], cols: usize) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows.max(cols), cols);
    let mut r0 = 0;
    for b in blocks {
        out.rows_mut(r0, b.nrows()).copy_from(b);
        r0 += b.nrows();
    }
    out
}

/// Right singular vectors of `m` split at `threshold * sigma_max`:
/// `(null, range, singular values)`.
fn split_right(m: &DMatrix<f64>, rel: f64) -> (Vec<DVector<f64>>, Vec<DVector<f64>>, Vec<f64>) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let smax = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let mut null = Vec::new();
    let mut range = Vec::new();
    let mut sigmas = Vec::new();
    for i in order {
        let s = svd.singular_values[i];
        sigmas.push(s);
        let v = vt.row(i).transpose();
        if s <= rel * smax || smax == 0.0 {
            null.push(v);
        } else {
            range.push(v);
        }
    }
    (null, range, sigmas)
}

/// Solves for rank-2 Killing-Yano fields in the span of `basis` on each
/// independent component.
pub fn ky_solve_ansatz(
    spec: &MetricSpec,
    basis: &[Expr],
    points: &[Vec<f64>],
    options: SolverOptions,
) -> Result<KySolution, KyError> {
    let n = spec.dim();
    for e in basis {
        if e.arity() != n {
            return Err(KyError::Dimension {
                expected: n,
                got: e.arity(),
            });
        }
    }
    let keys = tensor::increasing_tuples(n, 2);
    let unknowns = keys.len() * basis.len();
    let blocks = points
        .par_iter()
        .map(|p| point_block(spec, basis, &keys, p))
        .collect::<Result<Vec<_>, _>>()?;
    let equations = blocks.iter().map(|(a, _)| a.nrows()).sum::<usize>();
    let underdetermined = equations < 2 * unknowns;
    if underdetermined {
        log::warn!("{equations} residual equations for {unknowns} unknowns; add sample points");
    }
    let empty = KySolution {
        dimension: 0,
        unknowns,
        equations,
        underdetermined,
        singular_values: Vec::new(),
        coefficients: Vec::new(),
        fields: Vec::new(),
    };
    if unknowns == 0 || points.is_empty() {
        return Ok(empty);
    }
    let a = stack(
        &blocks.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(),
        unknowns,
    );
    let (null, _, singular_values) = split_right(&a, options.null_tolerance);
    if null.is_empty() {
        return Ok(KySolution {
            singular_values,
            ..empty
        });
    }
    let nmat = DMatrix::from_columns(&null);
    let e = stack(
        &blocks.iter().map(|(_, e)| e.clone()).collect::<Vec<_>>(),
        unknowns,
    );
    // directions of the null space that produce a nonzero field somewhere
    let (_, live, _) = split_right(&(&e * &nmat), options.null_tolerance);
    let coefficients: Vec<Vec<f64>> = live
        .iter()
        .map(|w| {
            let c = &nmat * w;
            let sign = c
                .iter()
                .copied()
                .find(|v| v.abs() > 1e-9)
                .map_or(1.0, f64::signum);
            c.iter().map(|v| sign * v).collect()
        })
        .collect();
    let fields = coefficients
        .iter()
        .enumerate()
        .map(|(s, c)| build_field(n, basis, &keys, c, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KySolution {
        dimension: fields.len(),
        unknowns,
        equations,
        underdetermined,
        singular_values,
        coefficients,
        fields,
    })
}

fn build_field(
    n: usize,
    basis: &[Expr],
    keys: &[Vec<usize>],
    coeffs: &[f64],
    index: usize,
) -> Result<AntisymField, KyError> {
    let scale = coeffs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut nodes = Vec::new();
    for (c, key) in keys.iter().enumerate() {
        let node = basis
            .iter()
            .enumerate()
            .filter_map(|(b, phi)| {
                let v = coeffs[c * basis.len() + b];
                (v.abs() > 1e-12 * scale).then(|| Node::num(v) * phi.root().clone())
            })
            .reduce(|x, y| x + y);
        if let Some(node) = node {
            nodes.push((key.clone(), node));
        }
    }
    Ok(AntisymField::from_nodes(n, 2, nodes)?.with_label(format!("ansatz solution {}", index + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::kysym::ky_residual;
    use crate::sampling;

    fn basis(src: &[&str], n: usize) -> Vec<Expr> {
        src.iter()
            .map(|s| parse_expression(s, n).unwrap())
            .collect()
    }

    #[test]
    fn flat3_linear_basis() {
        let spec = MetricSpec::flat(3);
        let pts = sampling::regular_points(&spec, &mut sampling::rng(7), 12);
        let sol = ky_solve_ansatz(
            &spec,
            &basis(&["1", "x1", "x2", "x3"], 3),
            &pts,
            SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.dimension, 4);
        let fresh = sampling::regular_points(&spec, &mut sampling::rng(8), 20);
        for f in &sol.fields {
            for p in &fresh {
                assert!(tensor::max_abs(&ky_residual(&spec, f, p).unwrap()) <= 1e-10);
            }
        }
        for (i, a) in sol.coefficients.iter().enumerate() {
            for (j, b) in sol.coefficients.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn flat2_constant_basis() {
        let spec = MetricSpec::flat(2);
        let pts = sampling::regular_points(&spec, &mut sampling::rng(1), 4);
        let sol =
            ky_solve_ansatz(&spec, &basis(&["1"], 2), &pts, SolverOptions::default()).unwrap();
        assert_eq!(sol.dimension, 1);
        assert!(!sol.underdetermined);
    }

    #[test]
    fn zero_basis_function_is_discarded() {
        let spec = MetricSpec::flat(2);
        let pts = sampling::regular_points(&spec, &mut sampling::rng(1), 4);
        let sol = ky_solve_ansatz(
            &spec,
            &basis(&["1", "0"], 2),
            &pts,
            SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.dimension, 1);
    }

    #[test]
    fn quadratic_only_basis_has_no_solution() {
        let spec = MetricSpec::flat(3);
        let pts = sampling::regular_points(&spec, &mut sampling::rng(2), 10);
        let sol = ky_solve_ansatz(
            &spec,
            &basis(&["x1^2", "x2*x3"], 3),
            &pts,
            SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.dimension, 0);
        assert!(sol.fields.is_empty());
    }
}
