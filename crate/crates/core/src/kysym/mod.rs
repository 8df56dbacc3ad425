//! Killing-Yano machinery.
//!
//! An [`AntisymField`] stores one expression per strictly increasing index
//! tuple; the remaining components are filled in by permutation sign, so
//! antisymmetry holds exactly at every point. Residuals are evaluated through
//! the Levi-Civita connection of a [`MetricSpec`]:
//!
//! - Killing-Yano: `D_l f_{m..} + D_m f_{l..} = 0`
//! - covariant constancy: `D_l f_{m..} = 0`
//! - Killing tensor: `K_mn = f_ma g^ab f_bn`, with `D_(l K_mn) = 0`

mod catalog;
pub mod file;
mod flat;
mod report;
mod solver;
mod symplectic;

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use ndarray::{ArrayD, Dimension, IxDyn};
use thiserror::Error;

use crate::expr::{Expr, ExprError, Node, Vars};
use crate::geometry::{covariant_derivative, ChartRole, Connection, GeometryError, MetricSpec};
use crate::tensor;

pub use catalog::{
    constcurv_ky, constcurv_printed_field, taubnut_field, taubnut_ky, taubnut_two_form,
};
pub use flat::{flat_ky_field, flat_ky_pair, reconstruct_momentum, reconstruct_position};
pub use report::{ky_report, KyReport, KyTolerances};
pub use solver::{ky_solve_ansatz, KySolution, SolverOptions};
pub use symplectic::{symplectic_from_ky, SymplecticError, SymplecticForm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("expected a rank-{expected} field, got rank {got}")]
    Rank { expected: usize, got: usize },
    #[error("rank {rank} is not supported in dimension {dim} (use 2 or dim - 1)")]
    UnsupportedRank { rank: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("array is not antisymmetric (defect {defect:e})")]
    NotAntisymmetric { defect: f64 },
    #[error("invalid component {key:?}: {reason}")]
    Component { key: Vec<usize>, reason: String },
    #[error("matrix is singular (det = {det:e})")]
    Singular { det: f64 },
    #[error("index {index} is out of range")]
    Index { index: usize },
}

/// Antisymmetric covariant tensor field of rank 2 or `dim - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymField {
    dim: usize,
    rank: usize,
    role: ChartRole,
    label: String,
    // 0-based strictly increasing index tuples
    components: BTreeMap<Vec<usize>, Expr>,
}

/// Field value and its partial derivatives at a point.
#[derive(Debug, Clone)]
pub struct FieldJet {
    pub value: ArrayD<f64>,
    /// `grad[[l, m1, .., mr]] = d_l f_{m1..mr}`
    pub grad: ArrayD<f64>,
}

impl AntisymField {
    /// `components` maps strictly increasing 0-based index tuples to expressions in
    /// `x1..x{dim}`; absent tuples are zero.
    pub fn new(
        dim: usize,
        rank: usize,
        components: BTreeMap<Vec<usize>, Expr>,
    ) -> Result<Self, KyError> {
        if rank == 0 || rank > dim || (rank != 2 && rank + 1 != dim) {
            return Err(KyError::UnsupportedRank { rank, dim });
        }
        for (key, e) in &components {
            let bad = |reason: &str| KyError::Component {
                key: key.clone(),
                reason: reason.into(),
            };
            if key.len() != rank {
                return Err(bad("wrong number of indices"));
            }
            if key.iter().any(|&i| i >= dim) {
                return Err(bad("index exceeds the dimension"));
            }
            if key.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad("indices must be strictly increasing"));
            }
            if e.arity() != dim {
                return Err(bad("expression arity differs from the dimension"));
            }
        }
        Ok(Self {
            dim,
            rank,
            role: ChartRole::Position,
            label: String::from("field"),
            components,
        })
    }

    /// Builds from tree nodes in the chart variables.
    pub fn from_nodes(
        dim: usize,
        rank: usize,
        nodes: impl IntoIterator<Item = (Vec<usize>, Node)>,
    ) -> Result<Self, KyError> {
        let components = nodes
            .into_iter()
            .map(|(k, n)| Ok((k, Expr::new(n, Vars::Coords(dim))?)))
            .collect::<Result<BTreeMap<_, _>, KyError>>()?;
        Self::new(dim, rank, components)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_role(mut self, role: ChartRole) -> Self {
        self.role = role;
        self
    }

    /// The same components read on the momentum (or position) chart.
    pub fn twin(&self) -> Self {
        let label = match self.label.strip_suffix('~') {
            Some(base) => base.to_string(),
            None => format!("{}~", self.label),
        };
        Self {
            role: self.role.flipped(),
            label,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn role(&self) -> ChartRole {
        self.role
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.components
    }

    pub fn jet(&self, point: &[f64]) -> Result<FieldJet, KyError> {
        if point.len() != self.dim {
            return Err(KyError::Dimension {
                expected: self.dim,
                got: point.len(),
            });
        }
        let n = self.dim;
        let mut value = tensor::zeros(n, self.rank);
        let mut grad = tensor::zeros(n, self.rank + 1);
        let perms: Vec<Vec<usize>> = (0..self.rank).permutations(self.rank).collect();
        for (key, e) in &self.components {
            let d = e.eval2(point)?;
            for perm in &perms {
                let idx: Vec<usize> = perm.iter().map(|&p| key[p]).collect();
                let sign = f64::from(tensor::levi_civita(perm));
                value[IxDyn(&idx)] = sign * d.value;
                let mut gidx = Vec::with_capacity(self.rank + 1);
                for l in 0..n {
                    gidx.clear();
                    gidx.push(l);
                    gidx.extend_from_slice(&idx);
                    grad[IxDyn(&gidx)] = sign * d.gradient[l];
                }
            }
        }
        Ok(FieldJet { value, grad })
    }

    pub fn value_at(&self, point: &[f64]) -> Result<ArrayD<f64>, KyError> {
        Ok(self.jet(point)?.value)
    }

    /// Rank-2 value as a matrix.
    pub fn matrix_at(&self, point: &[f64]) -> Result<DMatrix<f64>, KyError> {
        self.require_rank2()?;
        Ok(to_matrix(&self.value_at(point)?))
    }

    fn require_rank2(&self) -> Result<(), KyError> {
        if self.rank != 2 {
            return Err(KyError::Rank {
                expected: 2,
                got: self.rank,
            });
        }
        Ok(())
    }

    fn check_against(&self, spec: &MetricSpec) -> Result<(), KyError> {
        if spec.dim() != self.dim {
            return Err(KyError::Dimension {
                expected: spec.dim(),
                got: self.dim,
            });
        }
        Ok(())
    }
}

pub(crate) fn to_matrix(a: &ArrayD<f64>) -> DMatrix<f64> {
    let n = a.shape()[0];
    DMatrix::from_fn(n, n, |i, j| a[[i, j].as_slice()])
}

/// `Df[[l, m1, ..]] = D_l f_{m1..}` given a connection and a field jet.
pub(crate) fn covariant_jet(conn: &Connection, jet: &FieldJet) -> ArrayD<f64> {
    covariant_derivative(&conn.christoffel, &jet.value, &jet.grad)
}

/// `R[[l, m1, m2, ..]] = D_l f_{m1 m2 ..} + D_{m1} f_{l m2 ..}` from `D f`.
pub(crate) fn symmetrize_first_pair(df: &ArrayD<f64>) -> ArrayD<f64> {
    let mut out = df.clone();
    for (idx, v) in out.indexed_iter_mut() {
        let mut swapped = idx.slice().to_vec();
        swapped.swap(0, 1);
        *v += df[IxDyn(&swapped)];
    }
    out
}

/// `D_l f_{m..}`; zero is strictly stronger than the Killing-Yano equation.
pub fn covariant_constancy_residual(
    spec: &MetricSpec,
    field: &AntisymField,
    point: &[f64],
) -> Result<ArrayD<f64>, KyError> {
    field.check_against(spec)?;
    let conn = Connection::at(spec, point, false)?;
    Ok(covariant_jet(&conn, &field.jet(point)?))
}

/// Killing-Yano residual `D_l f_{m ..} + D_m f_{l ..}`; zero iff the field is
/// Killing-Yano at `point`.
pub fn ky_residual(
    spec: &MetricSpec,
    field: &AntisymField,
    point: &[f64],
) -> Result<ArrayD<f64>, KyError> {
    Ok(symmetrize_first_pair(&covariant_constancy_residual(
        spec, field, point,
    )?))
}

/// Coordinate exterior derivative `d_l f_mn + d_m f_nl + d_n f_lm` of a 2-form.
pub fn closedness_residual(field: &AntisymField, point: &[f64]) -> Result<ArrayD<f64>, KyError> {
    field.require_rank2()?;
    let jet = field.jet(point)?;
    let n = field.dim;
    let mut out = tensor::zeros(n, 3);
    for l in 0..n {
        for m in 0..n {
            for k in 0..n {
                out[[l, m, k].as_slice()] = jet.grad[[l, m, k].as_slice()]
                    + jet.grad[[m, k, l].as_slice()]
                    + jet.grad[[k, l, m].as_slice()];
            }
        }
    }
    Ok(out)
}

/// Symmetric `K_mn` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingTensorValue(pub DMatrix<f64>);

/// `K = F g^-1 F` and `d_l K`, upper triangle computed and mirrored.
pub(crate) fn killing_jet(conn: &Connection, jet: &FieldJet) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
    let n = conn.metric.g.nrows();
    let f = to_matrix(&jet.value);
    let ginv = &conn.metric.g_inv;
    let mirror =
        |m: DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] });
    let k = mirror(&f * ginv * &f);
    let dk = (0..n)
        .map(|l| {
            let df = DMatrix::from_fn(n, n, |i, j| jet.grad[[l, i, j].as_slice()]);
            let dginv = -(ginv * &conn.metric.dg[l] * ginv);
            mirror(&df * ginv * &f + &f * dginv * &f + &f * ginv * &df)
        })
        .collect();
    (k, dk)
}

/// Killing tensor `K_mn = f_ma g^ab f_bn`. For flat 3-space and
/// `f_ij = eps_kij x_k` this is `x_i x_j - r^2 delta_ij`.
pub fn killing_from_ky(
    spec: &MetricSpec,
    field: &AntisymField,
    point: &[f64],
) -> Result<KillingTensorValue, KyError> {
    field.require_rank2()?;
    field.check_against(spec)?;
    let conn = Connection::at(spec, point, false)?;
    Ok(KillingTensorValue(killing_jet(&conn, &field.jet(point)?).0))
}

/// `D_l K_mn + D_m K_nl + D_n K_lm` for the Killing tensor built from `field`.
pub fn killing_equation_residual(
    spec: &MetricSpec,
    field: &AntisymField,
    point: &[f64],
) -> Result<ArrayD<f64>, KyError> {
    field.require_rank2()?;
    field.check_against(spec)?;
    let conn = Connection::at(spec, point, false)?;
    let (k, dk) = killing_jet(&conn, &field.jet(point)?);
    let n = spec.dim();
    let mut value = tensor::zeros(n, 2);
    let mut grad = tensor::zeros(n, 3);
    for a in 0..n {
        for b in 0..n {
            value[[a, b].as_slice()] = k[(a, b)];
            for l in 0..n {
                grad[[l, a, b].as_slice()] = dk[l][(a, b)];
            }
        }
    }
    let dkk = covariant_derivative(&conn.christoffel, &value, &grad);
    let mut out = tensor::zeros(n, 3);
    for l in 0..n {
        for m in 0..n {
            for k in 0..n {
                out[[l, m, k].as_slice()] = dkk[[l, m, k].as_slice()]
                    + dkk[[m, k, l].as_slice()]
                    + dkk[[k, l, m].as_slice()];
            }
        }
    }
    Ok(out)
}

/// Threshold on `|det f|` for non-degeneracy.
pub const NONDEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Nondegeneracy {
    pub det: f64,
    pub nondegenerate: bool,
}

pub fn nondegeneracy(
    field: &AntisymField,
    spec: &MetricSpec,
    point: &[f64],
) -> Result<Nondegeneracy, KyError> {
    field.check_against(spec)?;
    let det = field.matrix_at(point)?.determinant();
    Ok(Nondegeneracy {
        det,
        nondegenerate: det.abs() > NONDEGENERACY_THRESHOLD,
    })
}
