//! Phase-space calculus.
//!
//! Phase points carry a chart position `x` and conjugate momenta `p`. Phase
//! functions are expressions in `x1..xn, p1..pn` or built-ins tied to a
//! metric (the geodesic Hamiltonian `H = 1/2 g^{mn} p_m p_n` and the quadratic
//! invariant `K^{mn} p_m p_n` of a Killing-Yano field). All derivatives are exact.

mod brackets;
mod integrate;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{Expr, ExprError, Vars};
use crate::geometry::{ChartRole, Connection, GeometryError, MetricSpec};
use crate::kysym::{killing_jet, AntisymField, KyError};

pub use brackets::{bracket_gradient, nambu_bracket, poisson_bracket, poisson_from_jets};
pub use integrate::{
    conservation_monitor, geodesic_batch, geodesic_integrate, unified_hamilton_flow, Drift,
    IntegratorMeta, Trajectory,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Ky(#[from] KyError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("second derivatives are not available for {0}")]
    NoHessian(String),
    #[error("time step must be positive and finite, got {0}")]
    Step(f64),
    #[error("left the chart domain at step {step}: {reason}")]
    DomainExit {
        step: usize,
        reason: String,
        /// Samples up to the last valid one.
        partial: Box<Trajectory>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self, DynamicsError> {
        if x.len() != p.len() {
            return Err(DynamicsError::Dimension {
                expected: x.len(),
                got: p.len(),
            });
        }
        Ok(Self { x, p })
    }

    /// Splits `z = (x, p)` in half.
    pub fn from_slice(z: &[f64]) -> Result<Self, DynamicsError> {
        if z.len() % 2 == 1 {
            return Err(DynamicsError::Dimension {
                expected: z.len() + 1,
                got: z.len(),
            });
        }
        let (x, p) = z.split_at(z.len() / 2);
        Ok(Self {
            x: x.to_vec(),
            p: p.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.p);
        z
    }
}

/// Value and derivatives of a phase function; gradients are ordered `(d_x, d_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `2n x 2n`, when available.
    pub hessian: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum PhaseFunction {
    /// Expression over `Vars::Phase(n)`.
    Expr(Expr),
    /// `H = 1/2 g^{mn}(x) p_m p_n`.
    Hamiltonian(MetricSpec),
    /// `K^{mn}(x) p_m p_n` with `K_mn = f_ma g^ab f_bn`.
    KillingQuadratic(MetricSpec, AntisymField),
}

impl PhaseFunction {
    pub fn parse(source: &str, n: usize) -> Result<Self, DynamicsError> {
        Ok(Self::Expr(Expr::parse(source, Vars::Phase(n))?))
    }

    /// `x_i` (0-based `i`).
    pub fn coordinate(n: usize, i: usize) -> Result<Self, DynamicsError> {
        Self::parse(&format!("x{}", i + 1), n)
    }

    /// `p_i` (0-based `i`).
    pub fn momentum(n: usize, i: usize) -> Result<Self, DynamicsError> {
        Self::parse(&format!("p{}", i + 1), n)
    }

    /// Component `L_k = eps_kij x_i p_j` of the angular momentum in 3 dimensions.
    pub fn angular_momentum(k: usize) -> Result<Self, DynamicsError> {
        let (i, j) = match k {
            0 => (2, 3),
            1 => (3, 1),
            2 => (1, 2),
            _ => {
                return Err(DynamicsError::Dimension {
                    expected: 3,
                    got: k + 1,
                })
            }
        };
        Self::parse(&format!("x{i}*p{j} - x{j}*p{i}"), 3)
    }

    /// One component of a field as a phase function: position-chart fields read
    /// `x`, momentum-chart fields read `p`.
    pub fn field_component(field: &AntisymField, key: &[usize]) -> Result<Self, DynamicsError> {
        let n = field.dim();
        let (sign, sorted) = crate::tensor::sort_sign(key);
        let node = match field.components().get(&sorted) {
            Some(e) if sign != 0 => e.root().clone(),
            _ => crate::expr::Node::num(0.0),
        };
        let node = match field.role() {
            ChartRole::Position => node,
            ChartRole::Momentum => node.shift_vars(n),
        };
        let node = if sign < 0 { -node } else { node };
        Ok(Self::Expr(Expr::new(node, Vars::Phase(n))?))
    }

    pub fn label(&self) -> String {
        match self {
            PhaseFunction::Expr(e) => e.unparse(),
            PhaseFunction::Hamiltonian(s) => format!("H[{}]", s.label()),
            PhaseFunction::KillingQuadratic(s, f) => format!("K[{}; {}]", s.label(), f.label()),
        }
    }

    /// Number of position coordinates, if fixed by the function.
    pub fn dim(&self) -> usize {
        match self {
            PhaseFunction::Expr(e) => e.arity() / 2,
            PhaseFunction::Hamiltonian(s) | PhaseFunction::KillingQuadratic(s, _) => s.dim(),
        }
    }

    pub fn value(&self, z: &PhasePoint) -> Result<f64, DynamicsError> {
        Ok(self.jet(z, false)?.value)
    }

    pub fn jet(&self, z: &PhasePoint, hessian: bool) -> Result<PhaseJet, DynamicsError> {
        let n = z.dim();
        if self.dim() != n {
            return Err(DynamicsError::Dimension {
                expected: self.dim(),
                got: n,
            });
        }
        match self {
            PhaseFunction::Expr(e) => {
                let d = e.eval2(&z.to_vec())?;
                Ok(PhaseJet {
                    value: d.value,
                    hessian: hessian.then(|| d.hessian.clone()),
                    gradient: d.gradient,
                })
            }
            PhaseFunction::Hamiltonian(spec) => {
                if hessian {
                    return Err(DynamicsError::NoHessian(self.label()));
                }
                let jet = spec.jet(&z.x)?;
                let p = DVector::from_column_slice(&z.p);
                let v = &jet.g_inv * &p;
                let mut gradient = Vec::with_capacity(2 * n);
                // d_l (1/2 p g^-1 p) = -1/2 (g^-1 p) . d_l g . (g^-1 p)
                gradient.extend(jet.dg.iter().map(|dg| -0.5 * v.dot(&(dg * &v))));
                gradient.extend(v.iter().copied());
                Ok(PhaseJet {
                    value: 0.5 * p.dot(&v),
                    gradient,
                    hessian: None,
                })
            }
            PhaseFunction::KillingQuadratic(spec, field) => {
                if hessian {
                    return Err(DynamicsError::NoHessian(self.label()));
                }
                let conn = Connection::at(spec, &z.x, false)?;
                let (k, dk) = killing_jet(&conn, &field.jet(&z.x)?);
                let ginv = &conn.metric.g_inv;
                let kup = ginv * &k * ginv;
                let p = DVector::from_column_slice(&z.p);
                let mut gradient = Vec::with_capacity(2 * n);
                for (dg, dkl) in conn.metric.dg.iter().zip(&dk) {
                    let dginv: DMatrix<f64> = -(ginv * dg * ginv);
                    let dkup = &dginv * &k * ginv + ginv * dkl * ginv + ginv * &k * &dginv;
                    gradient.push(p.dot(&(dkup * &p)));
                }
                gradient.extend((2.0 * &kup * &p).iter().copied());
                Ok(PhaseJet {
                    value: p.dot(&(&kup * &p)),
                    gradient,
                    hessian: None,
                })
            }
        }
    }
}
