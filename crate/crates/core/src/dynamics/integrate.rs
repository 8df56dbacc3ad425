use rayon::prelude::*;
use serde::Serialize;

use super::{DynamicsError, PhaseFunction, PhasePoint};
use crate::geometry::MetricSpec;
use crate::io::format_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorMeta {
    pub method: &'static str,
    pub dt: f64,
    pub steps: usize,
    pub hamiltonian: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub meta: IntegratorMeta,
}

/// Drift of a monitored quantity relative to its initial value. `max_rel`
/// divides by `|Q(z0)|` and equals `max_abs` when `Q(z0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drift {
    pub quantity: String,
    pub initial: f64,
    pub max_abs: f64,
    pub max_rel: f64,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: &'static str,
    samples: usize,
    t_end: f64,
    integrator: &'a IntegratorMeta,
    drift: &'a [Drift],
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&PhasePoint> {
        self.states.last()
    }

    /// CSV with header `t,x1..xn,p1..pn`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, PhasePoint::dim);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("p{i}")));
        let mut out = header.join(",");
        out.push('\n');
        for (t, z) in self.times.iter().zip(&self.states) {
            let row: Vec<String> = std::iter::once(*t)
                .chain(z.to_vec())
                .map(format_f64)
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON sidecar with integrator metadata and drift summary.
    pub fn sidecar_json(&self, drift: &[Drift]) -> String {
        crate::io::to_json_string(&Sidecar {
            schema: crate::SCHEMA,
            samples: self.len(),
            t_end: self.times.last().copied().unwrap_or(0.0),
            integrator: &self.meta,
            drift,
        })
    }
}

fn axpy(z: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    z.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// `dz/dt = (dH/dp, -dH/dx)`.
fn hamilton_rhs(h: &PhaseFunction, z: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    let g = h.jet(&PhasePoint::from_slice(z)?, false)?.gradient;
    let n = z.len() / 2;
    let mut out = Vec::with_capacity(2 * n);
    out.extend_from_slice(&g[n..]);
    out.extend(g[..n].iter().map(|v| -v));
    Ok(out)
}

fn rk4_step(h: &PhaseFunction, z: &[f64], dt: f64) -> Result<Vec<f64>, DynamicsError> {
    let k1 = hamilton_rhs(h, z)?;
    let k2 = hamilton_rhs(h, &axpy(z, 0.5 * dt, &k1))?;
    let k3 = hamilton_rhs(h, &axpy(z, 0.5 * dt, &k2))?;
    let k4 = hamilton_rhs(h, &axpy(z, dt, &k3))?;
    Ok(z.iter()
        .enumerate()
        .map(|(i, v)| v + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn hamilton_flow(
    h: &PhaseFunction,
    z0: &PhasePoint,
    dt: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::Step(dt));
    }
    let meta = IntegratorMeta {
        method: "rk4",
        dt,
        steps,
        hamiltonian: h.label(),
    };
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        meta,
    };
    // validates the initial point
    h.jet(z0, false)?;
    traj.times.push(0.0);
    traj.states.push(z0.clone());
    let mut z = z0.to_vec();
    for step in 1..=steps {
        let next = rk4_step(h, &z, dt).and_then(|next| {
            // the new point must itself be admissible
            h.jet(&PhasePoint::from_slice(&next)?, false)?;
            Ok(next)
        });
        match next {
            Ok(next) => z = next,
            Err(
                e @ (DynamicsError::Geometry(_) | DynamicsError::Expr(_) | DynamicsError::Ky(_)),
            ) => {
                return Err(DynamicsError::DomainExit {
                    step,
                    reason: e.to_string(),
                    partial: Box::new(traj),
                })
            }
            Err(e) => return Err(e),
        }
        traj.times.push(step as f64 * dt);
        traj.states.push(PhasePoint::from_slice(&z)?);
    }
    Ok(traj)
}

/// Geodesic flow of `H = 1/2 g^{mn} p_m p_n` with fixed-step RK4; `steps + 1`
/// samples. Leaving the chart domain returns the valid prefix inside the error.
pub fn geodesic_integrate(
    spec: &MetricSpec,
    z0: &PhasePoint,
    dt: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    if z0.dim() != spec.dim() {
        return Err(DynamicsError::Dimension {
            expected: spec.dim(),
            got: z0.dim(),
        });
    }
    hamilton_flow(&PhaseFunction::Hamiltonian(spec.clone()), z0, dt, steps)
}

/// Independent geodesics in parallel.
pub fn geodesic_batch(
    spec: &MetricSpec,
    starts: &[PhasePoint],
    dt: f64,
    steps: usize,
) -> Vec<Result<Trajectory, DynamicsError>> {
    starts
        .par_iter()
        .map(|z0| geodesic_integrate(spec, z0, dt, steps))
        .collect()
}

/// Flow `dz/dt = J grad H` on `z = (f, f~)` with `J = [[0, I], [-I, 0]]`, so that
/// `df/dt = dH/df~` and `df~/dt = -dH/df`. `h` is read over `Vars::Phase(n)`
/// with `x` standing for the `f`-vector and `p` for the `f~`-vector.
pub fn unified_hamilton_flow(
    h: &PhaseFunction,
    z0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Trajectory, DynamicsError> {
    let z0 = PhasePoint::from_slice(z0)?;
    hamilton_flow(h, &z0, dt, steps)
}

pub fn conservation_monitor(traj: &Trajectory, q: &PhaseFunction) -> Result<Drift, DynamicsError> {
    let first = traj.states.first().ok_or(DynamicsError::Dimension {
        expected: 1,
        got: 0,
    })?;
    let q0 = q.value(first)?;
    let mut max_abs: f64 = 0.0;
    for z in &traj.states[1..] {
        max_abs = max_abs.max((q.value(z)? - q0).abs());
    }
    let max_rel = if q0 == 0.0 {
        max_abs
    } else {
        max_abs / q0.abs()
    };
    Ok(Drift {
        quantity: q.label(),
        initial: q0,
        max_abs,
        max_rel,
    })
}
