//! Multipole and dynamical-symmetry tensors of a point particle in flat
//! 3-space, in direct `(x, p)` form and in Killing-Yano form.
//!
//! Killing-Yano forms are computed only from `f_ij = eps_kij x_k` and
//! `f~_ij = eps_kij p_k` as returned by [`flat_ky_pair`]; contractions use
//! `f^2 = f_ij f_ij` and `f.f~ = f_ij f~_ij`.

mod suite;

use nalgebra::{Matrix3, Vector3};

use crate::dynamics::PhasePoint;
use crate::kysym::flat_ky_pair;

pub use suite::{
    fit_quadrupole, identity_suite, Expectations, IdentityReport, IdentityRow, Mismatch,
    QuadrupoleFit, Verdict, IDENTITY_TOLERANCE,
};

pub type Octupole = [[[f64; 3]; 3]; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleSet {
    pub d_dot: Vector3<f64>,
    pub l: Vector3<f64>,
    pub dilatation: f64,
    pub q_direct: Matrix3<f64>,
    pub q_ky_paper: Matrix3<f64>,
    pub q_ky_corrected: Matrix3<f64>,
    pub shear: Matrix3<f64>,
    pub t_dipole_direct: Vector3<f64>,
    pub t_dipole_ky: Vector3<f64>,
    pub t_dipole_transversal: Vector3<f64>,
    pub c: Vector3<f64>,
    pub c_ky: Vector3<f64>,
    pub a: Vector3<f64>,
    pub a_tilde_ky: Vector3<f64>,
    pub a_tilde_swap: Vector3<f64>,
    pub mu_ky: Vector3<f64>,
    pub dilatation_ky: f64,
    pub r2_ky: f64,
    pub p2_ky: f64,
    pub mu_quad_direct: Matrix3<f64>,
    pub mu_quad_ky: Matrix3<f64>,
    pub t_quad_ky: Matrix3<f64>,
    pub t_quad_transversal: Matrix3<f64>,
    pub octupole_direct: Octupole,
}

/// The Killing-Yano pair at a phase point with its scalar contractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KyPair {
    pub f: Matrix3<f64>,
    pub f_tilde: Matrix3<f64>,
}

impl KyPair {
    pub fn at(z: &PhasePoint) -> Self {
        let (f, ft) = flat_ky_pair(3, &z.x, &z.p).expect("three-dimensional phase point");
        let m = |a: &ndarray::ArrayD<f64>| Matrix3::from_fn(|i, j| a[[i, j].as_slice()]);
        Self {
            f: m(&f),
            f_tilde: m(&ft),
        }
    }

    /// `f^2 = f_ij f_ij`
    pub fn f2(&self) -> f64 {
        self.f.component_mul(&self.f).sum()
    }

    /// `f~^2`
    pub fn ft2(&self) -> f64 {
        self.f_tilde.component_mul(&self.f_tilde).sum()
    }

    /// `f.f~ = f_ij f~_ij`
    pub fn dot(&self) -> f64 {
        self.f.component_mul(&self.f_tilde).sum()
    }
}

/// `v_i = eps_ijk m_jk`
pub fn eps_contract(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        m[(1, 2)] - m[(2, 1)],
        m[(2, 0)] - m[(0, 2)],
        m[(0, 1)] - m[(1, 0)],
    )
}

/// `m_jk = eps_ijk v_i`
pub fn eps_expand(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, v[2], -v[1], -v[2], 0.0, v[0], v[1], -v[0], 0.0)
}

fn vec3(v: &[f64]) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Direct-form Runge-Lenz vector `A_i = 1/2 x_i p^2 - p_i D - 1/2 x_i`.
pub fn runge_lenz(x: &Vector3<f64>, p: &Vector3<f64>) -> Vector3<f64> {
    0.5 * x * p.norm_squared() - p * x.dot(p) - 0.5 * x
}

/// Direct-form conformal operator `C_i = 2 x_i D - r^2 p_i`.
pub fn conformal(x: &Vector3<f64>, p: &Vector3<f64>) -> Vector3<f64> {
    2.0 * x * x.dot(p) - p * x.norm_squared()
}

/// Symmetrized traceless third moment
/// `x_i x_j x_k - r^2/5 (x_i d_jk + x_j d_ik + x_k d_ij)`.
pub fn octupole_direct(x: &Vector3<f64>) -> Octupole {
    let r2 = x.norm_squared();
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut out = [[[0.0; 3]; 3]; 3];
    for (i, plane) in out.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                // sorted indices make the result exactly symmetric
                let mut s = [i, j, k];
                s.sort_unstable();
                let [a, b, c] = s;
                *v = x[a] * x[b] * x[c]
                    - r2 / 5.0 * (x[a] * d(b, c) + x[b] * d(a, c) + x[c] * d(a, b));
            }
        }
    }
    out
}

/// Every tensor at one phase point.
///
/// # Panics
/// If `z` is not three-dimensional.
pub fn evaluate_multipoles(z: &PhasePoint) -> MultipoleSet {
    assert_eq!(z.dim(), 3, "multipoles are defined in three dimensions");
    let x = vec3(&z.x);
    let p = vec3(&z.p);
    let r2 = x.norm_squared();
    let dil = x.dot(&p);
    let id = Matrix3::identity();
    let l = x.cross(&p);

    let ky = KyPair::at(z);
    let (f, ft) = (ky.f, ky.f_tilde);
    let f2 = ky.f2();
    let fdot = ky.dot();
    let ff = f * f;
    let ef = eps_contract(&f);
    let eft = eps_contract(&ft);

    let mu_ky = Vector3::from_fn(|i, _| {
        let mut acc = 0.0;
        for k in 0..3 {
            // eps_klm f~_lm = (eps_contract f~)_k
            acc += f[(k, i)] * eft[k];
        }
        0.5 * acc
    });
    let fff = ff * ft;

    MultipoleSet {
        d_dot: p,
        l,
        dilatation: dil,
        q_direct: x * x.transpose() - r2 / 3.0 * id,
        q_ky_paper: 0.25 * (ff - f2 / 3.0 * id),
        q_ky_corrected: ff + f2 / 3.0 * id,
        shear: x * p.transpose() + p * x.transpose() - 2.0 / 3.0 * dil * id,
        t_dipole_direct: 0.1 * (x * dil - 2.0 * r2 * p),
        t_dipole_ky: (ef * fdot - 2.0 * eft * f2) / 40.0,
        t_dipole_transversal: ef * fdot / 8.0,
        c: conformal(&x, &p),
        c_ky: 0.25 * (2.0 * ef * fdot - eft * f2),
        a: runge_lenz(&x, &p),
        a_tilde_ky: ((f2 - 2.0) * eft - 2.0 * ef * fdot) / 8.0,
        a_tilde_swap: runge_lenz(&p, &x),
        mu_ky,
        dilatation_ky: 0.5 * fdot,
        r2_ky: 0.5 * f2,
        p2_ky: 0.5 * ky.ft2(),
        mu_quad_direct: (x * l.transpose() + l * x.transpose()) / 3.0,
        mu_quad_ky: -(fff + fff.transpose()) / 3.0,
        t_quad_ky: (ff - 0.25 * f2 * id) * fdot - 2.5 * f * ft * f2,
        t_quad_transversal: (ff - f2 / 3.0 * id) * fdot / 8.0,
        octupole_direct: octupole_direct(&x),
    }
}

/// Which pairing of the generator formula reproduced the Killing-Yano pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// `f_jk = -eps_ijk (2 A~_i + C_i)`, `f~_jk = -eps_ijk (2 A_i + C~_i)`
    Printed,
    /// `f_jk = -eps_ijk (2 A_i + C~_i)`, `f~_jk = -eps_ijk (2 A~_i + C_i)`
    Swapped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorReconstruction {
    pub f: Matrix3<f64>,
    pub f_tilde: Matrix3<f64>,
    pub pairing: Pairing,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("neither generator pairing reproduces the Killing-Yano pair (residuals {printed:e}, {swapped:e})")]
pub struct PairingError {
    pub printed: f64,
    pub swapped: f64,
}

/// Rebuilds `(f, f~)` from the Runge-Lenz and conformal generators and their
/// momentum conjugates, trying the printed pairing first.
pub fn reconstruct_ky_from_generators(
    z: &PhasePoint,
) -> Result<GeneratorReconstruction, PairingError> {
    const TOL: f64 = 1e-10;
    let x = vec3(&z.x);
    let p = vec3(&z.p);
    let ky = KyPair::at(z);
    // -eps_ijk v_i
    let from = |v: Vector3<f64>| -eps_expand(&v);
    let tilde_side = 2.0 * runge_lenz(&p, &x) + conformal(&x, &p);
    let plain_side = 2.0 * runge_lenz(&x, &p) + conformal(&p, &x);
    let err = |f: &Matrix3<f64>, ft: &Matrix3<f64>| {
        (f - ky.f).abs().max().max((ft - ky.f_tilde).abs().max())
    };
    let printed = (from(tilde_side), from(plain_side));
    let swapped = (from(plain_side), from(tilde_side));
    let (ep, es) = (err(&printed.0, &printed.1), err(&swapped.0, &swapped.1));
    if ep <= TOL {
        Ok(GeneratorReconstruction {
            f: printed.0,
            f_tilde: printed.1,
            pairing: Pairing::Printed,
        })
    } else if es <= TOL {
        Ok(GeneratorReconstruction {
            f: swapped.0,
            f_tilde: swapped.1,
            pairing: Pairing::Swapped,
        })
    } else {
        Err(PairingError {
            printed: ep,
            swapped: es,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(x: [f64; 3], p: [f64; 3]) -> PhasePoint {
        PhasePoint::new(x.to_vec(), p.to_vec()).unwrap()
    }

    fn close_m(a: &Matrix3<f64>, b: &Matrix3<f64>) -> bool {
        (a - b).abs().max() <= 1e-15
    }

    #[test]
    fn reference_point_direct_forms() {
        let m = evaluate_multipoles(&z([0.0, 0.0, 1.0], [0.0, 1.0, 0.0]));
        assert_eq!(m.l, Vector3::new(-1.0, 0.0, 0.0));
        assert_eq!(m.dilatation, 0.0);
        assert_eq!(m.t_dipole_direct, Vector3::new(0.0, -0.2, 0.0));
        assert_eq!(m.c, Vector3::new(0.0, -1.0, 0.0));
        assert_eq!(m.a, Vector3::zeros());
        assert!(close_m(
            &m.q_direct,
            &Matrix3::from_diagonal(&Vector3::new(-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0))
        ));
        let mut s = Matrix3::zeros();
        s[(1, 2)] = 1.0;
        s[(2, 1)] = 1.0;
        assert_eq!(m.shear, s);
        let mut mq = Matrix3::zeros();
        mq[(0, 2)] = -1.0 / 3.0;
        mq[(2, 0)] = -1.0 / 3.0;
        assert!(close_m(&m.mu_quad_direct, &mq));
        assert_eq!(m.mu_ky, Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn printed_quadrupole_at_reference_point() {
        let m = evaluate_multipoles(&z([0.0, 0.0, 1.0], [0.0, 1.0, 0.0]));
        let expect = Matrix3::from_diagonal(&Vector3::new(-5.0 / 12.0, -5.0 / 12.0, -1.0 / 6.0));
        assert!(close_m(&m.q_ky_paper, &expect));
        assert!((m.q_ky_paper.trace() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_position() {
        let m = evaluate_multipoles(&z([0.0; 3], [0.3, -0.2, 0.9]));
        assert_eq!(m.q_direct, Matrix3::zeros());
        assert_eq!(m.l, Vector3::zeros());
        assert_eq!(m.t_dipole_direct, Vector3::zeros());
        assert_eq!(m.c, Vector3::zeros());
    }

    #[test]
    fn octupole_is_symmetric_and_traceless() {
        let o = octupole_direct(&Vector3::new(0.3, -0.8, 0.5));
        for i in 0..3 {
            let tr: f64 = (0..3).map(|j| o[i][j][j]).sum();
            assert!(tr.abs() < 1e-15);
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(o[i][j][k], o[j][i][k]);
                    assert_eq!(o[i][j][k], o[i][k][j]);
                }
            }
        }
    }

    #[test]
    fn eps_helpers_are_inverse_up_to_two() {
        let v = Vector3::new(1.0, -2.0, 0.5);
        assert_eq!(eps_contract(&eps_expand(&v)), 2.0 * v);
        let ky = KyPair::at(&z([0.0, 0.0, 1.0], [0.0; 3]));
        assert_eq!(ky.f, eps_expand(&Vector3::new(0.0, 0.0, 1.0)));
    }

    #[test]
    fn generator_reconstruction_uses_swapped_pairing() {
        let r = reconstruct_ky_from_generators(&z([0.0, 0.0, 1.0], [0.0, 1.0, 0.0])).unwrap();
        assert_eq!(r.pairing, Pairing::Swapped);
        assert_eq!(r.f_tilde[(0, 2)], -1.0);
        let r = reconstruct_ky_from_generators(&z([0.4, -0.3, 0.2], [0.0; 3])).unwrap();
        assert_eq!(r.pairing, Pairing::Swapped);
        let r = reconstruct_ky_from_generators(&z([0.0; 3], [0.0; 3])).unwrap();
        assert_eq!(r.pairing, Pairing::Printed);
        assert_eq!(r.f, Matrix3::zeros());
    }
}
