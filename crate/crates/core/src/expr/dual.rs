//! Second-order forward-mode dual numbers.
//!
//! A [`Dual2`] carries a value together with its exact gradient and Hessian
//! with respect to `n` seed variables. Every operation fills only the upper
//! triangle of the Hessian and mirrors it, so the result is symmetric to exact
//! equality.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// Value, gradient and Hessian of a scalar with respect to `n` variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dual2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `n x n`.
    pub hessian: Vec<f64>,
}

impl Dual2 {
    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            value,
            gradient: vec![0.0; n],
            hessian: vec![0.0; n * n],
        }
    }

    /// The `index`-th seed variable evaluated at `value`.
    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        let mut d = Self::constant(value, n);
        d.gradient[index] = 1.0;
        d
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hessian[i * self.dim() + j]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|v| v.is_finite())
            && self.hessian.iter().all(|v| v.is_finite())
    }

    /// Applies a scalar function `phi` given `phi(u)`, `phi'(u)` and `phi''(u)`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let gradient: Vec<f64> = self.gradient.iter().map(|g| f1 * g).collect();
        let mut hessian = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f2 * self.gradient[i] * self.gradient[j] + f1 * self.hess(i, j);
                hessian[i * n + j] = v;
                hessian[j * n + i] = v;
            }
        }
        Self {
            value: f0,
            gradient,
            hessian,
        }
    }

    pub fn recip(&self) -> Self {
        let u = self.value;
        self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    /// Integer power by repeated squaring; negative exponents go through [`Dual2::recip`].
    pub fn powi(&self, k: i64) -> Self {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut result = Self::constant(1.0, self.dim());
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            value: self.value * s,
            gradient: self.gradient.iter().map(|g| g * s).collect(),
            hessian: self.hessian.iter().map(|h| h * s).collect(),
        }
    }
}

impl Add for &Dual2 {
    type Output = Dual2;
    fn add(self, rhs: &Dual2) -> Dual2 {
        Dual2 {
            value: self.value + rhs.value,
            gradient: self
                .gradient
                .iter()
                .zip(&rhs.gradient)
                .map(|(a, b)| a + b)
                .collect(),
            hessian: self
                .hessian
                .iter()
                .zip(&rhs.hessian)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Dual2 {
    type Output = Dual2;
    fn sub(self, rhs: &Dual2) -> Dual2 {
        Dual2 {
            value: self.value - rhs.value,
            gradient: self
                .gradient
                .iter()
                .zip(&rhs.gradient)
                .map(|(a, b)| a - b)
                .collect(),
            hessian: self
                .hessian
                .iter()
                .zip(&rhs.hessian)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Dual2 {
    type Output = Dual2;
    fn mul(self, rhs: &Dual2) -> Dual2 {
        let n = self.dim();
        let (a, b) = (self.value, rhs.value);
        let gradient = self
            .gradient
            .iter()
            .zip(&rhs.gradient)
            .map(|(ga, gb)| a * gb + b * ga)
            .collect();
        let mut hessian = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = a * rhs.hess(i, j)
                    + b * self.hess(i, j)
                    + self.gradient[i] * rhs.gradient[j]
                    + rhs.gradient[i] * self.gradient[j];
                hessian[i * n + j] = v;
                hessian[j * n + i] = v;
            }
        }
        Dual2 {
            value: a * b,
            gradient,
            hessian,
        }
    }
}

impl Neg for &Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 {
            value: -self.value,
            gradient: self.gradient.iter().map(|g| -g).collect(),
            hessian: self.hessian.iter().map(|h| -h).collect(),
        }
    }
}
