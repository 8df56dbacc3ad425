//! Seeded sample points.
//!
//! All randomness goes through [`SampleRng`] (ChaCha8 seeded from a `u64`), so a
//! seed fully determines every sample set.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{CurvatureChart, MetricKind, MetricSpec};

pub type SampleRng = ChaCha8Rng;

/// Name recorded in reports.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// Distance kept from chart singularities.
pub const MARGIN: f64 = 0.1;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_box(rng: &mut SampleRng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect()
}

/// Uniform points from the chart box of `spec`, away from its singular loci.
pub fn regular_points(spec: &MetricSpec, rng: &mut SampleRng, count: usize) -> Vec<Vec<f64>> {
    let polar = |rng: &mut SampleRng, r_lo: f64, r_hi: f64| {
        vec![
            rng.random_range(r_lo..r_hi),
            rng.random_range(MARGIN..PI - MARGIN),
            rng.random_range(0.0..2.0 * PI),
        ]
    };
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 1000 * count.max(1),
            "no regular points found in the chart box of {}",
            spec.label()
        );
        let p = match spec.kind() {
            MetricKind::Flat { dim } => uniform_box(rng, *dim, 1.0),
            MetricKind::ConstCurvature3 { k, chart } => {
                let p = match chart {
                    CurvatureChart::Cartesian => uniform_box(rng, 3, 1.0),
                    CurvatureChart::Spherical => polar(rng, MARGIN, 1.0),
                };
                let r2 = match chart {
                    CurvatureChart::Cartesian => p.iter().map(|q| q * q).sum::<f64>(),
                    CurvatureChart::Spherical => p[0] * p[0],
                };
                if (1.0 + k * r2 / 4.0).abs() < MARGIN {
                    continue;
                }
                p
            }
            MetricKind::TaubNut { .. } => {
                let mut p = polar(rng, 0.5, 3.0);
                p.push(rng.random_range(0.0..4.0 * PI));
                p
            }
            MetricKind::Custom { dim, .. } => {
                let p = uniform_box(rng, *dim, 1.0);
                if spec.jet(&p).is_err() {
                    continue;
                }
                p
            }
        };
        out.push(p);
    }
    out
}
