//! The unified Hamilton flow on Killing-Yano vectors against the ordinary
//! geodesic flow in flat space.
//!
//! In three dimensions `f_ij = eps_kij x_k` has independent components
//! `(f_12, f_13, f_23) = (x3, -x2, x1)`, and likewise `f~` for `p`. The free
//! Hamiltonian reads `H = 1/2 |f~|^2` in these variables.

use kyano::dynamics::{geodesic_integrate, unified_hamilton_flow, PhaseFunction, PhasePoint};
use kyano::geometry::MetricSpec;

fn to_f(v: &[f64]) -> [f64; 3] {
    [v[2], -v[1], v[0]]
}

fn main() {
    let (x0, p0) = ([0.4, -0.3, 0.2], [-0.5, 0.8, 0.6]);
    let geo = geodesic_integrate(
        &MetricSpec::flat(3),
        &PhasePoint::new(x0.to_vec(), p0.to_vec()).unwrap(),
        1e-3,
        1000,
    )
    .unwrap();

    let h = PhaseFunction::parse("(p1^2 + p2^2 + p3^2) / 2", 3).unwrap();
    let z0: Vec<f64> = to_f(&x0).into_iter().chain(to_f(&p0)).collect();
    let uni = unified_hamilton_flow(&h, &z0, 1e-3, 1000).unwrap();

    let mut worst: f64 = 0.0;
    for (g, u) in geo.states.iter().zip(&uni.states) {
        let expect: Vec<f64> = to_f(&g.x).into_iter().chain(to_f(&g.p)).collect();
        for (a, b) in expect.iter().zip(u.to_vec()) {
            worst = worst.max((a - b).abs());
        }
    }
    let last = uni.last().unwrap();
    println!("t = {:.3}", uni.times.last().unwrap());
    println!("f  = {:+.9?}", last.x);
    println!("f~ = {:+.9?}", last.p);
    println!(
        "max |unified - geodesic| over {} samples: {worst:.2e}",
        uni.len()
    );
}
