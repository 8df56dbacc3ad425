//! Geodesics with conserved-quantity monitors.

use kyano::dynamics::{conservation_monitor, geodesic_integrate, PhaseFunction, PhasePoint};
use kyano::geometry::{ChartRole, MetricSpec};
use kyano::kysym::flat_ky_field;

fn report(spec: &MetricSpec, z0: PhasePoint, quantities: &[PhaseFunction]) {
    let traj = geodesic_integrate(spec, &z0, 1e-3, 10_000).unwrap();
    println!("{} ({} samples)", spec.label(), traj.len());
    for q in quantities {
        let d = conservation_monitor(&traj, q).unwrap();
        println!(
            "  {:40} Q0 = {:+.6e}  rel drift = {:.2e}",
            d.quantity, d.initial, d.max_rel
        );
    }
}

fn main() {
    let flat = MetricSpec::flat(3);
    let z0 = PhasePoint::new(vec![0.3, -0.2, 0.5], vec![0.7, 0.4, -0.1]).unwrap();
    report(
        &flat,
        z0.clone(),
        &[
            PhaseFunction::Hamiltonian(flat.clone()),
            PhaseFunction::KillingQuadratic(flat.clone(), flat_ky_field(3, ChartRole::Position)),
            PhaseFunction::angular_momentum(2).unwrap(),
            // not conserved
            PhaseFunction::coordinate(3, 0).unwrap(),
        ],
    );

    let sphere = MetricSpec::const_curvature3(1.0);
    report(
        &sphere,
        z0,
        &[
            PhaseFunction::Hamiltonian(sphere.clone()),
            PhaseFunction::angular_momentum(0).unwrap(),
            PhaseFunction::parse(
                "(x2*p3 - x3*p2)^2 + (x3*p1 - x1*p3)^2 + (x1*p2 - x2*p1)^2",
                3,
            )
            .unwrap(),
        ],
    );

    let tn = MetricSpec::taub_nut(1.0).unwrap();
    report(
        &tn,
        PhasePoint::new(vec![3.0, 1.2, 0.3, 0.1], vec![0.05, 0.2, 0.3, -0.4]).unwrap(),
        &[
            PhaseFunction::Hamiltonian(tn.clone()),
            PhaseFunction::momentum(4, 2).unwrap(),
            PhaseFunction::momentum(4, 3).unwrap(),
        ],
    );
}
