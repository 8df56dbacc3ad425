//! Christoffel symbols and scalar curvature across the metric catalog.

use kyano::geometry::{christoffel_at, curvature_at, CurvatureChart, MetricSpec};

fn main() {
    let cases = [
        (MetricSpec::flat(3), vec![0.3, -0.2, 0.8]),
        (MetricSpec::const_curvature3(1.0), vec![0.3, -0.2, 0.8]),
        (MetricSpec::const_curvature3(-1.0), vec![0.3, -0.2, 0.8]),
        (
            MetricSpec::const_curvature3_in(0.5, CurvatureChart::Spherical),
            vec![0.7, 1.1, 0.4],
        ),
        (MetricSpec::taub_nut(1.0).unwrap(), vec![2.0, 1.2, 0.3, 0.1]),
    ];
    for (spec, x) in &cases {
        let curv = curvature_at(spec, x).unwrap();
        let gamma = christoffel_at(spec, x).unwrap();
        // Taub-NUT is Ricci flat, the 3-sphere charts have R = 6K
        let ricci_norm = curv.ricci.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        println!(
            "{:32} R = {:>+.12}  max|Ric| = {:.2e}  Gamma^1_11 = {:+.6}",
            spec.label(),
            curv.scalar,
            ricci_norm,
            gamma.get(0, 0, 0)
        );
    }
}
