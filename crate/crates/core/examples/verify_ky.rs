//! Killing-Yano checks on flat space, the Taub-NUT catalog fields and the
//! printed constant-curvature components.

use kyano::geometry::{dual_metric, ChartRole, CurvatureChart, MetricSpec};
use kyano::kysym::{
    constcurv_printed_field, flat_ky_field, ky_report, taubnut_field, AntisymField, KyTolerances,
};
use kyano::sampling;

fn run(spec: &MetricSpec, field: &AntisymField) {
    let pts = sampling::regular_points(spec, &mut sampling::rng(0), 20);
    let r = ky_report(spec, field, &pts, KyTolerances::default()).unwrap();
    println!("{}", r.to_table());
}

fn main() {
    for n in 3..=5 {
        let spec = MetricSpec::flat(n);
        run(&spec, &flat_ky_field(n, ChartRole::Position));
        // the momentum twin on the dual chart gives the same residuals
        run(&dual_metric(&spec), &flat_ky_field(n, ChartRole::Momentum));
    }

    let tn = MetricSpec::taub_nut(1.0).unwrap();
    for i in 1..=3 {
        run(&tn, &taubnut_field(i, 1.0, ChartRole::Position).unwrap());
    }

    let s3 = MetricSpec::const_curvature3_in(1.0, CurvatureChart::Spherical);
    run(&s3, &constcurv_printed_field(1.0, ChartRole::Position));

    // a hand-written field: f_12 = x1 is not Killing-Yano
    let bogus = AntisymField::from_json_str(r#"{"dim": 3, "rank": 2, "components": {"12": "x1"}}"#)
        .unwrap();
    run(&MetricSpec::flat(3), &bogus);
}
