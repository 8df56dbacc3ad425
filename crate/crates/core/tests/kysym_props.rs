use kyano::expr::parse_expression;
use kyano::geometry::{dual_metric, ChartRole, CurvatureChart, MetricSpec};
use kyano::kysym::{
    constcurv_printed_field, flat_ky_field, flat_ky_pair, killing_equation_residual,
    killing_from_ky, ky_report, ky_residual, ky_solve_ansatz, reconstruct_momentum,
    reconstruct_position, taubnut_field, AntisymField, KyTolerances, SolverOptions,
};
use kyano::sampling;
use kyano::tensor::max_abs;
use proptest::prelude::*;

fn vectors() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0..1.0f64, n),
            prop::collection::vec(-1.0..1.0f64, n),
        )
    })
}

fn ky_cases() -> Vec<(MetricSpec, AntisymField)> {
    let mut cases = Vec::new();
    for n in 2..=5 {
        cases.push((MetricSpec::flat(n), flat_ky_field(n, ChartRole::Position)));
    }
    let tn = MetricSpec::taub_nut(1.0).unwrap();
    for i in 1..=3 {
        cases.push((
            tn.clone(),
            taubnut_field(i, 1.0, ChartRole::Position).unwrap(),
        ));
    }
    cases
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn flat_pair_round_trip((x, p) in vectors()) {
        let (f, ft) = flat_ky_pair(x.len(), &x, &p).unwrap();
        let (xr, pr) = (reconstruct_position(&f).unwrap(), reconstruct_momentum(&ft).unwrap());
        for (a, b) in x.iter().zip(&xr).chain(p.iter().zip(&pr)) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dual_chart_is_a_relabeling(seed in any::<u64>()) {
        let mut cases = ky_cases();
        for k in [-1.0, 1.0] {
            let s = MetricSpec::const_curvature3_in(k, CurvatureChart::Spherical);
            cases.push((s, constcurv_printed_field(k, ChartRole::Position)));
        }
        for (spec, field) in cases {
            let pts = sampling::regular_points(&spec, &mut sampling::rng(seed), 8);
            let a = ky_report(&spec, &field, &pts, KyTolerances::default()).unwrap();
            let b = ky_report(&dual_metric(&spec), &field.twin(), &pts, KyTolerances::default()).unwrap();
            prop_assert!((a.max_ky_residual - b.max_ky_residual).abs() <= 1e-12);
            prop_assert!((a.max_covariant_constancy_residual - b.max_covariant_constancy_residual).abs() <= 1e-12);
            prop_assert_eq!(a.is_ky, b.is_ky);
        }
    }

    #[test]
    fn killing_tensor_from_ky_field(seed in any::<u64>()) {
        for (spec, field) in ky_cases().into_iter().filter(|(_, f)| f.rank() == 2) {
            for x in sampling::regular_points(&spec, &mut sampling::rng(seed), 5) {
                prop_assert!(max_abs(&ky_residual(&spec, &field, &x).unwrap()) <= 1e-10);
                let r = max_abs(&killing_equation_residual(&spec, &field, &x).unwrap());
                prop_assert!(r <= 1e-8, "{} {} {:e}", spec.label(), field.label(), r);
            }
        }
    }

    #[test]
    fn flat_killing_tensor_ground_truth(x in prop::array::uniform3(-1.0..1.0f64)) {
        let k = killing_from_ky(&MetricSpec::flat(3), &flat_ky_field(3, ChartRole::Position), &x)
            .unwrap()
            .0;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        for i in 0..3 {
            for j in 0..3 {
                let want = x[i] * x[j] - if i == j { r2 } else { 0.0 };
                prop_assert!((k[(i, j)] - want).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn solver_fields_hold_at_fresh_points(seed in any::<u64>()) {
        let omega = "(1 + (x1^2 + x2^2 + x3^2)/4)^3";
        let curved: Vec<String> = ["1", "x1", "x2", "x3", "x1*x1", "x1*x2", "x1*x3", "x2*x2", "x2*x3", "x3*x3"]
            .iter()
            .map(|m| format!("{m} / {omega}"))
            .collect();
        let cases = [
            (MetricSpec::flat(3), vec!["1".to_string(), "x1".into(), "x2".into(), "x3".into()], 12),
            (MetricSpec::const_curvature3(1.0), curved, 20),
        ];
        for (spec, src, samples) in cases {
            let basis: Vec<_> = src.iter().map(|s| parse_expression(s, 3).unwrap()).collect();
            let pts = sampling::regular_points(&spec, &mut sampling::rng(seed), samples);
            let sol = ky_solve_ansatz(&spec, &basis, &pts, SolverOptions::default()).unwrap();
            prop_assert_eq!(sol.dimension, 4);
            let fresh = sampling::regular_points(&spec, &mut sampling::rng(seed ^ 0x5eed), 50);
            for f in &sol.fields {
                for x in &fresh {
                    prop_assert!(max_abs(&ky_residual(&spec, f, x).unwrap()) <= 1e-8);
                }
            }
        }
    }
}
