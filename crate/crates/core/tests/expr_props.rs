use kyano::expr::{parse_expression, Expr};
use proptest::prelude::*;

const N: usize = 3;

/// Sum of monomials `c * x1^a * x2^b * x3^c` with total degree at most 4.
fn polynomial() -> impl Strategy<Value = String> {
    let monomial =
        (-3.0..3.0f64, prop::array::uniform3(0u32..=4)).prop_filter_map("degree <= 4", |(c, e)| {
            (e.iter().sum::<u32>() <= 4).then(|| {
                let mut s = format!("({c:.6})");
                for (i, k) in e.iter().enumerate() {
                    if *k > 0 {
                        s.push_str(&format!(" * x{}^{k}", i + 1));
                    }
                }
                s
            })
        });
    prop::collection::vec(monomial, 1..6).prop_map(|m| m.join(" + "))
}

/// Compositions of elementary functions, smooth on `[-1, 1]^3`.
fn smooth() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x1".to_string()),
        Just("x2".to_string()),
        Just("x3".to_string()),
        (-2.0..2.0f64).prop_map(|c| format!("{c:.4}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + ({b})^2)")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(({a}) / 4)")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0..1.0f64)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

/// Central differences of the value (gradient) and of the exact gradient
/// (hessian), step `1e-5`.
fn check_against_differences(e: &Expr, x: &[f64; 3]) -> Result<(), TestCaseError> {
    const H: f64 = 1e-5;
    let d = e.eval2(x).unwrap();
    prop_assert!(close(d.value, e.value(x), 1e-14));
    for i in 0..N {
        let (mut xp, mut xm) = (*x, *x);
        xp[i] += H;
        xm[i] -= H;
        let fd = (e.value(&xp) - e.value(&xm)) / (2.0 * H);
        prop_assert!(
            close(d.gradient[i], fd, 1e-6),
            "d{} {} vs {}",
            i,
            d.gradient[i],
            fd
        );
        let (gp, gm) = (e.eval2(&xp).unwrap(), e.eval2(&xm).unwrap());
        for j in 0..N {
            let fd = (gp.gradient[j] - gm.gradient[j]) / (2.0 * H);
            prop_assert!(
                close(d.hess(i, j), fd, 1e-6),
                "d{}d{} {} vs {}",
                i,
                j,
                d.hess(i, j),
                fd
            );
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn polynomial_derivatives_match_differences(src in polynomial(), x in point()) {
        let e = parse_expression(&src, N).unwrap();
        check_against_differences(&e, &x)?;
    }

    #[test]
    fn smooth_derivatives_match_differences(src in smooth(), x in point()) {
        let e = parse_expression(&src, N).unwrap();
        check_against_differences(&e, &x)?;
    }

    #[test]
    fn hessian_is_symmetric(src in smooth(), x in point()) {
        let d = parse_expression(&src, N).unwrap().eval2(&x).unwrap();
        for i in 0..N {
            for j in 0..N {
                prop_assert_eq!(d.hess(i, j), d.hess(j, i));
            }
        }
    }

    #[test]
    fn unparse_round_trip(src in prop_oneof![polynomial(), smooth()],
                          xs in prop::collection::vec(point(), 100)) {
        let a = parse_expression(&src, N).unwrap();
        let b = parse_expression(&a.unparse(), N).unwrap();
        for x in &xs {
            prop_assert_eq!(a.value(x), b.value(x), "{} vs {}", src, a.unparse());
        }
        prop_assert_eq!(a.unparse(), b.unparse());
    }
}
