//! Recover Killing-Yano two-forms from a linear ansatz.

use kyano::expr::{parse_expression, Expr};
use kyano::geometry::MetricSpec;
use kyano::kysym::{ky_solve_ansatz, SolverOptions};
use kyano::sampling;

fn basis(src: &[String]) -> Vec<Expr> {
    src.iter()
        .map(|s| parse_expression(s, 3).unwrap())
        .collect()
}

fn solve(spec: &MetricSpec, src: &[String], samples: usize) {
    let pts = sampling::regular_points(spec, &mut sampling::rng(0), samples);
    let sol = ky_solve_ansatz(spec, &basis(src), &pts, SolverOptions::default()).unwrap();
    println!(
        "{}: {} unknowns, {} equations, solution space of dimension {}",
        spec.label(),
        sol.unknowns,
        sol.equations,
        sol.dimension
    );
    let tail: Vec<String> = sol
        .singular_values
        .iter()
        .rev()
        .take(sol.dimension + 2)
        .map(|s| format!("{s:.1e}"))
        .collect();
    println!("  smallest singular values: {}", tail.join(" "));
    for f in &sol.fields {
        let comps: Vec<String> = f
            .components()
            .iter()
            .map(|(k, e)| {
                let text = e.unparse();
                let shown = if text.len() > 80 {
                    format!("<{} chars>", text.len())
                } else {
                    text
                };
                format!("f_{}{} = {}", k[0] + 1, k[1] + 1, shown)
            })
            .collect();
        println!("  {}", comps.join(";  "));
    }
}

fn main() {
    let linear: Vec<String> = ["1", "x1", "x2", "x3"].map(String::from).to_vec();
    solve(&MetricSpec::flat(3), &linear, 12);

    // conformal factor cubed over monomials of degree <= 2
    let omega = "(1 + (x1^2 + x2^2 + x3^2)/4)^3";
    let mut mono = vec!["1".to_string()];
    for i in 1..=3 {
        mono.push(format!("x{i}"));
        for j in i..=3 {
            mono.push(format!("x{i}*x{j}"));
        }
    }
    let curved: Vec<String> = mono.iter().map(|m| format!("{m} / {omega}")).collect();
    solve(&MetricSpec::const_curvature3(1.0), &curved, 20);
}
