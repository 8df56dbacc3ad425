//! Parse a chart expression and read off its value, gradient and Hessian.
//!
//! ```text
//! cargo run --example parse_eval -- "x1^2 * sin(x2) + x3" 0.5 1.0 -2
//! ```

use kyano::expr::parse_expression;

fn main() {
    let mut args = std::env::args().skip(1);
    let src = args
        .next()
        .unwrap_or_else(|| "x1^2 * sin(x2) + exp(-x3/2)".to_string());
    let point: Vec<f64> = args
        .map(|a| a.parse().expect("numeric coordinate"))
        .collect();
    let point = if point.is_empty() {
        vec![0.5, 1.0, -2.0]
    } else {
        point
    };

    let e = match parse_expression(&src, point.len()) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("{err}");
            if let Some(off) = err.offset() {
                eprintln!("  {src}\n  {}^", " ".repeat(off));
            }
            std::process::exit(2);
        }
    };
    let d = e.eval2(&point).expect("point inside the domain");

    println!("f        = {}", e.unparse());
    println!("f(x)     = {:.12}", d.value);
    println!("grad f   = {:.12?}", d.gradient);
    for i in 0..point.len() {
        let row: Vec<f64> = (0..point.len()).map(|j| d.hess(i, j)).collect();
        println!("hess[{i}]  = {row:.12?}");
    }
}
