//! Closed-form scalar expressions over chart coordinates.
//!
//! Expressions are parsed from text (see [`parser`] for the grammar) or built
//! with the operator overloads on [`Node`], and evaluated together with exact
//! first and second derivatives through [`Dual2`].

mod ast;
mod dual;
pub mod parser;

use std::fmt;

use thiserror::Error;

pub use ast::{BinOp, Func, Node, Vars};
pub use dual::Dual2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("variable '{name}' at byte {offset} is outside the chart dimension {dim}")]
    VariableRange {
        offset: usize,
        name: String,
        dim: usize,
    },
    #[error("expression uses variable index {index} but only {arity} are declared")]
    Arity { index: usize, arity: usize },
    #[error("point has {got} coordinates, expression expects {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("singular evaluation at `{node}`: {reason}")]
    Singular { node: String, reason: String },
}

impl ExprError {
    /// Byte offset into the source text, for parse errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownFunction { offset, .. }
            | ExprError::VariableRange { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

/// A parsed expression together with its variable layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Vars,
}

impl Expr {
    /// Wraps a built tree, checking that every variable index is declared.
    pub fn new(root: Node, vars: Vars) -> Result<Self, ExprError> {
        if let Some(index) = root.max_var() {
            if index >= vars.arity() {
                return Err(ExprError::Arity {
                    index,
                    arity: vars.arity(),
                });
            }
        }
        Ok(Self { root, vars })
    }

    pub fn constant(value: f64, vars: Vars) -> Self {
        Self {
            root: Node::Num(value),
            vars,
        }
    }

    pub fn parse(source: &str, vars: Vars) -> Result<Self, ExprError> {
        let root = parser::parse(source, vars)?;
        Ok(Self { root, vars })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.arity()
    }

    pub fn is_constant(&self) -> bool {
        self.root.is_constant()
    }

    /// Plain value, no derivatives and no singularity checks.
    pub fn value(&self, point: &[f64]) -> f64 {
        self.root.eval(point)
    }

    pub fn eval2(&self, point: &[f64]) -> Result<Dual2, ExprError> {
        if point.len() != self.arity() {
            return Err(ExprError::PointDimension {
                expected: self.arity(),
                got: point.len(),
            });
        }
        self.root.eval2(point, self.vars)
    }

    /// Fully parenthesized text that parses back to an equivalent tree.
    pub fn unparse(&self) -> String {
        self.root.render(self.vars)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.unparse())
    }
}

/// Parses an expression in the coordinates `x1..x{dim}`.
pub fn parse_expression(source: &str, dim: usize) -> Result<Expr, ExprError> {
    Expr::parse(source, Vars::Coords(dim))
}

pub fn eval2(expr: &Expr, point: &[f64]) -> Result<Dual2, ExprError> {
    expr.eval2(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_with_standard_precedence() {
        let e = parse_expression("x1^2 + sin(x2)", 2).unwrap();
        assert_eq!(e.value(&[2.0, 0.0]), 4.0);
        let e = parse_expression("1 + 2 * 3 - 4 / 2", 0).unwrap();
        assert_eq!(e.value(&[]), 5.0);
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse_expression("-x1^2", 1).unwrap();
        assert_eq!(e.value(&[3.0]), -9.0);
        let e = parse_expression("2^-1", 0).unwrap();
        assert_eq!(e.value(&[]), 0.5);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_expression("2^3^2", 0).unwrap();
        assert_eq!(e.value(&[]), 512.0);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse_expression("(x1", 1).unwrap_err();
        assert!(matches!(err, ExprError::Syntax { offset: 3, .. }), "{err}");
    }

    #[test]
    fn variable_out_of_range() {
        let err = parse_expression("x3", 2).unwrap_err();
        assert!(matches!(err, ExprError::VariableRange { offset: 0, .. }));
        assert!(matches!(
            parse_expression("x0", 2),
            Err(ExprError::VariableRange { .. })
        ));
    }

    #[test]
    fn unknown_function() {
        let err = parse_expression("1 + cosh(x1)", 1).unwrap_err();
        assert_eq!(
            err,
            ExprError::UnknownFunction {
                offset: 4,
                name: "cosh".into()
            }
        );
    }

    #[test]
    fn rejects_implicit_multiplication_and_hex() {
        assert!(parse_expression("2x1", 1).is_err());
        assert!(parse_expression("0x1F", 1).is_err());
        assert!(parse_expression("", 1).is_err());
        assert!(parse_expression("1e", 1).is_err());
    }

    #[test]
    fn number_literals() {
        for (src, v) in [("1.5e2", 150.0), (".25", 0.25), ("3.", 3.0), ("2E-1", 0.2)] {
            assert_eq!(parse_expression(src, 0).unwrap().value(&[]), v, "{src}");
        }
    }

    #[test]
    fn eval2_square() {
        let d = eval2(&parse_expression("x1*x1", 1).unwrap(), &[3.0]).unwrap();
        assert_eq!(
            (d.value, d.gradient.clone(), d.hessian.clone()),
            (9.0, vec![6.0], vec![2.0])
        );
    }

    #[test]
    fn eval2_sin_at_zero() {
        let d = eval2(&parse_expression("sin(x1)", 1).unwrap(), &[0.0]).unwrap();
        assert_eq!((d.value, d.gradient[0], d.hessian[0]), (0.0, 1.0, 0.0));
    }

    #[test]
    fn eval2_pole_is_singular() {
        let err = eval2(&parse_expression("1/(1 + x1)", 1).unwrap(), &[-1.0]).unwrap_err();
        match err {
            ExprError::Singular { node, .. } => assert_eq!(node, "(1.0 / (1.0 + x1))"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn eval2_domain_errors() {
        for src in ["sqrt(x1)", "ln(x1)", "x1^0.5"] {
            let e = parse_expression(src, 1).unwrap();
            assert!(
                matches!(e.eval2(&[-1.0]), Err(ExprError::Singular { .. })),
                "{src}"
            );
        }
    }

    #[test]
    fn integer_power_of_negative_base_is_differentiable() {
        let e = parse_expression("x1^3", 1).unwrap();
        let d = e.eval2(&[-2.0]).unwrap();
        assert_eq!((d.value, d.gradient[0], d.hessian[0]), (-8.0, 12.0, -12.0));
        let e = parse_expression("x1^(-2)", 1).unwrap();
        assert!(e.eval2(&[0.0]).is_err());
    }

    #[test]
    fn real_power_derivatives() {
        // d/dx x^x = x^x (ln x + 1)
        let e = parse_expression("x1^x1", 1).unwrap();
        let d = e.eval2(&[2.0]).unwrap();
        assert!((d.value - 4.0).abs() < 1e-14);
        assert!((d.gradient[0] - 4.0 * (2f64.ln() + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn point_dimension_checked() {
        let e = parse_expression("x1", 2).unwrap();
        assert!(matches!(
            e.eval2(&[1.0]),
            Err(ExprError::PointDimension { .. })
        ));
    }

    #[test]
    fn phase_variables() {
        let e = Expr::parse("x1*p2 - x2*p1", Vars::Phase(2)).unwrap();
        let d = e.eval2(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(d.value, 1.0 * 4.0 - 2.0 * 3.0);
        assert_eq!(d.gradient, vec![4.0, -3.0, -2.0, 1.0]);
        assert!(parse_expression("p1", 2).is_err());
    }

    #[test]
    fn builder_checks_arity() {
        let node = Node::var(0) * Node::var(2);
        assert!(Expr::new(node.clone(), Vars::Coords(2)).is_err());
        assert!(Expr::new(node, Vars::Coords(3)).is_ok());
    }

    #[test]
    fn unparse_round_trips() {
        let e = parse_expression("-x1^2 * (3 - x2) / exp(x1) + 1e-20", 2).unwrap();
        let again = parse_expression(&e.unparse(), 2).unwrap();
        assert_eq!(e, again);
    }
}
