use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::dual::Dual2;
use super::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sqrt,
    Exp,
    Ln,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
        }
    }
}

/// Expression tree node. Variables are 0-based here; the text syntax is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// How variable indices are spelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vars {
    /// `x1..xn`
    Coords(usize),
    /// `x1..xn, p1..pn`; `p_i` has index `n + i - 1`.
    Phase(usize),
}

impl Vars {
    pub fn arity(self) -> usize {
        match self {
            Vars::Coords(n) => n,
            Vars::Phase(n) => 2 * n,
        }
    }

    pub(crate) fn name(self, index: usize) -> String {
        match self {
            Vars::Phase(n) if index >= n => format!("p{}", index - n + 1),
            _ => format!("x{}", index + 1),
        }
    }
}

impl Node {
    pub fn num(v: f64) -> Self {
        Node::Num(v)
    }

    pub fn var(index: usize) -> Self {
        Node::Var(index)
    }

    pub fn call(f: Func, arg: Node) -> Self {
        Node::Call(f, Box::new(arg))
    }

    pub fn sin(self) -> Self {
        Node::call(Func::Sin, self)
    }

    pub fn cos(self) -> Self {
        Node::call(Func::Cos, self)
    }

    pub fn sqrt(self) -> Self {
        Node::call(Func::Sqrt, self)
    }

    pub fn powi(self, k: i32) -> Self {
        Node::Bin(BinOp::Pow, Box::new(self), Box::new(Node::Num(k as f64)))
    }

    pub fn pow(self, e: Node) -> Self {
        Node::Bin(BinOp::Pow, Box::new(self), Box::new(e))
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Node::Num(_) => true,
            Node::Var(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Copy with every variable index increased by `offset`.
    pub fn shift_vars(&self, offset: usize) -> Node {
        match self {
            Node::Num(v) => Node::Num(*v),
            Node::Var(i) => Node::Var(i + offset),
            Node::Neg(a) => Node::Neg(Box::new(a.shift_vars(offset))),
            Node::Call(f, a) => Node::Call(*f, Box::new(a.shift_vars(offset))),
            Node::Bin(op, a, b) => Node::Bin(
                *op,
                Box::new(a.shift_vars(offset)),
                Box::new(b.shift_vars(offset)),
            ),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Node::Num(_) => None,
            Node::Var(i) => Some(*i),
            Node::Neg(a) | Node::Call(_, a) => a.max_var(),
            Node::Bin(_, a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(i) => point[*i],
            Node::Neg(a) => -a.eval(point),
            Node::Bin(op, a, b) => {
                let x = a.eval(point);
                match op {
                    BinOp::Add => x + b.eval(point),
                    BinOp::Sub => x - b.eval(point),
                    BinOp::Mul => x * b.eval(point),
                    BinOp::Div => x / b.eval(point),
                    BinOp::Pow => match integer_exponent(b) {
                        Some(k) => x.powi(k as i32),
                        None => x.powf(b.eval(point)),
                    },
                }
            }
            Node::Call(f, a) => {
                let u = a.eval(point);
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan(),
                    Func::Sqrt => u.sqrt(),
                    Func::Exp => u.exp(),
                    Func::Ln => u.ln(),
                    Func::Abs => u.abs(),
                }
            }
        }
    }

    pub(crate) fn eval2(&self, point: &[f64], vars: Vars) -> Result<Dual2, ExprError> {
        let n = point.len();
        let singular = |node: &Node, reason: &str| ExprError::Singular {
            node: node.render(vars),
            reason: reason.to_string(),
        };
        let out = match self {
            Node::Num(v) => Dual2::constant(*v, n),
            Node::Var(i) => Dual2::variable(point[*i], *i, n),
            Node::Neg(a) => -&a.eval2(point, vars)?,
            Node::Bin(op, a, b) => {
                let x = a.eval2(point, vars)?;
                match op {
                    BinOp::Add => &x + &b.eval2(point, vars)?,
                    BinOp::Sub => &x - &b.eval2(point, vars)?,
                    BinOp::Mul => &x * &b.eval2(point, vars)?,
                    BinOp::Div => {
                        let y = b.eval2(point, vars)?;
                        if y.value == 0.0 {
                            return Err(singular(self, "division by zero"));
                        }
                        &x * &y.recip()
                    }
                    BinOp::Pow => match integer_exponent(b) {
                        Some(k) => {
                            if k < 0 && x.value == 0.0 {
                                return Err(singular(self, "zero raised to a negative power"));
                            }
                            x.powi(k)
                        }
                        None => {
                            if x.value <= 0.0 {
                                return Err(singular(
                                    self,
                                    "non-integer power of a nonpositive base",
                                ));
                            }
                            let y = b.eval2(point, vars)?;
                            let u = x.value;
                            let ln_x = x.chain(u.ln(), 1.0 / u, -1.0 / (u * u));
                            let e = &y * &ln_x;
                            let v = e.value.exp();
                            e.chain(v, v, v)
                        }
                    },
                }
            }
            Node::Call(f, a) => {
                let x = a.eval2(point, vars)?;
                let u = x.value;
                match f {
                    Func::Sin => x.chain(u.sin(), u.cos(), -u.sin()),
                    Func::Cos => x.chain(u.cos(), -u.sin(), -u.cos()),
                    Func::Tan => {
                        let c = u.cos();
                        if c == 0.0 {
                            return Err(singular(self, "tangent pole"));
                        }
                        let t = u.tan();
                        let sec2 = 1.0 / (c * c);
                        x.chain(t, sec2, 2.0 * sec2 * t)
                    }
                    Func::Sqrt => {
                        if u <= 0.0 {
                            return Err(singular(self, "square root of a nonpositive argument"));
                        }
                        let s = u.sqrt();
                        x.chain(s, 0.5 / s, -0.25 / (s * u))
                    }
                    Func::Exp => {
                        let e = u.exp();
                        x.chain(e, e, e)
                    }
                    Func::Ln => {
                        if u <= 0.0 {
                            return Err(singular(self, "logarithm of a nonpositive argument"));
                        }
                        x.chain(u.ln(), 1.0 / u, -1.0 / (u * u))
                    }
                    // abs'(0) is taken as 0
                    Func::Abs => {
                        let s = if u > 0.0 {
                            1.0
                        } else if u < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                        x.chain(u.abs(), s, 0.0)
                    }
                }
            }
        };
        if !out.is_finite() {
            return Err(singular(self, "non-finite result"));
        }
        Ok(out)
    }

    pub(crate) fn render(&self, vars: Vars) -> String {
        let mut s = String::new();
        self.write(&mut s, vars);
        s
    }

    fn write(&self, out: &mut String, vars: Vars) {
        match self {
            Node::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    out.push_str(&format!("(-{})", fmt_num(-v)));
                } else {
                    out.push_str(&fmt_num(*v));
                }
            }
            Node::Var(i) => out.push_str(&vars.name(*i)),
            Node::Neg(a) => {
                out.push_str("(-");
                a.write(out, vars);
                out.push(')');
            }
            Node::Bin(op, a, b) => {
                out.push('(');
                a.write(out, vars);
                out.push_str(&format!(" {} ", op.symbol()));
                b.write(out, vars);
                out.push(')');
            }
            Node::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, vars);
                out.push(')');
            }
        }
    }
}

/// Exponent value when the exponent subtree is a constant integer.
fn integer_exponent(node: &Node) -> Option<i64> {
    if !node.is_constant() {
        return None;
    }
    let v = node.eval(&[]);
    (v.fract() == 0.0 && v.abs() <= 1024.0).then_some(v as i64)
}

// Shortest round-trip form, always re-parseable by the grammar.
fn fmt_num(v: f64) -> String {
    let s = format!("{v:?}");
    s.replace("inf", "1e999")
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Vars::Coords(usize::MAX)))
    }
}

impl Add for Node {
    type Output = Node;
    fn add(self, rhs: Node) -> Node {
        Node::Bin(BinOp::Add, Box::new(self), Box::new(rhs))
    }
}

impl Sub for Node {
    type Output = Node;
    fn sub(self, rhs: Node) -> Node {
        Node::Bin(BinOp::Sub, Box::new(self), Box::new(rhs))
    }
}

impl Mul for Node {
    type Output = Node;
    fn mul(self, rhs: Node) -> Node {
        Node::Bin(BinOp::Mul, Box::new(self), Box::new(rhs))
    }
}

impl Div for Node {
    type Output = Node;
    fn div(self, rhs: Node) -> Node {
        Node::Bin(BinOp::Div, Box::new(self), Box::new(rhs))
    }
}

impl Neg for Node {
    type Output = Node;
    fn neg(self) -> Node {
        Node::Neg(Box::new(self))
    }
}

impl Mul<Node> for f64 {
    type Output = Node;
    fn mul(self, rhs: Node) -> Node {
        Node::Num(self) * rhs
    }
}
