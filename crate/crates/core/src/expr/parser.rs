//! Recursive-descent parser for the scalar expression grammar.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* right-associative *)
//! primary = number | variable | "pi" | func "(" expr ")" | "(" expr ")" ;
//! number  = digits [ "." [ digits ] ] [ exponent ] | "." digits [ exponent ] ;
//! exponent = ("e" | "E") [ "+" | "-" ] digits ;
//! variable = ("x" | "p") digits ;            (* 1-based *)
//! func    = "sin" | "cos" | "tan" | "sqrt" | "exp" | "ln" | "abs" ;
//! ```
//!
//! `-x^2` parses as `-(x^2)` and `x^y^z` as `x^(y^z)`.

use super::ast::{BinOp, Func, Node, Vars};
use super::ExprError;

pub(super) fn parse(source: &str, vars: Vars) -> Result<Node, ExprError> {
    if source.trim().is_empty() {
        return Err(ExprError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        vars,
    };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected character '{}'", p.src[p.pos] as char)));
    }
    Ok(node)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vars,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut mantissa = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number '{text}'"),
            })
    }

    fn word(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if word == "pi" {
            return Ok(Node::Num(std::f64::consts::PI));
        }
        if let Some(f) = Func::from_name(word) {
            if self.peek() != Some(b'(') {
                return Err(self.error(format!("expected '(' after '{word}'")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            return Ok(Node::call(f, arg));
        }
        let (prefix, rest) = word.split_at(1);
        if matches!(prefix, "x" | "p")
            && !rest.is_empty()
            && rest.bytes().all(|b| b.is_ascii_digit())
        {
            let index: usize = rest.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("bad variable '{word}'"),
            })?;
            let dim = match self.vars {
                Vars::Coords(n) | Vars::Phase(n) => n,
            };
            if prefix == "p" && !matches!(self.vars, Vars::Phase(_)) {
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("momentum variable '{word}' in a coordinate expression"),
                });
            }
            if index == 0 || index > dim {
                return Err(ExprError::VariableRange {
                    offset: start,
                    name: word.to_string(),
                    dim,
                });
            }
            let offset = if prefix == "p" { dim } else { 0 };
            return Ok(Node::Var(offset + index - 1));
        }
        if self.peek() == Some(b'(') {
            return Err(ExprError::UnknownFunction {
                offset: start,
                name: word.to_string(),
            });
        }
        Err(ExprError::Syntax {
            offset: start,
            message: format!("unknown identifier '{word}'"),
        })
    }
}
