//! Arith: infix expressions over unsigned integers with `+`, `*` and
//! parentheses. Whitespace between tokens is ignored. Arithmetic wraps
//! modulo 2^64, so every program has a value and every value prints back
//! as a literal.

use std::fmt;

use rand::Rng;

use super::CompileError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self) -> u64 {
        match self {
            Expr::Int(n) => *n,
            Expr::Add(a, b) => a.eval().wrapping_add(b.eval()),
            Expr::Mul(a, b) => a.eval().wrapping_mul(b.eval()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Int(_) => 0,
            Expr::Add(a, b) | Expr::Mul(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Int(_) => 3,
    }
}

/// Prints with the fewest parentheses that reproduce the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, op) = match self {
            Expr::Int(n) => return write!(f, "{n}"),
            Expr::Add(a, b) => (a, b, '+'),
            Expr::Mul(a, b) => (a, b, '*'),
        };
        let p = prec(self);
        if prec(a) < p {
            write!(f, "({a})")?;
        } else {
            write!(f, "{a}")?;
        }
        write!(f, "{op}")?;
        if prec(b) <= p {
            write!(f, "({b})")
        } else {
            write!(f, "{b}")
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> CompileError {
        CompileError::Parse { offset: self.pos, message: message.to_string() }
    }

    fn peek(&mut self) -> Option<u8> {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, CompileError> {
        let mut lhs = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, CompileError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, CompileError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                digits.parse().map(Expr::Int).map_err(|_| CompileError::Parse {
                    offset: start,
                    message: "integer literal out of range".to_string(),
                })
            }
            Some(_) => Err(self.err("expected an integer or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub fn parse(code: &[u8]) -> Result<Expr, CompileError> {
    let mut p = Parser { src: code, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

pub fn interpret(code: &[u8]) -> Result<u64, CompileError> {
    parse(code).map(|e| e.eval())
}

/// Folds the whole program to its value.
pub fn constant_fold(code: &[u8]) -> Result<String, CompileError> {
    interpret(code).map(|v| v.to_string())
}

pub const MAX_GENERATED_DEPTH: usize = 6;

fn gen_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return Expr::Int(rng.gen_range(0..100));
    }
    let (a, b) = (gen_expr(rng, depth - 1), gen_expr(rng, depth - 1));
    if rng.gen_bool(0.5) {
        Expr::Add(Box::new(a), Box::new(b))
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

/// A random program of depth at most [`MAX_GENERATED_DEPTH`], sometimes
/// wrapped in redundant parentheses.
pub fn generate<R: Rng>(rng: &mut R) -> String {
    let text = gen_expr(rng, MAX_GENERATED_DEPTH).to_string();
    if rng.gen_bool(0.1) {
        format!("({text})")
    } else {
        text
    }
}
