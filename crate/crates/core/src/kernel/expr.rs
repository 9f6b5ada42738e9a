//! Composition expressions: `g . f` means `g · f` (apply `f` first).
//!
//! Atoms are canonical ids or aliases. Bare atoms may contain anything but
//! whitespace, parentheses, `.` and `"`; other names are written in double
//! quotes with `\"` and `\\` escapes. `.` associates to the left when
//! parsing; a right operand that is itself a composition is parenthesized
//! when printing.

use std::fmt;

use super::category::{compose, Category, CategoryError};
use super::morphism::Morphism;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompositionExpr {
    Ref(String),
    /// `Compose(g, f)` is `g . f`.
    Compose(Box<CompositionExpr>, Box<CompositionExpr>),
}

impl CompositionExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        CompositionExpr::Ref(name.into())
    }

    pub fn compose(g: CompositionExpr, f: CompositionExpr) -> Self {
        CompositionExpr::Compose(Box::new(g), Box::new(f))
    }

    pub fn parse(text: &str) -> Result<Self, CategoryError> {
        let mut p = Parser { src: text, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Atoms in written (left-to-right) order.
    pub fn atoms(&self) -> Vec<&str> {
        match self {
            CompositionExpr::Ref(n) => vec![n.as_str()],
            CompositionExpr::Compose(g, f) => {
                let mut v = g.atoms();
                v.extend(f.atoms());
                v
            }
        }
    }

    fn first_atom(&self) -> &str {
        match self {
            CompositionExpr::Ref(n) => n,
            CompositionExpr::Compose(g, _) => g.first_atom(),
        }
    }

    fn last_atom(&self) -> &str {
        match self {
            CompositionExpr::Ref(n) => n,
            CompositionExpr::Compose(_, f) => f.last_atom(),
        }
    }
}

fn is_bare_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '(' | ')' | '.' | '"'))
}

fn write_atom(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if !name.is_empty() && name.chars().all(is_bare_char) {
        f.write_str(name)
    } else {
        f.write_str("\"")?;
        for c in name.chars() {
            if matches!(c, '"' | '\\') {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("\"")
    }
}

impl fmt::Display for CompositionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionExpr::Ref(n) => write_atom(f, n),
            CompositionExpr::Compose(g, h) => {
                write!(f, "{g} . ")?;
                match **h {
                    CompositionExpr::Compose(..) => write!(f, "({h})"),
                    CompositionExpr::Ref(_) => write!(f, "{h}"),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> CategoryError {
        CategoryError::ExprParse { offset: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn expr(&mut self) -> Result<CompositionExpr, CategoryError> {
        let mut lhs = self.primary()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('.') {
                return Ok(lhs);
            }
            self.bump();
            let rhs = self.primary()?;
            lhs = CompositionExpr::compose(lhs, rhs);
        }
    }

    fn primary(&mut self) -> Result<CompositionExpr, CategoryError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.skip_ws();
                if self.bump() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some('"') => {
                self.bump();
                let mut name = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error("unterminated quoted name")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => name.push(c),
                            _ => return Err(self.error("invalid escape in quoted name")),
                        },
                        Some(c) => name.push(c),
                    }
                }
                if name.is_empty() {
                    return Err(self.error("empty morphism name"));
                }
                Ok(CompositionExpr::Ref(name))
            }
            Some(c) if is_bare_char(c) => {
                let start = self.pos;
                while self.peek().is_some_and(is_bare_char) {
                    self.bump();
                }
                Ok(CompositionExpr::Ref(self.src[start..self.pos].to_string()))
            }
            _ => Err(self.error("expected a morphism name or `(`")),
        }
    }
}

/// Folds [`compose`] over the expression tree. A mismatch reports the join
/// (`left . right` atoms) where the chain breaks.
pub fn eval_expr(cat: &Category, expr: &CompositionExpr) -> Result<Morphism, CategoryError> {
    match expr {
        CompositionExpr::Ref(name) => cat.resolve(name).cloned(),
        CompositionExpr::Compose(g_expr, f_expr) => {
            let g = eval_expr(cat, g_expr)?;
            let f = eval_expr(cat, f_expr)?;
            compose(cat, &g, &f).map_err(|e| match e {
                CategoryError::InterfaceMismatch { output, input, .. } => {
                    CategoryError::InterfaceMismatch {
                        output,
                        input,
                        at: Some(format!("{} . {}", g_expr.last_atom(), f_expr.first_atom())),
                    }
                }
                other => other,
            })
        }
    }
}
