//! Categorical formulas and their duals.
//!
//! Concrete syntax: identifiers `[a-zA-Z_][a-zA-Z0-9_]*`, infix `.` for
//! composition (left-associative; nested compositions are always printed
//! in parentheses), `source(f)`, `target(f)` and a single `=`.
//!
//! Identifiers starting with an uppercase letter are object variables;
//! all others are morphism variables.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct FormulaError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MorphTerm {
    Var(String),
    /// `Comp(l, r)` is `l . r`.
    Comp(Box<MorphTerm>, Box<MorphTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ObjectTerm {
    Var(String),
    Source(String),
    Target(String),
}

/// Equations only relate terms of the same sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Equation {
    Morphisms(MorphTerm, MorphTerm),
    Objects(ObjectTerm, ObjectTerm),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Morph(MorphTerm),
    Object(ObjectTerm),
    Eq(Equation),
}

impl MorphTerm {
    pub fn var(name: impl Into<String>) -> Self {
        MorphTerm::Var(name.into())
    }

    pub fn comp(l: MorphTerm, r: MorphTerm) -> Self {
        MorphTerm::Comp(Box::new(l), Box::new(r))
    }

    pub fn dual(&self) -> Self {
        match self {
            MorphTerm::Var(_) => self.clone(),
            MorphTerm::Comp(l, r) => MorphTerm::comp(r.dual(), l.dual()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MorphTerm::Var(_) => 0,
            MorphTerm::Comp(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl ObjectTerm {
    /// Object variables are left untouched.
    pub fn dual(&self) -> Self {
        match self {
            ObjectTerm::Var(_) => self.clone(),
            ObjectTerm::Source(f) => ObjectTerm::Target(f.clone()),
            ObjectTerm::Target(f) => ObjectTerm::Source(f.clone()),
        }
    }
}

/// σ^op: swap `source`/`target` and reverse every composition.
pub fn dualize_formula(formula: &Formula) -> Formula {
    match formula {
        Formula::Morph(m) => Formula::Morph(m.dual()),
        Formula::Object(o) => Formula::Object(o.dual()),
        Formula::Eq(Equation::Morphisms(a, b)) => Formula::Eq(Equation::Morphisms(a.dual(), b.dual())),
        Formula::Eq(Equation::Objects(a, b)) => Formula::Eq(Equation::Objects(a.dual(), b.dual())),
    }
}

impl fmt::Display for MorphTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(f: &mut fmt::Formatter<'_>, t: &MorphTerm) -> fmt::Result {
            match t {
                MorphTerm::Var(n) => f.write_str(n),
                MorphTerm::Comp(..) => write!(f, "({t})"),
            }
        }
        match self {
            MorphTerm::Var(n) => f.write_str(n),
            MorphTerm::Comp(l, r) => {
                operand(f, l)?;
                f.write_str(" . ")?;
                operand(f, r)
            }
        }
    }
}

impl fmt::Display for ObjectTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectTerm::Var(n) => f.write_str(n),
            ObjectTerm::Source(m) => write!(f, "source({m})"),
            ObjectTerm::Target(m) => write!(f, "target({m})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Morph(m) => write!(f, "{m}"),
            Formula::Object(o) => write!(f, "{o}"),
            Formula::Eq(Equation::Morphisms(a, b)) => write!(f, "{a} = {b}"),
            Formula::Eq(Equation::Objects(a, b)) => write!(f, "{a} = {b}"),
        }
    }
}

pub fn is_object_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
}

enum Term {
    Morph(MorphTerm),
    Object(ObjectTerm),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> FormulaError {
        FormulaError { offset: self.pos, message: message.into() }
    }

    fn peek(&mut self) -> Option<u8> {
        while self.src.as_bytes().get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.src.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), FormulaError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, FormulaError> {
        let start = match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos,
            _ => return Err(self.err("expected an identifier")),
        };
        while self.src.as_bytes().get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        let start = self.pos;
        let first = self.operand()?;
        if self.peek() != Some(b'.') {
            return Ok(first);
        }
        let Term::Morph(mut lhs) = first else {
            return Err(FormulaError { offset: start, message: "only morphisms can be composed".into() });
        };
        while self.peek() == Some(b'.') {
            self.pos += 1;
            let at = self.pos;
            match self.operand()? {
                Term::Morph(rhs) => lhs = MorphTerm::comp(lhs, rhs),
                Term::Object(_) => {
                    return Err(FormulaError { offset: at, message: "only morphisms can be composed".into() })
                }
            }
        }
        Ok(Term::Morph(lhs))
    }

    fn operand(&mut self) -> Result<Term, FormulaError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let t = self.term()?;
            self.expect(b')')?;
            return Ok(t);
        }
        let at = self.pos;
        let name = self.ident()?;
        if matches!(name.as_str(), "source" | "target") && self.peek() == Some(b'(') {
            self.pos += 1;
            let arg_at = self.pos;
            let arg = self.ident()?;
            if is_object_name(&arg) {
                return Err(FormulaError { offset: arg_at, message: format!("`{arg}` is an object, not a morphism") });
            }
            self.expect(b')')?;
            return Ok(Term::Object(if name == "source" { ObjectTerm::Source(arg) } else { ObjectTerm::Target(arg) }));
        }
        if matches!(name.as_str(), "source" | "target") {
            return Err(FormulaError { offset: at, message: format!("`{name}` is a keyword") });
        }
        Ok(if is_object_name(&name) { Term::Object(ObjectTerm::Var(name)) } else { Term::Morph(MorphTerm::Var(name)) })
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(text: &str) -> Result<Self, FormulaError> {
        let mut p = Parser { src: text, pos: 0 };
        let lhs = p.term()?;
        let formula = if p.peek() == Some(b'=') {
            p.pos += 1;
            let at = p.pos;
            match (lhs, p.term()?) {
                (Term::Morph(a), Term::Morph(b)) => Formula::Eq(Equation::Morphisms(a, b)),
                (Term::Object(a), Term::Object(b)) => Formula::Eq(Equation::Objects(a, b)),
                _ => {
                    return Err(FormulaError {
                        offset: at,
                        message: "an equation must relate two morphisms or two objects".into(),
                    })
                }
            }
        } else {
            match lhs {
                Term::Morph(m) => Formula::Morph(m),
                Term::Object(o) => Formula::Object(o),
            }
        };
        if p.peek().is_some() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(formula)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dual_text(s: &str) -> String {
        dualize_formula(&s.parse().unwrap()).to_string()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(dual_text("source(f) = target(g)"), "target(f) = source(g)");
        assert_eq!(dual_text("f"), "f");
        assert_eq!(dual_text("(f . g) . h"), "h . (g . f)");
    }

    #[test]
    fn parsing_is_left_associative() {
        assert_eq!("f . g . h".parse::<Formula>().unwrap(), "(f . g) . h".parse().unwrap());
    }

    #[test]
    fn object_variables_are_untouched() {
        assert_eq!(dual_text("source(f) = A"), "target(f) = A");
        assert_eq!(dual_text("A = B"), "A = B");
    }

    #[test]
    fn sort_errors() {
        for bad in ["f = A", "source(f) . g", "f . A", "source(A)", "f = source(g)", "source = f"] {
            assert!(bad.parse::<Formula>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "f .", "(f . g", "f = g = h", "1f", "f g", "source(f"] {
            assert!(bad.parse::<Formula>().is_err(), "{bad:?}");
        }
    }
}
