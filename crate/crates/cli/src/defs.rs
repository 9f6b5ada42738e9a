//! Definition files: one declaration per line, `#` starts a comment.
//!
//! ```text
//! category <name>
//! use builtin <pipes|compilers|circuits|netpipes>
//! object <Name>
//! morphism <name> : <Src> -> <Tgt> = <behavior-ref | composition-expr>
//! identity <Object> = <behavior-ref>
//! alias <name> = <existing-morphism>
//! flag <morphism> <neutral-by-construction|neutral-by-fiat|virtual>
//! functor <name> : <CatA> -> <CatB> [contravariant] { object X => Y ; morphism f => g ; ... }
//! ```
//!
//! `category` and `use builtin` both make that category current; the other
//! declarations (except `functor`) apply to the current category. A functor
//! body may span several lines.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use scratchcat::functors::{Functor, Variance};
use scratchcat::instances::{builtin_category, pipes::TextStreamDomain};
use scratchcat::kernel::eval_expr;
use scratchcat::{ArrowSignature, Category, CategoryError, CompositionExpr, Flag, Morphism, Object, ObjectId, Registry};
use thiserror::Error;

use crate::behaviors::parse_behavior_ref;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DefErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown behavior reference `{0}`")]
    UnknownBehaviorRef(String),
    #[error("unknown builtin category `{0}`")]
    UnknownBuiltin(String),
    #[error("no current category; start with `category <name>` or `use builtin <name>`")]
    NoCategory,
    #[error("`{name}` is declared {declared} but its definition has {actual}")]
    SignatureMismatch { name: String, declared: ArrowSignature, actual: ArrowSignature },
    #[error("{0}")]
    Category(#[from] CategoryError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct DefError {
    pub line: usize,
    pub column: usize,
    pub kind: Box<DefErrorKind>,
}

impl fmt::Display for DefError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
    }
}

/// Drops a trailing `#` comment, ignoring `#` inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quote = None;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match (quote, c) {
            (Some(_), _) if escaped => escaped = false,
            (Some(_), '\\') => escaped = true,
            (Some(q), c) if c == q => quote = None,
            (None, '"' | '\'') => quote = Some(c),
            (None, '#') => return &line[..i],
            _ => {}
        }
    }
    line
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'-')
}

/// A name, optionally double-quoted (for aliases like `"grep -v foo"`).
fn parse_name(s: &str) -> Option<String> {
    match CompositionExpr::parse(s) {
        Ok(CompositionExpr::Ref(name)) if s.starts_with('"') || is_name(s) => Some(name),
        _ => None,
    }
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    /// 1-based column of `part`, which must be a subslice of this line.
    fn column(&self, part: &str) -> usize {
        let offset = part.as_ptr() as usize - self.text.as_ptr() as usize;
        self.text[..offset.min(self.text.len())].chars().count() + 1
    }

    fn err(&self, part: &str, kind: impl Into<DefErrorKind>) -> DefError {
        DefError { line: self.number, column: self.column(part), kind: Box::new(kind.into()) }
    }

    fn syntax(&self, part: &str, message: impl Into<String>) -> DefError {
        self.err(part, DefErrorKind::Syntax(message.into()))
    }
}

/// Splits `s` once at `sep`, trimming both halves; the halves stay
/// subslices of `s`.
fn split2<'s>(s: &'s str, sep: &str) -> Option<(&'s str, &'s str)> {
    let (a, b) = s.split_once(sep)?;
    Some((a.trim(), b.trim()))
}

struct PendingEntry {
    line: usize,
    column: usize,
    kind: &'static str,
    from: String,
    to: String,
}

struct PendingFunctor {
    line: usize,
    column: usize,
    functor: Functor,
    entries: Vec<PendingEntry>,
}

#[derive(Default)]
struct Parser {
    registry: Registry,
    current: Option<String>,
    functors: Vec<PendingFunctor>,
}

impl Parser {
    fn current(&mut self, line: &Line, at: &str) -> Result<&mut Category, DefError> {
        match &self.current {
            Some(name) => Ok(self.registry.categories.get_mut(name).expect("current category is registered")),
            None => Err(line.err(at, DefErrorKind::NoCategory)),
        }
    }

    fn add_category(&mut self, line: &Line, at: &str, cat: Category) -> Result<(), DefError> {
        let name = cat.name.clone();
        if self.registry.categories.contains_key(&name) {
            return Err(line.err(at, DefErrorKind::DuplicateName(name)));
        }
        self.registry.categories.insert(name.clone(), cat);
        self.current = Some(name);
        Ok(())
    }

    fn declaration(&mut self, line: &Line, body: &str) -> Result<(), DefError> {
        let (keyword, rest) = body.split_once(char::is_whitespace).map_or((body, &body[body.len()..]), |(k, r)| (k, r.trim()));
        match keyword {
            "category" => {
                if !is_name(rest) {
                    return Err(line.syntax(rest, "expected `category <name>`"));
                }
                self.add_category(line, rest, Category::new(rest))
            }
            "use" => {
                let name = rest
                    .strip_prefix("builtin")
                    .filter(|n| n.starts_with(char::is_whitespace))
                    .map(str::trim)
                    .ok_or_else(|| line.syntax(rest, "expected `use builtin <name>`"))?;
                let cat = builtin_category(name).map_err(|_| line.err(name, DefErrorKind::UnknownBuiltin(name.into())))?;
                self.add_category(line, name, cat)
            }
            "object" => {
                if !is_name(rest) {
                    return Err(line.syntax(rest, "expected `object <Name>`"));
                }
                let cat = self.current(line, body)?;
                cat.add_object(Object::new(rest, Arc::new(TextStreamDomain))).map_err(|e| line.err(rest, dup(e)))
            }
            "morphism" => self.morphism(line, rest),
            "identity" => {
                let (object, rhs) = split2(rest, "=").ok_or_else(|| line.syntax(rest, "expected `identity <Object> = <behavior-ref>`"))?;
                if !is_name(object) {
                    return Err(line.syntax(object, "expected an object name"));
                }
                let sig = ArrowSignature::new(object, object);
                let cat = self.current(line, body)?;
                cat.object(&sig.source).map_err(|e| line.err(object, e))?;
                let m = define(cat, line, &format!("id_{object}"), &sig, rhs)?;
                cat.add_identity(m).map_err(|e| line.err(object, dup(e)))
            }
            "alias" => {
                let (alias, target) = split2(rest, "=").ok_or_else(|| line.syntax(rest, "expected `alias <name> = <morphism>`"))?;
                let alias_name = parse_name(alias).ok_or_else(|| line.syntax(alias, "expected an alias name"))?;
                let cat = self.current(line, body)?;
                let id = cat.resolve(target).map_err(|e| line.err(target, e))?.canonical_id.clone();
                if cat.resolve(&alias_name).is_ok() {
                    return Err(line.err(alias, DefErrorKind::DuplicateName(alias_name)));
                }
                cat.add_alias(&id, alias_name).map_err(|e| line.err(target, e))
            }
            "flag" => {
                let (name, flag) = rest
                    .rsplit_once(char::is_whitespace)
                    .map(|(n, f)| (n.trim(), f))
                    .ok_or_else(|| line.syntax(rest, "expected `flag <morphism> <flag>`"))?;
                let parsed = Flag::parse(flag).ok_or_else(|| {
                    line.syntax(flag, format!("unknown flag `{flag}`; expected neutral-by-construction, neutral-by-fiat or virtual"))
                })?;
                let cat = self.current(line, body)?;
                let id = cat.resolve(name).map_err(|e| line.err(name, e))?.canonical_id.clone();
                cat.add_flag(&id, parsed).map_err(|e| line.err(name, e))
            }
            _ => Err(line.syntax(keyword, format!("unknown declaration `{keyword}`"))),
        }
    }

    fn morphism(&mut self, line: &Line, rest: &str) -> Result<(), DefError> {
        let usage = "expected `morphism <name> : <Src> -> <Tgt> = <definition>`";
        let (name, rest) = split2(rest, ":").ok_or_else(|| line.syntax(rest, usage))?;
        let (sig_text, rhs) = split2(rest, "=").ok_or_else(|| line.syntax(rest, usage))?;
        let (src, tgt) = split2(sig_text, "->").ok_or_else(|| line.syntax(sig_text, usage))?;
        for part in [name, src, tgt] {
            if !is_name(part) {
                return Err(line.syntax(part, format!("`{part}` is not a valid name")));
            }
        }
        let sig = ArrowSignature::new(src, tgt);
        let cat = self.current(line, name)?;
        cat.object(&sig.source).map_err(|e| line.err(src, e))?;
        cat.object(&sig.target).map_err(|e| line.err(tgt, e))?;
        if cat.resolve(name).is_ok() {
            return Err(line.err(name, DefErrorKind::DuplicateName(name.into())));
        }
        let m = define(cat, line, name, &sig, rhs)?;
        cat.add_morphism(m).map_err(|e| line.err(name, dup(e)))
    }
}

fn dup(e: CategoryError) -> DefErrorKind {
    match e {
        CategoryError::DuplicateName(n) => DefErrorKind::DuplicateName(n),
        e => DefErrorKind::Category(e),
    }
}

/// A new morphism `name: sig` whose behavior is a builtin reference or the
/// composite of an expression over `cat`.
fn define(cat: &Category, line: &Line, name: &str, sig: &ArrowSignature, rhs: &str) -> Result<Morphism, DefError> {
    match parse_behavior_ref(rhs) {
        Ok(Some(behavior)) => return Ok(Morphism::new(name, sig.clone(), behavior)),
        Ok(None) => {}
        Err(message) => return Err(line.err(rhs, DefErrorKind::UnknownBehaviorRef(message))),
    }
    let expr = CompositionExpr::parse(rhs).map_err(|e| line.err(rhs, e))?;
    if let CompositionExpr::Ref(atom) = &expr {
        if cat.resolve(atom).is_err() {
            return Err(line.err(rhs, DefErrorKind::UnknownBehaviorRef(atom.clone())));
        }
    }
    let composite = eval_expr(cat, &expr).map_err(|e| line.err(rhs, e))?;
    if composite.sig != *sig {
        return Err(line.err(
            rhs,
            DefErrorKind::SignatureMismatch { name: name.into(), declared: sig.clone(), actual: composite.sig },
        ));
    }
    Ok(Morphism::new(name, sig.clone(), composite.behavior))
}

/// Parses a functor header and its `{ ... }` body, which may continue on
/// the following lines. Returns the number of extra lines consumed.
fn functor(lines: &[Line], start: usize, rest: &str) -> Result<(PendingFunctor, usize), DefError> {
    let line = &lines[start];
    let usage = "expected `functor <name> : <CatA> -> <CatB> [contravariant] { ... }`";
    let (header, body_start) = rest.split_once('{').ok_or_else(|| line.syntax(rest, usage))?;
    let (name, cats) = split2(header, ":").ok_or_else(|| line.syntax(header, usage))?;
    let (source, target_text) = split2(cats, "->").ok_or_else(|| line.syntax(cats, usage))?;
    let (target, variance) = match target_text.split_once(char::is_whitespace) {
        None => (target_text, Variance::Covariant),
        Some((t, "contravariant")) => (t, Variance::Contravariant),
        Some((_, v)) => return Err(line.syntax(v.trim(), format!("unexpected `{}`", v.trim()))),
    };
    for part in [name, source, target] {
        if !is_name(part) {
            return Err(line.syntax(part, format!("`{part}` is not a valid name")));
        }
    }

    let mut pieces: Vec<(&Line, &str)> = Vec::new();
    let mut closed = false;
    let mut consumed = 0;
    let mut piece = body_start;
    loop {
        let current = &lines[start + consumed];
        if let Some((inside, after)) = piece.split_once('}') {
            pieces.push((current, inside));
            if !after.trim().is_empty() {
                return Err(current.syntax(after.trim(), "unexpected text after `}`"));
            }
            closed = true;
            break;
        }
        pieces.push((current, piece));
        consumed += 1;
        match lines.get(start + consumed) {
            Some(next) => piece = strip_comment(next.text),
            None => break,
        }
    }
    if !closed {
        return Err(line.syntax(rest, "functor body is missing `}`"));
    }

    let mut functor = Functor {
        name: name.into(),
        source_cat: source.into(),
        target_cat: target.into(),
        object_map: BTreeMap::new(),
        morphism_map: BTreeMap::new(),
        variance,
    };
    let mut entries = Vec::new();
    for (l, text) in pieces {
        for entry in text.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let usage = "expected `object X => Y` or `morphism f => g`";
            let (kind, mapping) = entry.split_once(char::is_whitespace).ok_or_else(|| l.syntax(entry, usage))?;
            let (from, to) = split2(mapping, "=>").ok_or_else(|| l.syntax(entry, usage))?;
            let (from_name, to_name) = match (parse_name(from), parse_name(to)) {
                (Some(f), Some(t)) => (f, t),
                _ => return Err(l.syntax(entry, usage)),
            };
            let fresh = match kind {
                "object" => {
                    let (Some(x), Some(y)) = (ObjectId::try_new(from_name.clone()), ObjectId::try_new(to_name.clone())) else {
                        return Err(l.syntax(entry, usage));
                    };
                    functor.object_map.insert(x, y).is_none()
                }
                "morphism" => functor.morphism_map.insert(from_name.clone(), to_name.clone()).is_none(),
                _ => return Err(l.syntax(kind, usage)),
            };
            if !fresh {
                return Err(l.err(from, DefErrorKind::DuplicateName(from_name)));
            }
            let kind = if kind == "object" { "object" } else { "morphism" };
            entries.push(PendingEntry { line: l.number, column: l.column(from), kind, from: from_name, to: to_name });
        }
    }
    let pending = PendingFunctor { line: line.number, column: line.column(name), functor, entries };
    Ok((pending, consumed))
}

/// Rewrites morphism names in a functor's map to canonical ids where the
/// categories are known.
fn canonicalize(registry: &Registry, pending: PendingFunctor) -> Result<Functor, DefError> {
    let mut functor = pending.functor;
    let (source, target) = (registry.category(&functor.source_cat), registry.category(&functor.target_cat));
    let mut morphism_map = BTreeMap::new();
    for e in pending.entries.iter().filter(|e| e.kind == "morphism") {
        let at = |err: CategoryError| DefError { line: e.line, column: e.column, kind: Box::new(err.into()) };
        let from = match source {
            Some(c) => c.resolve(&e.from).map_err(at)?.canonical_id.clone(),
            None => e.from.clone(),
        };
        let to = match target {
            Some(c) => c.resolve(&e.to).map(|m| m.canonical_id.clone()).unwrap_or_else(|_| e.to.clone()),
            None => e.to.clone(),
        };
        if morphism_map.insert(from.clone(), to).is_some() {
            return Err(DefError { line: e.line, column: e.column, kind: Box::new(DefErrorKind::DuplicateName(from)) });
        }
    }
    functor.morphism_map = morphism_map;
    Ok(functor)
}

pub fn parse_definition(text: &str) -> Result<Registry, DefError> {
    let lines: Vec<Line> = text.lines().enumerate().map(|(i, text)| Line { number: i + 1, text }).collect();
    let mut parser = Parser::default();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        let body = strip_comment(line.text).trim();
        i += 1;
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("functor").filter(|r| r.starts_with(char::is_whitespace)) {
            let (pending, consumed) = functor(&lines, i - 1, rest.trim())?;
            if parser.functors.iter().any(|p| p.functor.name == pending.functor.name) {
                return Err(DefError {
                    line: pending.line,
                    column: pending.column,
                    kind: Box::new(DefErrorKind::DuplicateName(pending.functor.name)),
                });
            }
            parser.functors.push(pending);
            i += consumed;
            continue;
        }
        parser.declaration(line, body)?;
    }
    let mut registry = parser.registry;
    for pending in parser.functors {
        let functor = canonicalize(&registry, pending)?;
        registry.functors.insert(functor.name.clone(), functor);
    }
    Ok(registry)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> DefError {
        parse_definition(text).unwrap_err()
    }

    #[test]
    fn builtin_and_user_category() {
        let reg = parse_definition(
            "use builtin pipes\n\
             morphism clean : TextStream -> TextStream = grep_v_bar . grep_v_foo  # both\n\
             category tiny\n\
             object A\n\
             identity A = pass_through\n\
             morphism drop_q : A -> A = filter_out(\"q#\")\n\
             alias dq = drop_q\n\
             flag drop_q neutral-by-fiat\n",
        )
        .unwrap();
        assert!(reg.category("pipes").unwrap().morphism("clean").is_some());
        let tiny = reg.category("tiny").unwrap();
        assert_eq!(tiny.identities()[&ObjectId::new("A")], "id_A");
        assert!(tiny.resolve("dq").unwrap().has_flag(Flag::NeutralByFiat));
    }

    #[test]
    fn mismatched_expression_reports_line() {
        let e = err("use builtin compilers\n\nmorphism bad : Arith -> MachineCode = stack_to_code . constant_fold\n");
        assert_eq!(e.line, 3);
        assert_eq!(e.column, 39);
        assert!(matches!(*e.kind, DefErrorKind::Category(CategoryError::InterfaceMismatch { .. })));
    }

    #[test]
    fn declared_signature_must_match() {
        let e = err("use builtin compilers\nmorphism bad : Arith -> Stack = stack_to_code . arith_to_stack\n");
        assert!(matches!(*e.kind, DefErrorKind::SignatureMismatch { .. }));
    }

    #[test]
    fn errors() {
        assert_eq!(*err("object A\n").kind, DefErrorKind::NoCategory);
        assert_eq!(*err("category c\ncategory c\n").kind, DefErrorKind::DuplicateName("c".into()));
        assert_eq!(*err("use builtin nope\n").kind, DefErrorKind::UnknownBuiltin("nope".into()));
        assert!(matches!(*err("category c\nobject A\nmorphism m : A -> A = bogus\n").kind, DefErrorKind::UnknownBehaviorRef(_)));
        assert!(matches!(*err("category c\nfrobnicate\n").kind, DefErrorKind::Syntax(_)));
        assert!(matches!(*err("category c\nobject A\nflag x virtual\n").kind, DefErrorKind::Category(_)));
        let e = err("category c\n  object\n");
        assert_eq!((e.line, e.column), (2, 9));
    }

    #[test]
    fn functor_block_spans_lines() {
        let reg = parse_definition(
            "use builtin pipes\nuse builtin netpipes\n\
             functor W : pipes -> netpipes {\n  object TextStream => NetStream\n  morphism cat => net_pass_through ;\n}\n",
        )
        .unwrap();
        let w = &reg.functors["W"];
        assert_eq!(w.morphism_map["pass_through"], "net_pass_through");
        assert_eq!(w.variance, Variance::Covariant);
        assert!(err("use builtin pipes\nfunctor W : pipes -> pipes {\n object TextStream => TextStream\n").to_string().contains("missing `}`"));
    }

    #[test]
    fn contravariant_functor() {
        let reg = parse_definition("functor D : a -> b contravariant { }\n").unwrap();
        assert_eq!(reg.functors["D"].variance, Variance::Contravariant);
    }

    #[test]
    fn comments_respect_quotes() {
        assert_eq!(strip_comment(r##"a = filter_out("#") # x"##), r##"a = filter_out("#") "##);
    }
}
