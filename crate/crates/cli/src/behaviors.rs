//! The fixed table of behaviors a definition file can name.

use scratchcat::instances::{circuits, compilers, pipes};
use scratchcat::Behavior;

/// `Ok(None)` when `text` is not shaped like a behavior reference at all,
/// so the caller can fall back to a composition expression.
pub fn parse_behavior_ref(text: &str) -> Result<Option<Behavior>, String> {
    let text = text.trim();
    let (name, args) = match text.find('(') {
        Some(open) => {
            let Some(inner) = text[open + 1..].strip_suffix(')') else {
                return Ok(None);
            };
            (text[..open].trim_end(), Some(inner))
        }
        None => (text, None),
    };
    if name.is_empty() || !name.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_') {
        return Ok(None);
    }
    let behavior = match (name, args) {
        ("pass_through", None) => pipes::pass_through_behavior(),
        ("swap_case", None) => pipes::swap_case(),
        ("constant_fold", None) => compilers::constant_fold_behavior(),
        ("arith_to_stack", None) => compilers::arith_to_stack_behavior(),
        ("stack_to_code", None) => compilers::stack_to_code_behavior(),
        ("filter_out", Some(args)) => pipes::filter_out(&string_literal(args.trim())?),
        ("translate", Some(args)) => {
            let (a, b) = args.split_once(',').ok_or("translate takes two byte literals")?;
            pipes::translate(byte_literal(a.trim())?, byte_literal(b.trim())?)
        }
        (_, None) => match circuits::adapter_by_name(name) {
            Some(m) => m.behavior,
            None => return Ok(None),
        },
        (_, Some(_)) => return Err(format!("unknown behavior `{name}`")),
    };
    Ok(Some(behavior))
}

fn string_literal(text: &str) -> Result<String, String> {
    let body = text
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .ok_or_else(|| format!("expected a double-quoted string, found `{text}`"))?;
    let mut out = String::new();
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(e @ ('"' | '\\')) => out.push(e),
                other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
            },
            '"' => return Err("unescaped `\"` inside string".to_string()),
            c => out.push(c),
        }
    }
    Ok(out)
}

fn byte_literal(text: &str) -> Result<u8, String> {
    let body = text
        .strip_prefix('\'')
        .and_then(|t| t.strip_suffix('\''))
        .ok_or_else(|| format!("expected a single-quoted character, found `{text}`"))?;
    match body.as_bytes() {
        [b] => Ok(*b),
        [b'\\', b @ (b'\'' | b'\\')] => Ok(*b),
        _ => Err(format!("`{text}` is not a single byte")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scratchcat::Payload;

    fn run(reference: &str, input: &str) -> Payload {
        parse_behavior_ref(reference).unwrap().unwrap().apply(&Payload::bytes(input)).unwrap()
    }

    #[test]
    fn builtin_refs() {
        assert_eq!(run(r#"filter_out("foo")"#, "a\nfoo\nb\n"), Payload::bytes("a\nb\n"));
        assert_eq!(run("translate('x', 'y')", "xox\n"), Payload::bytes("yoy\n"));
        assert_eq!(run("swap_case", "aB\n"), Payload::bytes("Ab\n"));
        assert!(parse_behavior_ref("dvi_to_vga").unwrap().is_some());
    }

    #[test]
    fn expressions_are_not_refs() {
        assert!(parse_behavior_ref("g . f").unwrap().is_none());
        assert!(parse_behavior_ref("grep_v_foo").unwrap().is_none());
    }

    #[test]
    fn malformed_refs() {
        assert!(parse_behavior_ref("filter_out(foo)").is_err());
        assert!(parse_behavior_ref("translate('xy','z')").is_err());
        assert!(parse_behavior_ref("nope(1)").is_err());
    }
}
