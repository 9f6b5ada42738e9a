//! Stream pipelines: one object (text streams) and line-oriented filters.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::{
    ArrowSignature, Behavior, BehaviorError, Category, Flag, Morphism, Object, ObjectId, Payload,
    PayloadDomain,
};

pub const TEXT_STREAM: &str = "TextStream";

/// Tokens planted into sampled lines so filters and translations have
/// something to act on.
pub const PLANTED_TOKENS: [&str; 3] = ["foo", "bar", "x"];
/// Per-line, per-token planting probability.
pub const PLANT_PROBABILITY: f64 = 0.3;

const ALPHABET: &[u8] = b"abcdeqABCDEQ 0123";

/// Any finite byte stream. Samples are 1 to 8 short lines; the final line
/// is left unterminated one time in five.
#[derive(Clone, Copy, Debug, Default)]
pub struct TextStreamDomain;

impl PayloadDomain for TextStreamDomain {
    fn validate(&self, payload: &Payload) -> bool {
        matches!(payload, Payload::ByteStream { .. })
    }

    fn sample_one(&self, seed: u64) -> Payload {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lines = rng.gen_range(1..=8);
        let mut out = Vec::new();
        for _ in 0..lines {
            let mut line: Vec<u8> =
                (0..rng.gen_range(0..=10)).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())]).collect();
            for token in PLANTED_TOKENS {
                if rng.gen_bool(PLANT_PROBABILITY) {
                    let at = rng.gen_range(0..=line.len());
                    line.splice(at..at, token.bytes());
                }
            }
            out.extend_from_slice(&line);
            out.push(b'\n');
        }
        if rng.gen_bool(0.2) {
            out.pop();
        }
        Payload::bytes(out)
    }
}

pub fn text_stream() -> Object {
    Object::new(TEXT_STREAM, Arc::new(TextStreamDomain))
}

fn stream_behavior(
    description: String,
    f: impl Fn(&[u8]) -> Vec<u8> + Send + Sync + 'static,
) -> Behavior {
    Behavior::new(description.clone(), move |p| match p.as_bytes() {
        Some(bytes) => Ok(Payload::bytes(f(bytes))),
        None => Err(BehaviorError(format!("{description}: expected a byte stream"))),
    })
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    needle.is_empty() || haystack.windows(needle.len()).any(|w| w == needle)
}

/// Drops every line containing `pattern`, keeping the others and their
/// terminators in order. A trailing unterminated fragment counts as a line.
pub fn filter_out_lines(input: &[u8], pattern: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len());
    let mut start = 0;
    while start < input.len() {
        let end = input[start..].iter().position(|&b| b == b'\n').map_or(input.len(), |i| start + i + 1);
        let line = &input[start..end];
        let content = line.strip_suffix(b"\n").unwrap_or(line);
        if !contains(content, pattern) {
            out.extend_from_slice(line);
        }
        start = end;
    }
    out
}

pub fn translate_bytes(input: &[u8], from: u8, to: u8) -> Vec<u8> {
    input.iter().map(|&b| if b == from { to } else { b }).collect()
}

pub fn swap_case_bytes(input: &[u8]) -> Vec<u8> {
    input
        .iter()
        .map(|&b| match b {
            b'a'..=b'z' => b.to_ascii_uppercase(),
            b'A'..=b'Z' => b.to_ascii_lowercase(),
            _ => b,
        })
        .collect()
}

pub fn pass_through_behavior() -> Behavior {
    Behavior::new("pass_through", |p| Ok(p.clone()))
}

pub fn filter_out(pattern: &str) -> Behavior {
    let pat = pattern.as_bytes().to_vec();
    stream_behavior(format!("filter_out({pattern:?})"), move |b| filter_out_lines(b, &pat))
}

pub fn translate(from: u8, to: u8) -> Behavior {
    stream_behavior(
        format!("translate('{}','{}')", from.escape_ascii(), to.escape_ascii()),
        move |b| translate_bytes(b, from, to),
    )
}

pub fn swap_case() -> Behavior {
    stream_behavior("swap_case".to_string(), swap_case_bytes)
}

fn endo(id: &str, behavior: Behavior) -> Morphism {
    Morphism::new(id, ArrowSignature::new(TEXT_STREAM, TEXT_STREAM), behavior)
}

/// The pipes category: `pass_through` (identity, a.k.a. `cat`), two line
/// filters, a byte translation and a case swap.
pub fn pipes() -> Category {
    let mut cat = Category::new("pipes");
    cat.add_object(text_stream()).expect("fresh category");
    let morphisms = [
        endo("pass_through", pass_through_behavior())
            .with_aliases(["cat", "grep '.*'"])
            .with_flag(Flag::NeutralByConstruction),
        endo("grep_v_foo", filter_out("foo")).with_aliases(["grep -v foo", "sed '/foo/d'"]),
        endo("grep_v_bar", filter_out("bar")).with_aliases(["grep -v bar", "sed '/bar/d'"]),
        endo("tr_x_y", translate(b'x', b'y')).with_aliases(["tr x y", "sed s/x/y/g"]),
        endo("swap_case", swap_case()).with_alias("tr a-zA-Z A-Za-z"),
    ];
    for m in morphisms {
        cat.add_morphism(m).expect("unique builtin ids");
    }
    cat.designate_identity(&ObjectId::new(TEXT_STREAM), "pass_through").expect("registered");
    cat
}
