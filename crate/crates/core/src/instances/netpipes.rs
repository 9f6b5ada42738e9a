//! Networked pipes: every stream travels framed as `NET<len>:<bytes>`, and
//! every pipes morphism has a wrapped counterpart that unframes, runs the
//! original filter and reframes.

use std::sync::Arc;

use super::pipes::{self, TextStreamDomain};
use crate::kernel::{
    ArrowSignature, Behavior, BehaviorError, Category, Flag, Morphism, Object, ObjectId, Payload,
    PayloadDomain,
};

pub const NET_STREAM: &str = "NetStream";
/// Prefix of wrapped morphism ids.
pub const NET_PREFIX: &str = "net_";

pub fn frame(bytes: &[u8]) -> Vec<u8> {
    let mut out = format!("NET{}:", bytes.len()).into_bytes();
    out.extend_from_slice(bytes);
    out
}

/// Inverse of [`frame`]; `None` unless the input is exactly one frame.
pub fn unframe(framed: &[u8]) -> Option<&[u8]> {
    let rest = framed.strip_prefix(b"NET")?;
    let colon = rest.iter().position(|&b| b == b':')?;
    let digits = &rest[..colon];
    if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) || (digits.len() > 1 && digits[0] == b'0') {
        return None;
    }
    let len: usize = std::str::from_utf8(digits).ok()?.parse().ok()?;
    let body = &rest[colon + 1..];
    (body.len() == len).then_some(body)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NetStreamDomain;

impl PayloadDomain for NetStreamDomain {
    fn validate(&self, payload: &Payload) -> bool {
        payload.as_bytes().is_some_and(|b| unframe(b).is_some())
    }

    fn sample_one(&self, seed: u64) -> Payload {
        let inner = TextStreamDomain.sample_one(seed);
        Payload::bytes(frame(inner.as_bytes().expect("text streams are byte streams")))
    }
}

pub fn net_stream() -> Object {
    Object::new(NET_STREAM, Arc::new(NetStreamDomain))
}

/// Unframe, apply `inner`, reframe.
pub fn network_wrap(inner: &Behavior) -> Behavior {
    let inner = inner.clone();
    let description = format!("nc({})", inner.description());
    Behavior::new(description.clone(), move |p| {
        let body = p
            .as_bytes()
            .and_then(unframe)
            .ok_or_else(|| BehaviorError(format!("{description}: expected a NET frame")))?;
        let out = inner.apply(&Payload::bytes(body))?;
        let bytes = out
            .as_bytes()
            .ok_or_else(|| BehaviorError(format!("{description}: inner filter left the byte-stream domain")))?;
        Ok(Payload::bytes(frame(bytes)))
    })
}

/// The image of [`pipes::pipes`] under network wrapping.
pub fn netpipes() -> Category {
    let base = pipes::pipes();
    let mut cat = Category::new("netpipes");
    cat.add_object(net_stream()).expect("fresh category");
    for m in base.morphisms() {
        let mut wrapped = Morphism::new(
            format!("{NET_PREFIX}{}", m.canonical_id),
            ArrowSignature::new(NET_STREAM, NET_STREAM),
            network_wrap(&m.behavior),
        );
        if m.has_flag(Flag::NeutralByConstruction) {
            wrapped = wrapped.with_flag(Flag::NeutralByConstruction);
        }
        cat.add_morphism(wrapped).expect("unique wrapped ids");
    }
    let id = &base.identities()[&ObjectId::new(pipes::TEXT_STREAM)];
    cat.designate_identity(&ObjectId::new(NET_STREAM), &format!("{NET_PREFIX}{id}"))
        .expect("wrapped identity registered");
    cat
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn framing_round_trips() {
        assert_eq!(frame(b"ab\n"), b"NET3:ab\n");
        assert_eq!(unframe(b"NET3:ab\n"), Some(&b"ab\n"[..]));
        assert_eq!(unframe(b"NET0:"), Some(&b""[..]));
    }

    #[test]
    fn malformed_frames_are_rejected() {
        for bad in [&b"NET3:ab"[..], b"NET:ab", b"NET03:abc", b"NETx:a", b"ab", b"NET1:ab"] {
            assert_eq!(unframe(bad), None, "{:?}", bad.escape_ascii().to_string());
        }
    }

    #[test]
    fn wrapped_filter_acts_inside_the_frame() {
        let w = network_wrap(&pipes::filter_out("foo"));
        let out = w.apply(&Payload::bytes(frame(b"foo\nbaz\n"))).unwrap();
        assert_eq!(out, Payload::bytes(frame(b"baz\n")));
        assert!(w.apply(&Payload::bytes("foo\n")).is_err());
    }
}
