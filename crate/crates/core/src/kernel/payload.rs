//! Observable values flowing through morphisms.
//!
//! Three payload kinds cover the builtin categories: byte streams (pipes),
//! programs (compilers) and sampled signals (circuits). Equality follows the
//! equivalence chosen for each kind: streams compare byte-wise, programs by
//! language and normalized text, signals point-wise within [`SIGNAL_EPSILON`].

use std::fmt;

use serde::{Serialize, Serializer};

/// Absolute tolerance per sample point when comparing signals.
pub const SIGNAL_EPSILON: f64 = 1e-9;

/// A program's language tag. Binary languages compare byte-exactly; text
/// languages compare after layout normalization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Language {
    pub name: String,
    pub binary: bool,
}

impl Language {
    pub fn text(name: impl Into<String>) -> Self {
        Self { name: name.into(), binary: false }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self { name: name.into(), binary: true }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    ByteStream {
        #[serde(serialize_with = "serialize_escaped")]
        bytes: Vec<u8>,
    },
    Program {
        language: Language,
        #[serde(serialize_with = "serialize_escaped")]
        code: Vec<u8>,
    },
    Signal { protocol: String, samples: Vec<f64> },
}

fn serialize_escaped<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&bytes.escape_ascii().to_string())
}

impl Payload {
    pub fn bytes(bytes: impl Into<Vec<u8>>) -> Self {
        Payload::ByteStream { bytes: bytes.into() }
    }

    pub fn program(language: Language, code: impl Into<Vec<u8>>) -> Self {
        Payload::Program { language, code: code.into() }
    }

    pub fn signal(protocol: impl Into<String>, samples: Vec<f64>) -> Self {
        Payload::Signal { protocol: protocol.into(), samples }
    }

    pub fn as_bytes(&self) -> Option<&[u8]> {
        match self {
            Payload::ByteStream { bytes } => Some(bytes),
            _ => None,
        }
    }

    /// Program code, if this is a program in the named language.
    pub fn program_code(&self, language: &str) -> Option<&[u8]> {
        match self {
            Payload::Program { language: l, code } if l.name == language => Some(code),
            _ => None,
        }
    }

    pub fn signal_samples(&self, protocol: &str) -> Option<&[f64]> {
        match self {
            Payload::Signal { protocol: p, samples } if p == protocol => Some(samples),
            _ => None,
        }
    }
}

/// Layout normalization for text programs: CRLF becomes LF, trailing
/// whitespace on each line is dropped and trailing blank lines are removed.
fn normalize_text(code: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(code.len());
    for line in code.split(|&b| b == b'\n') {
        let end = line
            .iter()
            .rposition(|b| !b.is_ascii_whitespace())
            .map_or(0, |i| i + 1);
        out.extend_from_slice(&line[..end]);
        out.push(b'\n');
    }
    while out.last() == Some(&b'\n') {
        out.pop();
    }
    out
}

impl PartialEq for Payload {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Payload::ByteStream { bytes: a }, Payload::ByteStream { bytes: b }) => a == b,
            (
                Payload::Program { language: la, code: a },
                Payload::Program { language: lb, code: b },
            ) => {
                la == lb && if la.binary { a == b } else { normalize_text(a) == normalize_text(b) }
            }
            (
                Payload::Signal { protocol: pa, samples: a },
                Payload::Signal { protocol: pb, samples: b },
            ) => {
                pa == pb
                    && a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= SIGNAL_EPSILON)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::ByteStream { bytes } => write!(f, "bytes \"{}\"", bytes.escape_ascii()),
            Payload::Program { language, code } if language.binary => {
                write!(f, "program[{}] ", language.name)?;
                for (i, b) in code.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{b:02x}")?;
                }
                Ok(())
            }
            Payload::Program { language, code } => {
                write!(f, "program[{}] \"{}\"", language.name, code.escape_ascii())
            }
            Payload::Signal { protocol, samples } => {
                write!(f, "signal[{protocol}] [")?;
                for (i, s) in samples.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_compare_bytewise() {
        assert_eq!(Payload::bytes("helloworld"), Payload::bytes(b"hello".iter().chain(b"world").copied().collect::<Vec<_>>()));
        assert_ne!(Payload::bytes("a\n"), Payload::bytes("a"));
    }

    #[test]
    fn text_programs_ignore_trailing_layout() {
        let arith = Language::text("Arith");
        assert_eq!(Payload::program(arith.clone(), "1+2  \r\n\n"), Payload::program(arith.clone(), "1+2"));
        assert_ne!(Payload::program(arith.clone(), "1+2"), Payload::program(arith, "2+1"));
    }

    #[test]
    fn binary_programs_compare_exactly() {
        let mc = Language::binary("MachineCode");
        assert_ne!(Payload::program(mc.clone(), vec![0x20, 0x0a]), Payload::program(mc, vec![0x0a]));
    }

    #[test]
    fn languages_must_match() {
        assert_ne!(
            Payload::program(Language::text("Arith"), "7"),
            Payload::program(Language::text("Stack"), "7")
        );
    }

    #[test]
    fn signals_compare_within_epsilon() {
        let a = Payload::signal("USB", vec![0.5, -0.25]);
        assert_eq!(a, Payload::signal("USB", vec![0.5 + 5e-10, -0.25]));
        assert_ne!(a, Payload::signal("USB", vec![0.5 + 2e-9, -0.25]));
        assert_ne!(a, Payload::signal("RS232", vec![0.5, -0.25]));
        assert_ne!(a, Payload::signal("USB", vec![0.5]));
    }

    #[test]
    fn kinds_never_compare_equal() {
        assert_ne!(Payload::bytes("7"), Payload::program(Language::text("Arith"), "7"));
    }
}
