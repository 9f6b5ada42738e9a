//! Signal adapters. Objects are signal protocols, each with a physical
//! connector tag; composition is legal only on protocol equality, so RS232
//! and EGA stay distinct even though both use a DB9 connector.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::{
    ArrowSignature, Behavior, BehaviorError, Category, Morphism, Object, Payload, PayloadDomain,
};

pub const SIGNAL_LEN: usize = 64;
pub const CONNECTOR_TAG: &str = "connector";

/// (protocol, connector) for every builtin object.
pub const PROTOCOLS: [(&str, &str); 6] = [
    ("USB", "USB-A"),
    ("RS232", "DB9"),
    ("DVI", "DVI"),
    ("VGA", "DB15"),
    ("SVideo", "MiniDIN"),
    ("EGA", "DB9"),
];

/// Length-64 signals of one protocol with every sample in [-1, 1].
#[derive(Clone, Debug)]
pub struct SignalDomain {
    pub protocol: String,
}

impl PayloadDomain for SignalDomain {
    fn validate(&self, payload: &Payload) -> bool {
        payload.signal_samples(&self.protocol).is_some_and(|s| {
            s.len() == SIGNAL_LEN && s.iter().all(|v| v.is_finite() && (-1.0..=1.0).contains(v))
        })
    }

    fn sample_one(&self, seed: u64) -> Payload {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..SIGNAL_LEN).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Payload::signal(self.protocol.clone(), samples)
    }
}

pub fn signal_object(protocol: &str, connector: &str) -> Object {
    Object::new(protocol, Arc::new(SignalDomain { protocol: protocol.to_string() }))
        .with_tag(CONNECTOR_TAG, connector)
}

/// An adapter re-tags the signal with the output protocol and transforms
/// the samples.
pub fn adapter(
    name: &str,
    from: &'static str,
    to: &'static str,
    transform: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
) -> Behavior {
    let name = name.to_string();
    Behavior::new(name.clone(), move |p| {
        let s = p
            .signal_samples(from)
            .ok_or_else(|| BehaviorError(format!("{name}: expected a {from} signal")))?;
        Ok(Payload::signal(to, transform(s)))
    })
}

fn affine(scale: f64, offset: f64) -> impl Fn(&[f64]) -> Vec<f64> + Send + Sync {
    move |s| s.iter().map(|v| scale * v + offset).collect()
}

/// Three-tap [1/4, 1/2, 1/4] smoothing with clamped edges.
fn smooth(s: &[f64]) -> Vec<f64> {
    let n = s.len();
    (0..n)
        .map(|i| {
            let prev = s[i.saturating_sub(1)];
            let next = s[(i + 1).min(n - 1)];
            0.25 * prev + 0.5 * s[i] + 0.25 * next
        })
        .collect()
}

/// USB to RS232, with RS232's inverted line polarity.
pub fn usb_to_rs232() -> Morphism {
    Morphism::new("usb_to_rs232", ArrowSignature::new("USB", "RS232"), adapter("usb_to_rs232", "USB", "RS232", affine(-1.0, 0.0)))
        .with_aliases(["USBG-232FT-1", "U232-P9"])
}

/// The reverse adapter. Not part of the builtin category; registering it
/// makes USB and RS232 isomorphic.
pub fn rs232_to_usb() -> Morphism {
    Morphism::new("rs232_to_usb", ArrowSignature::new("RS232", "USB"), adapter("rs232_to_usb", "RS232", "USB", affine(-1.0, 0.0)))
}

pub fn db9_to_db25_serial() -> Morphism {
    Morphism::new(
        "db9_to_db25_serial",
        ArrowSignature::new("RS232", "RS232"),
        adapter("db9_to_db25_serial", "RS232", "RS232", affine(0.9, 0.0)),
    )
}

pub fn dvi_to_vga() -> Morphism {
    Morphism::new("dvi_to_vga", ArrowSignature::new("DVI", "VGA"), adapter("dvi_to_vga", "DVI", "VGA", affine(0.8, 0.1)))
}

pub fn vga_to_svideo() -> Morphism {
    Morphism::new("vga_to_svideo", ArrowSignature::new("VGA", "SVideo"), adapter("vga_to_svideo", "VGA", "SVideo", smooth))
}

pub fn ega_to_vga() -> Morphism {
    Morphism::new("ega_to_vga", ArrowSignature::new("EGA", "VGA"), adapter("ega_to_vga", "EGA", "VGA", affine(0.5, 0.0)))
}

/// Builtin adapters, looked up by canonical id.
pub fn adapter_by_name(name: &str) -> Option<Morphism> {
    Some(match name {
        "usb_to_rs232" => usb_to_rs232(),
        "rs232_to_usb" => rs232_to_usb(),
        "db9_to_db25_serial" => db9_to_db25_serial(),
        "dvi_to_vga" => dvi_to_vga(),
        "vga_to_svideo" => vga_to_svideo(),
        "ega_to_vga" => ega_to_vga(),
        _ => return None,
    })
}

/// The circuits category: six protocols, five adapters and a virtual
/// identity per protocol.
pub fn circuits() -> Category {
    let mut cat = Category::new("circuits");
    for (protocol, connector) in PROTOCOLS {
        cat.add_object(signal_object(protocol, connector)).expect("fresh");
    }
    for m in [usb_to_rs232(), db9_to_db25_serial(), dvi_to_vga(), vga_to_svideo(), ega_to_vga()] {
        cat.add_morphism(m).expect("unique builtin ids");
    }
    cat.add_virtual_identities().expect("one identity per protocol");
    cat
}
