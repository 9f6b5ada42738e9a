use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::payload::Payload;

/// Name of an object, unique within its category.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    /// Panics on an empty name; use [`ObjectId::try_new`] for untrusted input.
    pub fn new(name: impl Into<String>) -> Self {
        Self::try_new(name).expect("object names must be non-empty")
    }

    pub fn try_new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        (!name.is_empty()).then_some(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        ObjectId::new(s)
    }
}

/// The payload domain an object stands for: a membership predicate plus a
/// seeded generator of representatives.
///
/// `sample_one` must be a pure function of the seed and must only produce
/// payloads accepted by `validate`.
pub trait PayloadDomain: Send + Sync {
    fn validate(&self, payload: &Payload) -> bool;
    fn sample_one(&self, seed: u64) -> Payload;
}

/// splitmix64 finalizer, used to derive per-sample seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A drawn representative together with the seed that regenerates it.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub seed: u64,
    pub payload: Payload,
}

#[derive(Clone)]
pub struct Object {
    pub id: ObjectId,
    domain: Arc<dyn PayloadDomain>,
    /// Free-form descriptive tags, e.g. a circuit's physical connector.
    pub metadata: BTreeMap<String, String>,
}

impl Object {
    pub fn new(id: impl Into<ObjectId>, domain: Arc<dyn PayloadDomain>) -> Self {
        Self { id: id.into(), domain, metadata: BTreeMap::new() }
    }

    pub fn with_tag(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn validate(&self, payload: &Payload) -> bool {
        self.domain.validate(payload)
    }

    pub fn sample_at(&self, seed: u64) -> Payload {
        self.domain.sample_one(seed)
    }

    /// `count` representatives; sample `i` is drawn from `mix_seed(seed, i)`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Sample> {
        (0..count as u64)
            .map(|i| {
                let seed = mix_seed(seed, i);
                Sample { seed, payload: self.domain.sample_one(seed) }
            })
            .collect()
    }
}

impl fmt::Debug for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Object").field("id", &self.id).field("metadata", &self.metadata).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_names_are_rejected() {
        assert!(ObjectId::try_new("").is_none());
        assert_eq!(ObjectId::new("C"), ObjectId::from("C"));
        assert_ne!(ObjectId::new("C"), ObjectId::new("c"));
    }

    #[test]
    fn derived_seeds_differ_per_index() {
        let seeds: std::collections::BTreeSet<_> = (0..1000).map(|i| mix_seed(0xC47, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(mix_seed(1, 2), mix_seed(1, 2));
    }
}
