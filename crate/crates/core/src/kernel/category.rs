use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::morphism::{ArrowSignature, Flag, Morphism};
use super::object::{Object, ObjectId, Sample};

/// Default number of sampled payloads for extensional checks.
pub const DEFAULT_SAMPLES: usize = 100;
/// Default base seed for extensional checks.
pub const DEFAULT_SEED: u64 = 0xC47;

/// How many representatives to draw, and from which base seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

impl Sampling {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed }
    }
}

impl Default for Sampling {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CategoryError {
    /// A "nonsensical" composition: the first morphism's target is not the
    /// second one's source.
    #[error("InterfaceMismatch({output}, {input}){}", .at.as_ref().map(|a| format!(" at `{a}`")).unwrap_or_default())]
    InterfaceMismatch { output: ObjectId, input: ObjectId, at: Option<String> },
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectId),
    #[error("alias `{alias}` is ambiguous: it names {}", .candidates.join(", "))]
    AmbiguousAlias { alias: String, candidates: Vec<String> },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("object `{0}` already has a designated identity")]
    DuplicateIdentity(ObjectId),
    #[error("object `{0}` has no designated identity")]
    MissingIdentity(ObjectId),
    #[error("parse error at offset {offset}: {message}")]
    ExprParse { offset: usize, message: String },
}

/// Objects, morphisms and designated identities.
#[derive(Clone, Debug, Default)]
pub struct Category {
    pub name: String,
    objects: BTreeMap<ObjectId, Object>,
    morphisms: BTreeMap<String, Morphism>,
    identities: BTreeMap<ObjectId, String>,
}

impl Category {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn add_object(&mut self, object: Object) -> Result<(), CategoryError> {
        if self.objects.contains_key(&object.id) {
            return Err(CategoryError::DuplicateName(object.id.to_string()));
        }
        self.objects.insert(object.id.clone(), object);
        Ok(())
    }

    /// Registers a morphism. Endpoints are not checked here; dangling
    /// endpoints are reported by [`check_category`].
    pub fn add_morphism(&mut self, morphism: Morphism) -> Result<(), CategoryError> {
        if self.morphisms.contains_key(&morphism.canonical_id) {
            return Err(CategoryError::DuplicateName(morphism.canonical_id));
        }
        self.morphisms.insert(morphism.canonical_id.clone(), morphism);
        Ok(())
    }

    pub fn designate_identity(&mut self, object: &ObjectId, id: &str) -> Result<(), CategoryError> {
        if !self.objects.contains_key(object) {
            return Err(CategoryError::UnknownObject(object.clone()));
        }
        if !self.morphisms.contains_key(id) {
            return Err(CategoryError::UnknownMorphism(id.to_string()));
        }
        if self.identities.contains_key(object) {
            return Err(CategoryError::DuplicateIdentity(object.clone()));
        }
        self.identities.insert(object.clone(), id.to_string());
        Ok(())
    }

    /// Registers `morphism` and designates it as the identity of its source.
    pub fn add_identity(&mut self, morphism: Morphism) -> Result<(), CategoryError> {
        let object = morphism.sig.source.clone();
        let id = morphism.canonical_id.clone();
        self.add_morphism(morphism)?;
        self.designate_identity(&object, &id)
    }

    /// Adds a virtual identity for every object that lacks a designated one.
    pub fn add_virtual_identities(&mut self) -> Result<(), CategoryError> {
        let missing: Vec<ObjectId> =
            self.objects.keys().filter(|o| !self.identities.contains_key(*o)).cloned().collect();
        for object in missing {
            self.add_identity(Morphism::virtual_identity(&object))?;
        }
        Ok(())
    }

    pub fn add_alias(&mut self, id: &str, alias: impl Into<String>) -> Result<(), CategoryError> {
        let m = self
            .morphisms
            .get_mut(id)
            .ok_or_else(|| CategoryError::UnknownMorphism(id.to_string()))?;
        m.aliases.insert(alias.into());
        Ok(())
    }

    pub fn add_flag(&mut self, id: &str, flag: Flag) -> Result<(), CategoryError> {
        let m = self
            .morphisms
            .get_mut(id)
            .ok_or_else(|| CategoryError::UnknownMorphism(id.to_string()))?;
        m.flags.insert(flag);
        Ok(())
    }

    pub fn object(&self, id: &ObjectId) -> Result<&Object, CategoryError> {
        self.objects.get(id).ok_or_else(|| CategoryError::UnknownObject(id.clone()))
    }

    pub fn objects(&self) -> impl Iterator<Item = &Object> {
        self.objects.values()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = &ObjectId> {
        self.objects.keys()
    }

    /// Morphisms in canonical_id order.
    pub fn morphisms(&self) -> impl Iterator<Item = &Morphism> {
        self.morphisms.values()
    }

    pub fn morphism(&self, id: &str) -> Option<&Morphism> {
        self.morphisms.get(id)
    }

    pub fn identities(&self) -> &BTreeMap<ObjectId, String> {
        &self.identities
    }

    pub fn is_designated_identity(&self, id: &str) -> bool {
        self.identities.values().any(|i| i == id)
    }

    /// Looks a morphism up by canonical id, falling back to a unique alias.
    pub fn resolve(&self, name: &str) -> Result<&Morphism, CategoryError> {
        if let Some(m) = self.morphisms.get(name) {
            return Ok(m);
        }
        let hits: Vec<&Morphism> =
            self.morphisms.values().filter(|m| m.aliases.contains(name)).collect();
        match hits.as_slice() {
            [] => Err(CategoryError::UnknownMorphism(name.to_string())),
            [one] => Ok(one),
            many => Err(CategoryError::AmbiguousAlias {
                alias: name.to_string(),
                candidates: many.iter().map(|m| m.canonical_id.clone()).collect(),
            }),
        }
    }

    /// Registered morphisms with the given signature, in canonical_id order.
    pub fn hom<'a>(
        &'a self,
        source: &'a ObjectId,
        target: &'a ObjectId,
    ) -> impl Iterator<Item = &'a Morphism> + 'a {
        self.morphisms.values().filter(move |m| &m.sig.source == source && &m.sig.target == target)
    }

    /// Rebuilds a morphism from its canonical id, including composite ids of
    /// the form `(g∘f)` produced by [`compose`].
    pub fn rebuild(&self, id: &str) -> Result<Morphism, CategoryError> {
        if let Some(m) = self.morphisms.get(id) {
            return Ok(m.clone());
        }
        let inner = id
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| CategoryError::UnknownMorphism(id.to_string()))?;
        let mut depth = 0usize;
        for (i, c) in inner.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                '∘' if depth == 0 => {
                    let g = self.rebuild(&inner[..i])?;
                    let f = self.rebuild(&inner[i + '∘'.len_utf8()..])?;
                    return compose(self, &g, &f);
                }
                _ => {}
            }
        }
        Err(CategoryError::UnknownMorphism(id.to_string()))
    }

    pub(crate) fn is_registered(&self, m: &Morphism) -> Result<(), CategoryError> {
        match m.parts.iter().find(|p| !self.morphisms.contains_key(*p)) {
            Some(missing) => Err(CategoryError::UnknownMorphism(missing.clone())),
            None => Ok(()),
        }
    }
}

/// `g · f`: apply `f`, then `g`.
pub fn compose(cat: &Category, g: &Morphism, f: &Morphism) -> Result<Morphism, CategoryError> {
    cat.is_registered(f)?;
    cat.is_registered(g)?;
    if f.sig.target != g.sig.source {
        return Err(CategoryError::InterfaceMismatch {
            output: f.sig.target.clone(),
            input: g.sig.source.clone(),
            at: None,
        });
    }
    let mut parts = g.parts.clone();
    parts.extend(f.parts.iter().cloned());
    Ok(Morphism {
        canonical_id: format!("({}∘{})", g.canonical_id, f.canonical_id),
        aliases: Default::default(),
        sig: ArrowSignature::new(f.sig.source.clone(), g.sig.target.clone()),
        behavior: g.behavior.after(&f.behavior),
        flags: Default::default(),
        parts,
    })
}

pub fn identity_of<'a>(cat: &'a Category, object: &ObjectId) -> Result<&'a Morphism, CategoryError> {
    cat.object(object)?;
    let id = cat
        .identities
        .get(object)
        .ok_or_else(|| CategoryError::MissingIdentity(object.clone()))?;
    cat.morphism(id).ok_or_else(|| CategoryError::UnknownMorphism(id.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    DanglingSource { morphism: String, object: ObjectId },
    DanglingTarget { morphism: String, object: ObjectId },
    MissingIdentity { object: ObjectId },
    IdentityForUnknownObject { object: ObjectId, morphism: String },
    UnregisteredIdentity { object: ObjectId, morphism: String },
    IdentitySignature { object: ObjectId, morphism: String, sig: ArrowSignature },
    IdentityBehavior { object: ObjectId, morphism: String, sample_seed: u64 },
    VirtualNotIdentity { morphism: String, sample_seed: u64 },
    InvalidSample { object: ObjectId, sample_seed: u64 },
    BehaviorFailure { morphism: String, sample_seed: u64, message: String },
    CodomainViolation { morphism: String, sample_seed: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingSource { morphism, object } => {
                write!(f, "DanglingSource {morphism}: source {object} is not registered")
            }
            Violation::DanglingTarget { morphism, object } => {
                write!(f, "DanglingTarget {morphism}: target {object} is not registered")
            }
            Violation::MissingIdentity { object } => {
                write!(f, "MissingIdentity {object}: no designated identity")
            }
            Violation::IdentityForUnknownObject { object, morphism } => {
                write!(f, "IdentityForUnknownObject {object}: designated {morphism}")
            }
            Violation::UnregisteredIdentity { object, morphism } => {
                write!(f, "UnregisteredIdentity {object}: {morphism} is not registered")
            }
            Violation::IdentitySignature { object, morphism, sig } => {
                write!(f, "IdentitySignature {object}: {morphism} has signature {sig}")
            }
            Violation::IdentityBehavior { object, morphism, sample_seed } => write!(
                f,
                "IdentityBehavior {object}: {morphism} changes sample seed {sample_seed:#x}"
            ),
            Violation::VirtualNotIdentity { morphism, sample_seed } => write!(
                f,
                "VirtualNotIdentity {morphism}: changes sample seed {sample_seed:#x}"
            ),
            Violation::InvalidSample { object, sample_seed } => write!(
                f,
                "InvalidSample {object}: sample seed {sample_seed:#x} fails validation"
            ),
            Violation::BehaviorFailure { morphism, sample_seed, message } => write!(
                f,
                "BehaviorFailure {morphism}: sample seed {sample_seed:#x}: {message}"
            ),
            Violation::CodomainViolation { morphism, sample_seed } => write!(
                f,
                "CodomainViolation {morphism}: output for sample seed {sample_seed:#x} fails target validation"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WellFormednessReport {
    pub category: String,
    pub samples: usize,
    pub seed: u64,
    pub violations: Vec<Violation>,
}

impl WellFormednessReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every category invariant and spot-checks each morphism's
/// domain/codomain on sampled payloads. Never fails; problems are listed.
pub fn check_category(cat: &Category, sampling: Sampling) -> WellFormednessReport {
    let mut violations = Vec::new();
    let samples: BTreeMap<&ObjectId, Vec<Sample>> =
        cat.objects.iter().map(|(id, o)| (id, o.sample(sampling.samples, sampling.seed))).collect();

    for (id, drawn) in &samples {
        let object = &cat.objects[*id];
        if let Some(bad) = drawn.iter().find(|s| !object.validate(&s.payload)) {
            violations.push(Violation::InvalidSample { object: (*id).clone(), sample_seed: bad.seed });
        }
    }

    for (object, id) in &cat.identities {
        if !cat.objects.contains_key(object) {
            violations.push(Violation::IdentityForUnknownObject {
                object: object.clone(),
                morphism: id.clone(),
            });
        }
    }
    for object in cat.objects.keys() {
        let Some(id) = cat.identities.get(object) else {
            violations.push(Violation::MissingIdentity { object: object.clone() });
            continue;
        };
        let Some(m) = cat.morphisms.get(id) else {
            violations.push(Violation::UnregisteredIdentity {
                object: object.clone(),
                morphism: id.clone(),
            });
            continue;
        };
        if m.sig.source != *object || m.sig.target != *object {
            violations.push(Violation::IdentitySignature {
                object: object.clone(),
                morphism: id.clone(),
                sig: m.sig.clone(),
            });
            continue;
        }
        if let Some(bad) = samples[object].iter().find(|s| m.apply(&s.payload).as_ref() != Ok(&s.payload)) {
            violations.push(Violation::IdentityBehavior {
                object: object.clone(),
                morphism: id.clone(),
                sample_seed: bad.seed,
            });
        }
    }

    for m in cat.morphisms.values() {
        let mut dangling = false;
        if !cat.objects.contains_key(&m.sig.source) {
            dangling = true;
            violations.push(Violation::DanglingSource {
                morphism: m.canonical_id.clone(),
                object: m.sig.source.clone(),
            });
        }
        if !cat.objects.contains_key(&m.sig.target) {
            dangling = true;
            violations.push(Violation::DanglingTarget {
                morphism: m.canonical_id.clone(),
                object: m.sig.target.clone(),
            });
        }
        if dangling {
            continue;
        }
        let target = &cat.objects[&m.sig.target];
        let mut virtual_reported = false;
        for s in &samples[&m.sig.source] {
            match m.apply(&s.payload) {
                Err(e) => {
                    violations.push(Violation::BehaviorFailure {
                        morphism: m.canonical_id.clone(),
                        sample_seed: s.seed,
                        message: e.0,
                    });
                    break;
                }
                Ok(out) => {
                    if m.has_flag(Flag::Virtual) && !virtual_reported && out != s.payload {
                        virtual_reported = true;
                        violations.push(Violation::VirtualNotIdentity {
                            morphism: m.canonical_id.clone(),
                            sample_seed: s.seed,
                        });
                    }
                    if !target.validate(&out) {
                        violations.push(Violation::CodomainViolation {
                            morphism: m.canonical_id.clone(),
                            sample_seed: s.seed,
                        });
                        break;
                    }
                }
            }
        }
    }

    WellFormednessReport {
        category: cat.name.clone(),
        samples: sampling.samples,
        seed: sampling.seed,
        violations,
    }
}
