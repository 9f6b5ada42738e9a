use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::object::ObjectId;
use super::payload::Payload;

/// Source and target of a morphism. Many morphisms may share one signature.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ArrowSignature {
    pub source: ObjectId,
    pub target: ObjectId,
}

impl ArrowSignature {
    pub fn new(source: impl Into<ObjectId>, target: impl Into<ObjectId>) -> Self {
        Self { source: source.into(), target: target.into() }
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target
    }

    pub fn reversed(&self) -> Self {
        Self { source: self.target.clone(), target: self.source.clone() }
    }
}

impl fmt::Display for ArrowSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// A behavior could not process its input (typically: the payload is not in
/// the domain the behavior was written for).
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{0}")]
pub struct BehaviorError(pub String);

pub type Outcome = Result<Payload, BehaviorError>;

type BehaviorFn = dyn Fn(&Payload) -> Outcome + Send + Sync;

/// An executable, pure payload transformer with a printable description.
#[derive(Clone)]
pub struct Behavior {
    description: Arc<str>,
    run: Arc<BehaviorFn>,
}

impl Behavior {
    pub fn new(
        description: impl Into<String>,
        run: impl Fn(&Payload) -> Outcome + Send + Sync + 'static,
    ) -> Self {
        Self { description: description.into().into(), run: Arc::new(run) }
    }

    pub fn identity() -> Self {
        Self::new("identity", |p| Ok(p.clone()))
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn apply(&self, payload: &Payload) -> Outcome {
        (self.run)(payload)
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Behavior) -> Behavior {
        let (g, f) = (self.run.clone(), first.run.clone());
        Behavior {
            description: format!("{} . {}", self.description, first.description).into(),
            run: Arc::new(move |p| f(p).and_then(|mid| g(&mid))),
        }
    }
}

impl fmt::Debug for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Behavior({})", self.description)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    NeutralByConstruction,
    NeutralByFiat,
    /// A theoretical identity with no concrete realization.
    Virtual,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::NeutralByConstruction => "neutral-by-construction",
            Flag::NeutralByFiat => "neutral-by-fiat",
            Flag::Virtual => "virtual",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "neutral-by-construction" => Some(Flag::NeutralByConstruction),
            "neutral-by-fiat" => Some(Flag::NeutralByFiat),
            "virtual" => Some(Flag::Virtual),
            _ => None,
        }
    }
}

/// A named black box between two objects.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub canonical_id: String,
    pub aliases: BTreeSet<String>,
    pub sig: ArrowSignature,
    pub behavior: Behavior,
    pub flags: BTreeSet<Flag>,
    /// Registered morphisms this one was composed from, in application
    /// order reversed (leftmost applied last). A plain morphism lists itself.
    pub(crate) parts: Vec<String>,
}

impl Morphism {
    pub fn new(canonical_id: impl Into<String>, sig: ArrowSignature, behavior: Behavior) -> Self {
        let canonical_id = canonical_id.into();
        Self {
            parts: vec![canonical_id.clone()],
            canonical_id,
            aliases: BTreeSet::new(),
            sig,
            behavior,
            flags: BTreeSet::new(),
        }
    }

    /// A virtual identity on `object`, named `id_<object>`.
    pub fn virtual_identity(object: &ObjectId) -> Self {
        Self::new(
            format!("id_{object}"),
            ArrowSignature::new(object.clone(), object.clone()),
            Behavior::identity(),
        )
        .with_flag(Flag::Virtual)
    }

    pub fn with_alias(mut self, alias: impl Into<String>) -> Self {
        self.aliases.insert(alias.into());
        self
    }

    pub fn with_aliases<I, S>(mut self, aliases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.aliases.extend(aliases.into_iter().map(Into::into));
        self
    }

    pub fn with_flag(mut self, flag: Flag) -> Self {
        self.flags.insert(flag);
        self
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn apply(&self, payload: &Payload) -> Outcome {
        self.behavior.apply(payload)
    }

    pub fn is_composite(&self) -> bool {
        self.parts.len() > 1
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.canonical_id, self.sig)
    }
}
