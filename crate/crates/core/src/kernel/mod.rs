//! The category kernel: objects, morphisms, interface-checked composition
//! and designated identities.
//!
//! Behaviors are pure functions over finite [`Payload`]s. Equality of
//! morphisms is either intensional (same `canonical_id`) or extensional
//! (agreement on a seeded sample set, see [`Sampling`]).

mod category;
mod expr;
mod morphism;
mod object;
mod payload;

pub use category::{
    check_category, compose, identity_of, Category, CategoryError, Sampling, Violation,
    WellFormednessReport, DEFAULT_SAMPLES, DEFAULT_SEED,
};
pub use expr::{eval_expr, CompositionExpr};
pub use morphism::{ArrowSignature, Behavior, BehaviorError, Flag, Morphism, Outcome};
pub use object::{mix_seed, Object, ObjectId, PayloadDomain, Sample};
pub use payload::{Language, Payload, SIGNAL_EPSILON};
