//! Law-checked category composition.
//!
//! A small kernel of objects, morphisms and composition ([`kernel`]), law
//! checks over it ([`laws`]), opposite categories and formula duals
//! ([`duality`]), functors ([`functors`]), and three executable example
//! categories: stream pipelines, toy compiler passes and signal adapters
//! ([`instances`]).

pub mod duality;
pub mod functors;
pub mod instances;
pub mod kernel;
pub mod laws;
pub mod registry;

pub use kernel::{
    check_category, compose, eval_expr, identity_of, ArrowSignature, Behavior, Category,
    CategoryError, CompositionExpr, Flag, Morphism, Object, ObjectId, Payload, Sampling,
};
pub use registry::Registry;
