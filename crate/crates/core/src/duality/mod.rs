//! Opposite categories and dual formulas.

mod formula;
mod opposite;

pub use formula::{dualize_formula, is_object_name, Equation, Formula, FormulaError, MorphTerm, ObjectTerm};
pub use opposite::{dualize_category, dualize_dual_is_identity, OpArrow, OppositeCategory, Skeleton, OP_SUFFIX};
