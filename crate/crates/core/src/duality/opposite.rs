use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::{ArrowSignature, Category, CategoryError, ObjectId, Sampling};
use crate::laws::{Counterexample, LawReport};

pub const OP_SUFFIX: &str = "^op";

/// The structural part of a category: objects, arrow signatures and
/// designated identities, without behaviors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub name: String,
    pub objects: BTreeSet<ObjectId>,
    pub arrows: BTreeMap<String, ArrowSignature>,
    pub identities: BTreeMap<ObjectId, String>,
}

impl Skeleton {
    pub fn of(cat: &Category) -> Self {
        Self {
            name: cat.name.clone(),
            objects: cat.object_ids().cloned().collect(),
            arrows: cat.morphisms().map(|m| (m.canonical_id.clone(), m.sig.clone())).collect(),
            identities: cat.identities().clone(),
        }
    }

    /// First structural difference from `other`, if any.
    pub fn difference(&self, other: &Skeleton) -> Option<String> {
        if self.name != other.name {
            return Some(format!("name {} differs from {}", self.name, other.name));
        }
        if self.objects != other.objects {
            let diff: Vec<_> = self.objects.symmetric_difference(&other.objects).map(ToString::to_string).collect();
            return Some(format!("objects differ: {}", diff.join(", ")));
        }
        for (id, sig) in &self.arrows {
            match other.arrows.get(id) {
                None => return Some(format!("morphism {id} is missing")),
                Some(s) if s != sig => return Some(format!("morphism {id} has {s}, expected {sig}")),
                _ => {}
            }
        }
        if let Some(id) = other.arrows.keys().find(|id| !self.arrows.contains_key(*id)) {
            return Some(format!("unexpected morphism {id}"));
        }
        if self.identities != other.identities {
            return Some("designated identities differ".to_string());
        }
        None
    }
}

/// An arrow of an opposite category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpArrow {
    pub id: String,
    pub sig: ArrowSignature,
}

/// `C^op`: the same objects, every arrow reversed. Arrows carry no behavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OppositeCategory {
    /// Name of the category this is the opposite of.
    pub base: String,
    base_arrows: BTreeMap<String, ArrowSignature>,
    pub skeleton: Skeleton,
}

fn op_name(name: &str) -> String {
    format!("{name}{OP_SUFFIX}")
}

fn dualize_skeleton(base: &Skeleton) -> OppositeCategory {
    let skeleton = Skeleton {
        name: op_name(&base.name),
        objects: base.objects.clone(),
        arrows: base.arrows.iter().map(|(id, sig)| (op_name(id), sig.reversed())).collect(),
        identities: base.identities.iter().map(|(o, id)| (o.clone(), op_name(id))).collect(),
    };
    OppositeCategory { base: base.name.clone(), base_arrows: base.arrows.clone(), skeleton }
}

pub fn dualize_category(cat: &Category) -> OppositeCategory {
    dualize_skeleton(&Skeleton::of(cat))
}

impl OppositeCategory {
    /// `(C^op)^op`, still carrying the doubled suffixes.
    pub fn dual(&self) -> OppositeCategory {
        dualize_skeleton(&self.skeleton)
    }

    pub fn arrow(&self, id: &str) -> Option<OpArrow> {
        self.skeleton.arrows.get(id).map(|sig| OpArrow { id: id.to_string(), sig: sig.clone() })
    }

    /// `outer · inner` in the opposite category, which is `(base(inner) ·
    /// base(outer))^op`. The result's signature is cross-checked against
    /// the reversed signature of the base composite.
    pub fn compose(&self, outer: &str, inner: &str) -> Result<OpArrow, CategoryError> {
        let lookup = |id: &str| self.arrow(id).ok_or_else(|| CategoryError::UnknownMorphism(id.to_string()));
        let (o, i) = (lookup(outer)?, lookup(inner)?);
        if i.sig.target != o.sig.source {
            return Err(CategoryError::InterfaceMismatch {
                output: i.sig.target,
                input: o.sig.source,
                at: Some(format!("{outer} . {inner}")),
            });
        }
        let base_of = |id: &str| id.strip_suffix(OP_SUFFIX).expect("opposite ids carry the suffix").to_string();
        let (o_base, i_base) = (base_of(outer), base_of(inner));
        let (o_sig, i_sig) = (&self.base_arrows[&o_base], &self.base_arrows[&i_base]);
        // base(inner) · base(outer) applies base(outer) first
        if o_sig.target != i_sig.source {
            return Err(CategoryError::InterfaceMismatch {
                output: o_sig.target.clone(),
                input: i_sig.source.clone(),
                at: Some(format!("{i_base} . {o_base}")),
            });
        }
        let sig = ArrowSignature::new(i.sig.source.clone(), o.sig.target.clone());
        debug_assert_eq!(sig, ArrowSignature::new(o_sig.source.clone(), i_sig.target.clone()).reversed());
        Ok(OpArrow { id: format!("({i_base}∘{o_base}){OP_SUFFIX}"), sig })
    }

    /// Removes one doubled `^op^op` suffix from every name.
    pub fn strip_double_op(&self) -> Skeleton {
        let double = format!("{OP_SUFFIX}{OP_SUFFIX}");
        let strip = |s: &str| s.strip_suffix(double.as_str()).unwrap_or(s).to_string();
        Skeleton {
            name: strip(&self.skeleton.name),
            objects: self.skeleton.objects.clone(),
            arrows: self.skeleton.arrows.iter().map(|(id, sig)| (strip(id), sig.clone())).collect(),
            identities: self.skeleton.identities.iter().map(|(o, id)| (o.clone(), strip(id))).collect(),
        }
    }
}

/// `(C^op)^op = C`, compared structurally.
pub fn dualize_dual_is_identity(cat: &Category) -> LawReport {
    let original = Skeleton::of(cat);
    let round_trip = dualize_category(cat).dual().strip_double_op();
    let subject = vec![cat.name.clone()];
    let sampling = Sampling::new(0, 0);
    match original.difference(&round_trip) {
        None => LawReport::pass("duality-involution", subject, sampling),
        Some(detail) => LawReport::fail("duality-involution", subject, sampling, Counterexample::Structural { detail }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{compilers, pipes};
    use crate::kernel::{Behavior, Morphism, Object};
    use std::sync::Arc;

    #[test]
    fn endomorphisms_are_signature_fixed_points() {
        let op = dualize_category(&pipes::pipes());
        let a = op.arrow("grep_v_foo^op").unwrap();
        assert_eq!(a.sig, ArrowSignature::new("TextStream", "TextStream"));
        assert_eq!(op.skeleton.name, "pipes^op");
        assert_eq!(op.base, "pipes");
    }

    #[test]
    fn compilers_arrows_reverse() {
        let op = dualize_category(&compilers::compilers());
        assert_eq!(op.arrow("arith_to_stack^op").unwrap().sig, ArrowSignature::new("Stack", "Arith"));
        assert_eq!(op.skeleton.identities[&ObjectId::new("Arith")], "cpp_like^op");
    }

    #[test]
    fn opposite_composition() {
        let mut cat = Category::new("abc");
        for o in ["A", "B", "C"] {
            cat.add_object(Object::new(o, Arc::new(pipes::TextStreamDomain))).unwrap();
        }
        cat.add_morphism(Morphism::new("f", ArrowSignature::new("A", "B"), Behavior::identity())).unwrap();
        cat.add_morphism(Morphism::new("g", ArrowSignature::new("B", "C"), Behavior::identity())).unwrap();
        let op = dualize_category(&cat);
        let c = op.compose("f^op", "g^op").unwrap();
        assert_eq!(c.sig, ArrowSignature::new("C", "A"));
        assert_eq!(c.id, "(g∘f)^op");
        assert!(matches!(op.compose("g^op", "f^op"), Err(CategoryError::InterfaceMismatch { .. })));
    }

    #[test]
    fn empty_category_involution() {
        assert!(dualize_dual_is_identity(&Category::new("empty")).passed());
    }

    #[test]
    fn difference_reports_signature_change() {
        let s = Skeleton::of(&compilers::compilers());
        let mut t = s.clone();
        t.arrows.insert("arith_to_stack".into(), ArrowSignature::new("Stack", "Arith"));
        assert!(s.difference(&t).unwrap().contains("arith_to_stack"));
    }
}
