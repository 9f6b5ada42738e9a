//! Functors between registered categories, given by explicit finite maps.
//!
//! The composition law needs `F(g · f)`, but composites are not in a finite
//! morphism map. A composite is identified with every registered morphism
//! it agrees with on samples (the same way a script calling two compilers
//! can be "the same morphism" as one compiler), and the law is checked for
//! each such representative `h`: `F(h) = F(g) · F(f)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::instances::netpipes::{NET_PREFIX, NET_STREAM};
use crate::instances::pipes::{self, TEXT_STREAM};
use crate::kernel::{compose, Category, CategoryError, Morphism, ObjectId, Sample, Sampling};
use crate::laws::{check_identity_laws, disagreement, Counterexample, LawReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn then(self, other: Variance) -> Variance {
        if self == other {
            Variance::Covariant
        } else {
            Variance::Contravariant
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("functor `{functor}` does not map {missing}")]
    PartialMap { functor: String, missing: String },
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("cannot compose `{outer}` after `{inner}`: `{inner}` lands in {inner_target} but `{outer}` starts from {outer_source}")]
    CategoryMismatch { outer: String, inner: String, inner_target: String, outer_source: String },
    #[error("functor `{functor}` refers to category `{category}` outside the given set")]
    DanglingEndpoint { functor: String, category: String },
    #[error("duplicate functor name `{0}`")]
    DuplicateName(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Functor {
    pub name: String,
    pub source_cat: String,
    pub target_cat: String,
    pub object_map: BTreeMap<ObjectId, ObjectId>,
    pub morphism_map: BTreeMap<String, String>,
    pub variance: Variance,
}

impl Functor {
    /// Maps every object and morphism of `cat` to itself.
    pub fn identity(cat: &Category) -> Self {
        Self {
            name: format!("id_{}", cat.name),
            source_cat: cat.name.clone(),
            target_cat: cat.name.clone(),
            object_map: cat.object_ids().map(|o| (o.clone(), o.clone())).collect(),
            morphism_map: cat.morphisms().map(|m| (m.canonical_id.clone(), m.canonical_id.clone())).collect(),
            variance: Variance::Covariant,
        }
    }

    /// Same endpoints, variance and maps; the name is ignored.
    pub fn same_action(&self, other: &Functor) -> bool {
        self.source_cat == other.source_cat
            && self.target_cat == other.target_cat
            && self.variance == other.variance
            && self.object_map == other.object_map
            && self.morphism_map == other.morphism_map
    }

    fn map_object(&self, x: &ObjectId) -> Result<&ObjectId, FunctorError> {
        self.object_map.get(x).ok_or_else(|| FunctorError::PartialMap {
            functor: self.name.clone(),
            missing: format!("object {x}"),
        })
    }

    fn map_morphism(&self, f: &str) -> Result<&String, FunctorError> {
        self.morphism_map.get(f).ok_or_else(|| FunctorError::PartialMap {
            functor: self.name.clone(),
            missing: format!("morphism {f}"),
        })
    }

    /// Errors unless both maps cover `source`'s registries.
    pub fn check_total(&self, source: &Category) -> Result<(), FunctorError> {
        for x in source.object_ids() {
            self.map_object(x)?;
        }
        for m in source.morphisms() {
            self.map_morphism(&m.canonical_id)?;
        }
        Ok(())
    }

    /// The signature `F(f)` must have, given `f`'s.
    fn expected_image(&self, f: &Morphism) -> Result<(ObjectId, ObjectId), FunctorError> {
        let (fx, fy) = (self.map_object(&f.sig.source)?.clone(), self.map_object(&f.sig.target)?.clone());
        Ok(match self.variance {
            Variance::Covariant => (fx, fy),
            Variance::Contravariant => (fy, fx),
        })
    }
}

/// `nc` around every pipes process: TextStream to NetStream, `f` to `net_f`.
pub fn network_wrap_functor() -> Functor {
    let base = pipes::pipes();
    Functor {
        name: "NetworkWrap".to_string(),
        source_cat: "pipes".to_string(),
        target_cat: "netpipes".to_string(),
        object_map: BTreeMap::from([(ObjectId::new(TEXT_STREAM), ObjectId::new(NET_STREAM))]),
        morphism_map: base
            .morphisms()
            .map(|m| (m.canonical_id.clone(), format!("{NET_PREFIX}{}", m.canonical_id)))
            .collect(),
        variance: Variance::Covariant,
    }
}

fn structural(law: &str, subject: &[String], sampling: Sampling, detail: String) -> LawReport {
    LawReport::fail(law, subject.to_vec(), sampling, Counterexample::Structural { detail })
}

struct SampleCache<'c> {
    cat: &'c Category,
    sampling: Sampling,
    drawn: BTreeMap<ObjectId, Vec<Sample>>,
}

impl<'c> SampleCache<'c> {
    fn new(cat: &'c Category, sampling: Sampling) -> Self {
        Self { cat, sampling, drawn: BTreeMap::new() }
    }

    fn get(&mut self, x: &ObjectId) -> Result<&[Sample], CategoryError> {
        if !self.drawn.contains_key(x) {
            let s = self.cat.object(x)?.sample(self.sampling.samples, self.sampling.seed);
            self.drawn.insert(x.clone(), s);
        }
        Ok(&self.drawn[x])
    }
}

/// Signature, identity-preservation and composition-preservation reports,
/// in that order.
pub fn check_functor_laws(
    functor: &Functor,
    cats: &BTreeMap<String, Category>,
    sampling: Sampling,
) -> Result<Vec<LawReport>, FunctorError> {
    let lookup = |name: &str| cats.get(name).ok_or_else(|| FunctorError::UnknownCategory(name.to_string()));
    let (c, d) = (lookup(&functor.source_cat)?, lookup(&functor.target_cat)?);
    functor.check_total(c)?;
    let subject = vec![functor.name.clone()];

    let signature = (|| {
        for f in c.morphisms() {
            let image_id = functor.map_morphism(&f.canonical_id)?;
            let Ok(image) = d.resolve(image_id) else {
                return Ok(Some(format!("F({}) = {image_id} is not a morphism of {}", f.canonical_id, d.name)));
            };
            let (src, tgt) = functor.expected_image(f)?;
            for o in [&src, &tgt] {
                if d.object(o).is_err() {
                    return Ok(Some(format!("object {o} is not registered in {}", d.name)));
                }
            }
            if image.sig.source != src || image.sig.target != tgt {
                return Ok(Some(format!(
                    "F({}) = {} has signature {}, expected {src} -> {tgt}",
                    f.canonical_id, image.canonical_id, image.sig
                )));
            }
        }
        Ok::<_, FunctorError>(None)
    })()?;
    let signature_report = match signature {
        Some(detail) => structural("functor-signature", &subject, sampling, detail),
        None => LawReport::pass("functor-signature", subject.clone(), sampling),
    };

    let identity_report = identity_preservation(functor, c, d, &subject, sampling)?;
    let composition_report = composition_preservation(functor, c, d, &subject, sampling)?;
    Ok(vec![signature_report, identity_report, composition_report])
}

fn identity_preservation(
    functor: &Functor,
    c: &Category,
    d: &Category,
    subject: &[String],
    sampling: Sampling,
) -> Result<LawReport, FunctorError> {
    const LAW: &str = "functor-identity";
    for (x, h) in c.identities() {
        let fx = functor.map_object(x)?;
        let image_id = functor.map_morphism(h)?;
        let Ok(image) = d.resolve(image_id) else {
            return Ok(structural(LAW, subject, sampling, format!("F({h}) = {image_id} is not registered")));
        };
        if image.sig.source != *fx || image.sig.target != *fx {
            let detail = format!("F({h}) = {} has signature {}, expected {fx} -> {fx}", image.canonical_id, image.sig);
            return Ok(structural(LAW, subject, sampling, detail));
        }
        match check_identity_laws(d, image, sampling) {
            Ok(r) if r.passed() => {}
            Ok(r) => {
                let cx = r.counterexample.expect("failing reports carry a counterexample");
                return Ok(LawReport::fail(LAW, subject.to_vec(), sampling, cx));
            }
            Err(e) => return Ok(structural(LAW, subject, sampling, e.to_string())),
        }
    }
    Ok(LawReport::pass(LAW, subject.to_vec(), sampling))
}

fn composition_preservation(
    functor: &Functor,
    c: &Category,
    d: &Category,
    subject: &[String],
    sampling: Sampling,
) -> Result<LawReport, FunctorError> {
    const LAW: &str = "functor-composition";
    let mut c_samples = SampleCache::new(c, sampling);
    let mut d_samples = SampleCache::new(d, sampling);
    let fail = |detail: String| Ok(structural(LAW, subject, sampling, detail));
    for g in c.morphisms() {
        for f in c.morphisms().filter(|f| f.sig.target == g.sig.source) {
            let composite = match compose(c, g, f) {
                Ok(m) => m,
                Err(e) => return fail(e.to_string()),
            };
            let (Ok(fg), Ok(ff)) = (d.resolve(functor.map_morphism(&g.canonical_id)?), d.resolve(functor.map_morphism(&f.canonical_id)?)) else {
                return fail(format!("images of {} or {} are not registered", g.canonical_id, f.canonical_id));
            };
            let image_composite = match functor.variance {
                Variance::Covariant => compose(d, fg, ff),
                Variance::Contravariant => compose(d, ff, fg),
            };
            let image_composite = match image_composite {
                Ok(m) => m,
                Err(e) => return fail(format!("images of {} . {} do not compose: {e}", g.canonical_id, f.canonical_id)),
            };
            let samples = c_samples.get(&f.sig.source)?.to_vec();
            for h in c.hom(&f.sig.source, &g.sig.target) {
                if disagreement(&composite, Some(h), &samples).is_some() {
                    continue;
                }
                let Ok(fh) = d.resolve(functor.map_morphism(&h.canonical_id)?) else {
                    return fail(format!("image of {} is not registered", h.canonical_id));
                };
                let d_in = d_samples.get(&fh.sig.source)?;
                if let Some(cx) = disagreement(fh, Some(&image_composite), d_in) {
                    return Ok(LawReport::fail(LAW, subject.to_vec(), sampling, cx));
                }
            }
        }
    }
    Ok(LawReport::pass(LAW, subject.to_vec(), sampling))
}

/// `G · F`: apply `F`, then `G`.
pub fn compose_functors(g: &Functor, f: &Functor) -> Result<Functor, FunctorError> {
    if f.target_cat != g.source_cat {
        return Err(FunctorError::CategoryMismatch {
            outer: g.name.clone(),
            inner: f.name.clone(),
            inner_target: f.target_cat.clone(),
            outer_source: g.source_cat.clone(),
        });
    }
    let object_map = f
        .object_map
        .iter()
        .map(|(x, y)| Ok((x.clone(), g.map_object(y)?.clone())))
        .collect::<Result<_, FunctorError>>()?;
    let morphism_map = f
        .morphism_map
        .iter()
        .map(|(a, b)| Ok((a.clone(), g.map_morphism(b)?.clone())))
        .collect::<Result<_, FunctorError>>()?;
    Ok(Functor {
        name: format!("({}∘{})", g.name, f.name),
        source_cat: f.source_cat.clone(),
        target_cat: g.target_cat.clone(),
        object_map,
        morphism_map,
        variance: f.variance.then(g.variance),
    })
}

/// Categories as objects, functors as morphisms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatOfCategories {
    pub objects: BTreeSet<String>,
    /// Every functor, identity functors included, by name.
    pub morphisms: BTreeMap<String, Functor>,
    pub identities: BTreeMap<String, String>,
    pub reports: Vec<LawReport>,
}

impl CatOfCategories {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(LawReport::passed)
    }
}

/// Builds the category of the given categories and functors, adding an
/// identity functor per category, and checks identity and associativity
/// laws on the functor maps.
pub fn build_cat_of_categories(
    cats: &BTreeMap<String, Category>,
    functors: &[Functor],
) -> Result<CatOfCategories, FunctorError> {
    for f in functors {
        for endpoint in [&f.source_cat, &f.target_cat] {
            if !cats.contains_key(endpoint) {
                return Err(FunctorError::DanglingEndpoint { functor: f.name.clone(), category: endpoint.clone() });
            }
        }
    }
    let mut morphisms = BTreeMap::new();
    let mut identities = BTreeMap::new();
    for cat in cats.values() {
        let id = Functor::identity(cat);
        identities.insert(cat.name.clone(), id.name.clone());
        morphisms.insert(id.name.clone(), id);
    }
    for f in functors {
        if morphisms.insert(f.name.clone(), f.clone()).is_some() {
            return Err(FunctorError::DuplicateName(f.name.clone()));
        }
    }

    let subject: Vec<String> = cats.keys().cloned().collect();
    let sampling = Sampling::new(0, 0);
    let identity_failure = morphisms.values().find_map(|f| {
        let left = compose_functors(&morphisms[&identities[&f.target_cat]], f);
        let right = compose_functors(f, &morphisms[&identities[&f.source_cat]]);
        match (left, right) {
            (Ok(l), Ok(r)) if l.same_action(f) && r.same_action(f) => None,
            (Ok(_), Ok(_)) => Some(format!("identity functors do not absorb {}", f.name)),
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        }
    });
    let mut associativity_failure = None;
    'outer: for h in morphisms.values() {
        for g in morphisms.values().filter(|g| g.target_cat == h.source_cat) {
            for f in morphisms.values().filter(|f| f.target_cat == g.source_cat) {
                let lhs = compose_functors(h, g).and_then(|hg| compose_functors(&hg, f));
                let rhs = compose_functors(g, f).and_then(|gf| compose_functors(h, &gf));
                let problem = match (lhs, rhs) {
                    (Ok(l), Ok(r)) if l.same_action(&r) => None,
                    (Ok(_), Ok(_)) => Some(format!("({0}∘{1})∘{2} and {0}∘({1}∘{2}) differ", h.name, g.name, f.name)),
                    (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
                };
                if problem.is_some() {
                    associativity_failure = problem;
                    break 'outer;
                }
            }
        }
    }
    let report = |law: &str, failure: Option<String>| match failure {
        None => LawReport::pass(law, subject.clone(), sampling),
        Some(detail) => structural(law, &subject, sampling, detail),
    };
    let reports = vec![report("cat-identity", identity_failure), report("cat-associativity", associativity_failure)];
    Ok(CatOfCategories { objects: cats.keys().cloned().collect(), morphisms, identities, reports })
}
