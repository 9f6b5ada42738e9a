//! Executable category axioms and the theorems that follow from them.
//!
//! Behavioral equality is sampled: two morphisms are treated as equal when
//! they agree on every payload drawn from the source object under a given
//! [`Sampling`]. Every report records the sample count and seed, and every
//! failing report carries a counterexample that [`replay`] reproduces.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{
    compose, identity_of, Category, CategoryError, Flag, Morphism, ObjectId, Outcome, Payload,
    Sample, Sampling,
};

/// Composable-triple enumeration stops after this many triples.
pub const MAX_ASSOCIATIVITY_TRIPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("`{0}` is not an endomorphism")]
    NotEndomorphism(String),
    #[error("`{first}` is on {first_object} but `{second}` is on {second_object}")]
    ObjectMismatch { first: String, first_object: ObjectId, second: String, second_object: ObjectId },
    #[error(transparent)]
    Category(#[from] CategoryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// What a morphism did with a payload.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observation {
    Output { payload: Payload },
    Failure { message: String },
}

impl From<Outcome> for Observation {
    fn from(o: Outcome) -> Self {
        match o {
            Ok(payload) => Observation::Output { payload },
            Err(e) => Observation::Failure { message: e.0 },
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Output { payload } => write!(f, "{payload}"),
            Observation::Failure { message } => write!(f, "failure: {message}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// `lhs` and `rhs` disagree on `input`. A missing `rhs` stands for the
    /// input itself (the payload identity).
    Behavioral {
        lhs: String,
        rhs: Option<String>,
        sample_seed: u64,
        input: Payload,
        expected: Observation,
        actual: Observation,
    },
    /// A bookkeeping law (signatures, maps) failed; no payload involved.
    Structural { detail: String },
}

impl Counterexample {
    pub fn input(&self) -> Option<&Payload> {
        match self {
            Counterexample::Behavioral { input, .. } => Some(input),
            Counterexample::Structural { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub law_name: String,
    pub subject: Vec<String>,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub samples_used: usize,
    pub seed: u64,
}

impl LawReport {
    pub fn pass(law_name: impl Into<String>, subject: Vec<String>, sampling: Sampling) -> Self {
        Self {
            law_name: law_name.into(),
            subject,
            verdict: Verdict::Pass,
            counterexample: None,
            samples_used: sampling.samples,
            seed: sampling.seed,
        }
    }

    pub fn fail(
        law_name: impl Into<String>,
        subject: Vec<String>,
        sampling: Sampling,
        counterexample: Counterexample,
    ) -> Self {
        Self { verdict: Verdict::Fail, counterexample: Some(counterexample), ..Self::pass(law_name, subject, sampling) }
    }

    fn from_check(
        law_name: impl Into<String>,
        subject: Vec<String>,
        sampling: Sampling,
        counterexample: Option<Counterexample>,
    ) -> Self {
        match counterexample {
            Some(cx) => Self::fail(law_name, subject, sampling, cx),
            None => Self::pass(law_name, subject, sampling),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Sort key used before emitting reports.
    pub fn sort_key(&self) -> (&str, &[String]) {
        (&self.law_name, &self.subject)
    }
}

/// `LAW <name> SUBJECT <ids> VERDICT <Pass|Fail> SAMPLES <n> SEED <hex>`,
/// followed by an indented counterexample block on failure.
impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subject = if self.subject.is_empty() { "-".to_string() } else { self.subject.join(",") };
        write!(
            f,
            "LAW {} SUBJECT {} VERDICT {:?} SAMPLES {} SEED {:#x}",
            self.law_name, subject, self.verdict, self.samples_used, self.seed
        )?;
        match &self.counterexample {
            None => Ok(()),
            Some(Counterexample::Structural { detail }) => write!(f, "\n  DETAIL {detail}"),
            Some(Counterexample::Behavioral { lhs, rhs, sample_seed, input, expected, actual }) => {
                write!(f, "\n  COMPARE {lhs} VS {}", rhs.as_deref().unwrap_or("input"))?;
                write!(f, "\n  SAMPLE_SEED {sample_seed:#x}")?;
                write!(f, "\n  INPUT {input}")?;
                write!(f, "\n  EXPECTED {expected}")?;
                write!(f, "\n  ACTUAL {actual}")
            }
        }
    }
}

/// First sample on which `lhs` and `rhs` (or the payload identity) disagree.
pub fn disagreement(lhs: &Morphism, rhs: Option<&Morphism>, samples: &[Sample]) -> Option<Counterexample> {
    samples.iter().find_map(|s| {
        let actual = lhs.apply(&s.payload);
        let expected = match rhs {
            Some(r) => r.apply(&s.payload),
            None => Ok(s.payload.clone()),
        };
        (actual != expected).then(|| Counterexample::Behavioral {
            lhs: lhs.canonical_id.clone(),
            rhs: rhs.map(|r| r.canonical_id.clone()),
            sample_seed: s.seed,
            input: s.payload.clone(),
            expected: expected.into(),
            actual: actual.into(),
        })
    })
}

/// Re-evaluates a behavioral counterexample in `cat`, returning the fresh
/// (expected, actual) observations.
pub fn replay(cat: &Category, cx: &Counterexample) -> Result<Option<(Observation, Observation)>, CategoryError> {
    let Counterexample::Behavioral { lhs, rhs, input, .. } = cx else {
        return Ok(None);
    };
    let actual = cat.rebuild(lhs)?.apply(input);
    let expected = match rhs {
        Some(r) => cat.rebuild(r)?.apply(input),
        None => Ok(input.clone()),
    };
    Ok(Some((expected.into(), actual.into())))
}

fn draw(cat: &Category, object: &ObjectId, sampling: Sampling) -> Result<Vec<Sample>, CategoryError> {
    Ok(cat.object(object)?.sample(sampling.samples, sampling.seed))
}

/// Checks `id_B · f = f` for every `f` into the candidate's object and
/// `g · id_A = g` for every `g` out of it.
pub fn check_identity_laws(cat: &Category, candidate: &Morphism, sampling: Sampling) -> Result<LawReport, LawError> {
    if !candidate.sig.is_endo() {
        return Err(LawError::NotEndomorphism(candidate.canonical_id.clone()));
    }
    let x = &candidate.sig.source;
    let subject = vec![candidate.canonical_id.clone()];
    let mut cache: BTreeMap<&ObjectId, Vec<Sample>> = BTreeMap::new();
    for m in cat.morphisms() {
        if &m.sig.target == x {
            if !cache.contains_key(&m.sig.source) {
                cache.insert(&m.sig.source, draw(cat, &m.sig.source, sampling)?);
            }
            let samples = &cache[&m.sig.source];
            let lhs = compose(cat, candidate, m)?;
            if let Some(cx) = disagreement(&lhs, Some(m), samples) {
                return Ok(LawReport::fail("identity", subject, sampling, cx));
            }
        }
        if &m.sig.source == x {
            if !cache.contains_key(x) {
                cache.insert(x, draw(cat, x, sampling)?);
            }
            let samples = &cache[x];
            let lhs = compose(cat, m, candidate)?;
            if let Some(cx) = disagreement(&lhs, Some(m), samples) {
                return Ok(LawReport::fail("identity", subject, sampling, cx));
            }
        }
    }
    Ok(LawReport::pass("identity", subject, sampling))
}

fn associativity_with(
    cat: &Category,
    f: &Morphism,
    g: &Morphism,
    h: &Morphism,
    samples: &[Sample],
    sampling: Sampling,
) -> Result<LawReport, LawError> {
    for (inner, outer) in [(h, g), (g, f)] {
        if inner.sig.target != outer.sig.source {
            return Err(CategoryError::InterfaceMismatch {
                output: inner.sig.target.clone(),
                input: outer.sig.source.clone(),
                at: Some(format!("{} . {}", outer.canonical_id, inner.canonical_id)),
            }
            .into());
        }
    }
    let subject = vec![f.canonical_id.clone(), g.canonical_id.clone(), h.canonical_id.clone()];
    let lhs = compose(cat, &compose(cat, f, g)?, h)?;
    let rhs = compose(cat, f, &compose(cat, g, h)?)?;
    if lhs.sig != rhs.sig {
        let detail = format!("{} has signature {} but {} has {}", lhs.canonical_id, lhs.sig, rhs.canonical_id, rhs.sig);
        return Ok(LawReport::fail("associativity", subject, sampling, Counterexample::Structural { detail }));
    }
    Ok(LawReport::from_check("associativity", subject, sampling, disagreement(&lhs, Some(&rhs), samples)))
}

/// `(f · g) · h = f · (g · h)` on samples of `h`'s source.
pub fn check_associativity(
    cat: &Category,
    f: &Morphism,
    g: &Morphism,
    h: &Morphism,
    sampling: Sampling,
) -> Result<LawReport, LawError> {
    let samples = draw(cat, &h.sig.source, sampling)?;
    associativity_with(cat, f, g, h, &samples, sampling)
}

/// Marker for an associativity suite cut off at [`MAX_ASSOCIATIVITY_TRIPLES`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedReport {
    pub checked: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssociativitySuite {
    pub reports: Vec<LawReport>,
    pub truncated: Option<TruncatedReport>,
}

impl AssociativitySuite {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(LawReport::passed)
    }
}

pub fn check_associativity_suite(cat: &Category, sampling: Sampling) -> Result<AssociativitySuite, LawError> {
    check_associativity_suite_capped(cat, sampling, MAX_ASSOCIATIVITY_TRIPLES)
}

/// Runs [`check_associativity`] on every composable `(f, g, h)` of
/// registered morphisms, in canonical_id order, up to `cap` triples.
pub fn check_associativity_suite_capped(
    cat: &Category,
    sampling: Sampling,
    cap: usize,
) -> Result<AssociativitySuite, LawError> {
    let morphisms: Vec<&Morphism> = cat.morphisms().collect();
    let mut triples = Vec::new();
    let mut total = 0usize;
    for f in &morphisms {
        for g in morphisms.iter().filter(|g| g.sig.target == f.sig.source) {
            for h in morphisms.iter().filter(|h| h.sig.target == g.sig.source) {
                total += 1;
                if triples.len() < cap {
                    triples.push((*f, *g, *h));
                }
            }
        }
    }
    let mut samples = BTreeMap::new();
    for (_, _, h) in &triples {
        if !samples.contains_key(&h.sig.source) {
            samples.insert(h.sig.source.clone(), draw(cat, &h.sig.source, sampling)?);
        }
    }
    let reports = triples
        .par_iter()
        .map(|(f, g, h)| associativity_with(cat, f, g, h, &samples[&h.sig.source], sampling))
        .collect::<Result<Vec<_>, _>>()?;
    let truncated = (total > triples.len()).then_some(TruncatedReport { checked: triples.len(), total });
    Ok(AssociativitySuite { reports, truncated })
}

/// The unicity-of-identity argument, run step by step on samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnicityProof {
    pub object: ObjectId,
    /// Identity laws for each candidate.
    pub preconditions: Vec<LawReport>,
    /// `id1 · id2 = id2` (left identity law with `f := id2`).
    pub absorbs_first: LawReport,
    /// `id1 · id2 = id1` (right identity law with `g := id1`).
    pub absorbs_second: LawReport,
    /// `id1 = id2`, compared directly.
    pub conclusion: LawReport,
    pub report: LawReport,
}

pub fn check_identity_unicity(
    cat: &Category,
    id1: &Morphism,
    id2: &Morphism,
    sampling: Sampling,
) -> Result<UnicityProof, LawError> {
    for m in [id1, id2] {
        if !m.sig.is_endo() {
            return Err(LawError::NotEndomorphism(m.canonical_id.clone()));
        }
    }
    if id1.sig.source != id2.sig.source {
        return Err(LawError::ObjectMismatch {
            first: id1.canonical_id.clone(),
            first_object: id1.sig.source.clone(),
            second: id2.canonical_id.clone(),
            second_object: id2.sig.source.clone(),
        });
    }
    let object = id1.sig.source.clone();
    let subject = vec![id1.canonical_id.clone(), id2.canonical_id.clone()];
    let samples = draw(cat, &object, sampling)?;

    let preconditions = vec![check_identity_laws(cat, id1, sampling)?, check_identity_laws(cat, id2, sampling)?];
    let both = compose(cat, id1, id2)?;
    let absorbs_first =
        LawReport::from_check("unicity-step-1", subject.clone(), sampling, disagreement(&both, Some(id2), &samples));
    let absorbs_second =
        LawReport::from_check("unicity-step-2", subject.clone(), sampling, disagreement(&both, Some(id1), &samples));
    let conclusion =
        LawReport::from_check("unicity-conclusion", subject.clone(), sampling, disagreement(id1, Some(id2), &samples));

    let first_failure = preconditions
        .iter()
        .chain([&absorbs_first, &absorbs_second, &conclusion])
        .find_map(|r| r.counterexample.clone());
    let report = LawReport::from_check("identity-unicity", subject, sampling, first_failure);
    Ok(UnicityProof { object, preconditions, absorbs_first, absorbs_second, conclusion, report })
}

/// First registered `g: B -> A` (canonical_id order) with `g · f = id_A`
/// and `f · g = id_B` on samples.
pub fn find_inverse(cat: &Category, f: &Morphism, sampling: Sampling) -> Result<Option<Morphism>, LawError> {
    for part in f.parts() {
        if cat.morphism(part).is_none() {
            return Err(CategoryError::UnknownMorphism(part.clone()).into());
        }
    }
    let (a, b) = (&f.sig.source, &f.sig.target);
    let (id_a, id_b) = (identity_of(cat, a)?, identity_of(cat, b)?);
    let (samples_a, samples_b) = (draw(cat, a, sampling)?, draw(cat, b, sampling)?);
    for g in cat.hom(b, a) {
        let left = compose(cat, g, f)?;
        if disagreement(&left, Some(id_a), &samples_a).is_some() {
            continue;
        }
        let right = compose(cat, f, g)?;
        if disagreement(&right, Some(id_b), &samples_b).is_none() {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

pub fn are_isomorphic(cat: &Category, a: &ObjectId, b: &ObjectId, sampling: Sampling) -> Result<bool, LawError> {
    cat.object(a)?;
    cat.object(b)?;
    for f in cat.hom(a, b) {
        if find_inverse(cat, f, sampling)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NeutralityMode {
    ByConstruction,
    ByFiat,
    ByDiscovery,
}

/// Discovery can only ever produce `AppearsNeutral` or `NotNeutral`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum NeutralityOutcome {
    Neutral,
    AppearsNeutral { samples: usize },
    NotNeutral { counterexample: Box<Counterexample> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeutralityVerdict {
    pub mode: NeutralityMode,
    pub outcome: NeutralityOutcome,
}

impl NeutralityVerdict {
    pub fn is_neutral_evidence(&self) -> bool {
        !matches!(self.outcome, NeutralityOutcome::NotNeutral { .. })
    }
}

impl fmt::Display for NeutralityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MODE {:?} OUTCOME ", self.mode)?;
        match &self.outcome {
            NeutralityOutcome::Neutral => f.write_str("Neutral"),
            NeutralityOutcome::AppearsNeutral { samples } => write!(f, "AppearsNeutral({samples})"),
            NeutralityOutcome::NotNeutral { counterexample } => {
                f.write_str("NotNeutral")?;
                if let Counterexample::Behavioral { sample_seed, input, actual, .. } = counterexample.as_ref() {
                    write!(f, "\n  SAMPLE_SEED {sample_seed:#x}\n  INPUT {input}\n  OUTPUT {actual}")?;
                }
                Ok(())
            }
        }
    }
}

/// How we know whether `m` does nothing: its construction, an external
/// guarantee, or by feeding it samples and comparing output to input.
/// Virtual morphisms count as neutral by construction.
pub fn neutrality(cat: &Category, m: &Morphism, sampling: Sampling) -> Result<NeutralityVerdict, LawError> {
    if m.has_flag(Flag::NeutralByConstruction) || m.has_flag(Flag::Virtual) {
        return Ok(NeutralityVerdict { mode: NeutralityMode::ByConstruction, outcome: NeutralityOutcome::Neutral });
    }
    if m.has_flag(Flag::NeutralByFiat) {
        return Ok(NeutralityVerdict { mode: NeutralityMode::ByFiat, outcome: NeutralityOutcome::Neutral });
    }
    let samples = draw(cat, &m.sig.source, sampling)?;
    let outcome = match disagreement(m, None, &samples) {
        Some(cx) => NeutralityOutcome::NotNeutral { counterexample: Box::new(cx) },
        None => NeutralityOutcome::AppearsNeutral { samples: samples.len() },
    };
    Ok(NeutralityVerdict { mode: NeutralityMode::ByDiscovery, outcome })
}

/// Whether every sampled output of `m` is also a valid input, i.e. `m` can
/// be treated as an endomorphism on its source.
pub fn infer_endo(cat: &Category, m: &Morphism, sampling: Sampling) -> Result<bool, LawError> {
    let source = cat.object(&m.sig.source)?;
    Ok(draw(cat, &m.sig.source, sampling)?
        .iter()
        .all(|s| m.apply(&s.payload).is_ok_and(|out| source.validate(&out))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::pipes;
    use crate::kernel::{ArrowSignature, Behavior};

    fn small() -> Sampling {
        Sampling::new(30, 11)
    }

    #[test]
    fn report_line_format() {
        let r = LawReport::pass("identity", vec!["pass_through".into()], Sampling::default());
        assert_eq!(r.to_string(), "LAW identity SUBJECT pass_through VERDICT Pass SAMPLES 100 SEED 0xc47");
    }

    #[test]
    fn not_endomorphism_is_an_error() {
        let cat = crate::instances::compilers::compilers();
        let m = cat.morphism("arith_to_stack").unwrap();
        assert_eq!(check_identity_laws(&cat, m, small()), Err(LawError::NotEndomorphism("arith_to_stack".into())));
    }

    #[test]
    fn unicity_rejects_different_objects() {
        let cat = crate::instances::compilers::compilers();
        let a = cat.morphism("cpp_like").unwrap();
        let s = cat.morphism("id_Stack").unwrap();
        assert!(matches!(check_identity_unicity(&cat, a, s, small()), Err(LawError::ObjectMismatch { .. })));
    }

    #[test]
    fn single_endomorphism_has_one_triple() {
        let mut cat = Category::new("one");
        cat.add_object(pipes::text_stream()).unwrap();
        cat.add_morphism(Morphism::new("e", ArrowSignature::new("TextStream", "TextStream"), pipes::swap_case()))
            .unwrap();
        let suite = check_associativity_suite(&cat, small()).unwrap();
        assert_eq!(suite.reports.len(), 1);
        assert_eq!(suite.reports[0].subject, ["e", "e", "e"]);
        assert!(suite.all_pass());
    }

    #[test]
    fn suite_truncates_with_marker() {
        let cat = pipes::pipes();
        let suite = check_associativity_suite_capped(&cat, Sampling::new(2, 1), 10).unwrap();
        assert_eq!(suite.reports.len(), 10);
        assert_eq!(suite.truncated, Some(TruncatedReport { checked: 10, total: 125 }));
    }

    #[test]
    fn associativity_rejects_broken_chain() {
        let cat = crate::instances::compilers::compilers();
        let a2s = cat.morphism("arith_to_stack").unwrap();
        let fold = cat.morphism("constant_fold").unwrap();
        let err = check_associativity(&cat, fold, a2s, fold, small()).unwrap_err();
        assert!(matches!(err, LawError::Category(CategoryError::InterfaceMismatch { .. })));
    }

    #[test]
    fn fiat_flag_skips_evaluation() {
        let mut cat = Category::new("fiat");
        cat.add_object(pipes::text_stream()).unwrap();
        let liar = Behavior::new("panics", |_| panic!("must not be evaluated"));
        cat.add_morphism(
            Morphism::new("manpage", ArrowSignature::new("TextStream", "TextStream"), liar).with_flag(Flag::NeutralByFiat),
        )
        .unwrap();
        let v = neutrality(&cat, cat.morphism("manpage").unwrap(), small()).unwrap();
        assert_eq!(v, NeutralityVerdict { mode: NeutralityMode::ByFiat, outcome: NeutralityOutcome::Neutral });
    }

    #[test]
    fn zero_samples_appear_neutral_vacuously() {
        let cat = pipes::pipes();
        let v = neutrality(&cat, cat.morphism("tr_x_y").unwrap(), Sampling::new(0, 1)).unwrap();
        assert_eq!(v.outcome, NeutralityOutcome::AppearsNeutral { samples: 0 });
    }
}
