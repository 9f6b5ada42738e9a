mod common;

use std::sync::Arc;

use scratchcat::instances::{circuits, compilers, pipes};
use scratchcat::laws::{
    are_isomorphic, check_associativity, check_associativity_suite, check_associativity_suite_capped,
    check_identity_laws, check_identity_unicity, find_inverse, infer_endo, neutrality, replay, Counterexample,
    LawError, NeutralityMode, NeutralityOutcome, Verdict,
};
use scratchcat::{ArrowSignature, Behavior, Category, Flag, Morphism, Object, ObjectId, Payload, Sampling};

const S: Sampling = Sampling { samples: 100, seed: 0xC47 };

fn m<'c>(cat: &'c Category, id: &str) -> &'c Morphism {
    cat.resolve(id).unwrap()
}

fn with_morphism(mut cat: Category, morphism: Morphism) -> Category {
    cat.add_morphism(morphism).unwrap();
    cat
}

fn text(p: &Payload) -> String {
    String::from_utf8(p.as_bytes().unwrap().to_vec()).unwrap()
}

#[test]
fn pass_through_is_an_identity() {
    let cat = pipes::pipes();
    let r = check_identity_laws(&cat, m(&cat, "cat"), S).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!((r.samples_used, r.seed), (100, 0xC47));
}

#[test]
fn filter_is_not_an_identity() {
    let cat = with_morphism(
        pipes::pipes(),
        Morphism::new("drop_foo", ArrowSignature::new("TextStream", "TextStream"), pipes::filter_out("foo")),
    );
    let r = check_identity_laws(&cat, m(&cat, "drop_foo"), S).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let cx = r.counterexample.unwrap();
    let input = text(cx.input().unwrap());
    assert!(input.contains("foo"));
    let (expected, actual) = replay(&cat, &cx).unwrap().unwrap();
    assert_ne!(expected, actual);
    let Counterexample::Behavioral { expected: e, actual: a, .. } = &cx else { panic!("structural") };
    assert_eq!((e, a), (&expected, &actual));
}

#[test]
fn identity_laws_need_an_endomorphism() {
    let cat = compilers::compilers();
    assert_eq!(
        check_identity_laws(&cat, m(&cat, "arith_to_stack"), S).unwrap_err(),
        LawError::NotEndomorphism("arith_to_stack".into())
    );
}

#[test]
fn virtual_identities_pass() {
    let cat = circuits::circuits();
    for (protocol, _) in circuits::PROTOCOLS {
        let id = m(&cat, &format!("id_{protocol}"));
        assert!(id.has_flag(Flag::Virtual));
        assert!(check_identity_laws(&cat, id, S).unwrap().passed(), "{protocol}");
    }
}

#[test]
fn associativity_of_a_pipeline() {
    let cat = pipes::pipes();
    let r = check_associativity(&cat, m(&cat, "grep_v_foo"), m(&cat, "grep_v_bar"), m(&cat, "pass_through"), S).unwrap();
    assert!(r.passed());
    assert_eq!(r.subject, ["grep_v_foo", "grep_v_bar", "pass_through"]);
}

#[test]
fn associativity_of_the_compiler_chain() {
    let cat = compilers::compilers();
    let r = check_associativity(&cat, m(&cat, "stack_to_code"), m(&cat, "arith_to_stack"), m(&cat, "constant_fold"), S)
        .unwrap();
    assert!(r.passed());
    // both groupings, run by hand, agree byte-wise with the oracle machine
    let fold = compilers::constant_fold_behavior();
    let lower = compilers::arith_to_stack_behavior();
    let emit = compilers::stack_to_code_behavior();
    for s in cat.object(&ObjectId::new("Arith")).unwrap().sample(100, 0xC47) {
        let left = emit.after(&lower).after(&fold).apply(&s.payload).unwrap();
        let right = emit.after(&lower.after(&fold)).apply(&s.payload).unwrap();
        assert_eq!(left, right);
        let code = left.program_code(compilers::MACHINE_CODE).unwrap();
        let src = std::str::from_utf8(s.payload.program_code(compilers::ARITH).unwrap()).unwrap();
        assert_eq!(common::run_machine_code(code), Some(common::eval_arith(src)));
    }
}

#[test]
fn associativity_rejects_non_composable_triples() {
    let cat = compilers::compilers();
    assert!(check_associativity(&cat, m(&cat, "arith_to_stack"), m(&cat, "stack_to_code"), m(&cat, "cpp_like"), S).is_err());
}

#[test]
fn associativity_suite_sizes() {
    let pipes = check_associativity_suite(&pipes::pipes(), S).unwrap();
    assert_eq!(pipes.reports.len(), 125);
    assert!(pipes.all_pass() && pipes.truncated.is_none());

    assert!(check_associativity_suite(&Category::new("empty"), S).unwrap().reports.is_empty());

    let mut single = Category::new("single");
    single.add_object(pipes::text_stream()).unwrap();
    single.add_morphism(Morphism::new("e", ArrowSignature::new("TextStream", "TextStream"), pipes::swap_case())).unwrap();
    let r = check_associativity_suite(&single, S).unwrap();
    assert_eq!(r.reports.len(), 1);
    assert_eq!(r.reports[0].subject, ["e", "e", "e"]);
}

#[test]
fn capped_suite_reports_truncation() {
    let suite = check_associativity_suite_capped(&pipes::pipes(), S, 10).unwrap();
    assert_eq!(suite.reports.len(), 10);
    let t = suite.truncated.unwrap();
    assert_eq!((t.checked, t.total), (10, 125));
}

#[test]
fn suite_is_order_stable() {
    let a = check_associativity_suite(&compilers::compilers(), S).unwrap();
    let b = check_associativity_suite(&compilers::compilers(), S).unwrap();
    assert_eq!(a, b);
}

fn with_second_pass_through() -> Category {
    with_morphism(
        pipes::pipes(),
        Morphism::new("pass_through_2", ArrowSignature::new("TextStream", "TextStream"), Behavior::new("cat2", |p| Ok(p.clone()))),
    )
}

#[test]
fn unicity_of_two_pass_throughs() {
    let cat = with_second_pass_through();
    let proof = check_identity_unicity(&cat, m(&cat, "cat"), m(&cat, "pass_through_2"), S).unwrap();
    assert!(proof.absorbs_first.passed());
    assert!(proof.absorbs_second.passed());
    assert!(proof.conclusion.passed());
    assert!(proof.report.passed());
    assert_eq!(proof.object, ObjectId::new("TextStream"));
}

#[test]
fn unicity_is_reflexive() {
    let cat = pipes::pipes();
    assert!(check_identity_unicity(&cat, m(&cat, "cat"), m(&cat, "cat"), S).unwrap().report.passed());
}

#[test]
fn unicity_fails_at_the_precondition() {
    let cat = with_morphism(
        pipes::pipes(),
        Morphism::new("drop_x", ArrowSignature::new("TextStream", "TextStream"), pipes::filter_out("x")),
    );
    let proof = check_identity_unicity(&cat, m(&cat, "cat"), m(&cat, "drop_x"), S).unwrap();
    assert!(proof.preconditions[0].passed());
    assert!(!proof.preconditions[1].passed());
    let cx = proof.report.counterexample.unwrap();
    assert!(text(cx.input().unwrap()).contains('x'));
}

#[test]
fn unicity_needs_a_shared_object() {
    let cat = compilers::compilers();
    assert!(matches!(
        check_identity_unicity(&cat, m(&cat, "cpp_like"), m(&cat, "id_Stack"), S),
        Err(LawError::ObjectMismatch { .. })
    ));
}

#[test]
fn swap_case_is_its_own_inverse() {
    let cat = pipes::pipes();
    assert_eq!(find_inverse(&cat, m(&cat, "swap_case"), S).unwrap().unwrap().canonical_id, "swap_case");
    assert_eq!(find_inverse(&cat, m(&cat, "cat"), S).unwrap().unwrap().canonical_id, "pass_through");
    assert!(find_inverse(&cat, m(&cat, "grep_v_foo"), S).unwrap().is_none());
}

#[test]
fn isomorphic_objects() {
    let cat = pipes::pipes();
    let t = ObjectId::new("TextStream");
    assert!(are_isomorphic(&cat, &t, &t, S).unwrap());

    let k = compilers::compilers();
    assert!(!are_isomorphic(&k, &ObjectId::new("Arith"), &ObjectId::new("MachineCode"), S).unwrap());

    let mut c = circuits::circuits();
    let (usb, rs232) = (ObjectId::new("USB"), ObjectId::new("RS232"));
    assert!(!are_isomorphic(&c, &usb, &rs232, S).unwrap());
    c.add_morphism(circuits::rs232_to_usb()).unwrap();
    assert!(are_isomorphic(&c, &usb, &rs232, S).unwrap());
}

#[test]
fn usb_round_trip_matches_affine_oracle() {
    let c = with_morphism(circuits::circuits(), circuits::rs232_to_usb());
    let there = m(&c, "usb_to_rs232");
    let back = m(&c, "rs232_to_usb");
    for s in c.object(&ObjectId::new("USB")).unwrap().sample(100, 0xC47) {
        let x = s.payload.signal_samples("USB").unwrap();
        let mid = there.apply(&s.payload).unwrap();
        let negated: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(common::close(mid.signal_samples("RS232").unwrap(), &negated, 1e-12));
        let out = back.apply(&mid).unwrap();
        assert!(common::close(out.signal_samples("USB").unwrap(), x, 1e-12));
    }
}

#[test]
fn discovered_neutrality() {
    let cat = with_morphism(
        pipes::pipes(),
        Morphism::new("xxx", ArrowSignature::new("TextStream", "TextStream"), Behavior::new("xxx", |p| Ok(p.clone()))),
    );
    let v = neutrality(&cat, m(&cat, "xxx"), S).unwrap();
    assert_eq!(v.mode, NeutralityMode::ByDiscovery);
    assert_eq!(v.outcome, NeutralityOutcome::AppearsNeutral { samples: 100 });
}

#[test]
fn fiat_neutrality_runs_nothing() {
    let panics = Behavior::new("never", |_| panic!("evaluated"));
    let cat = with_morphism(
        pipes::pipes(),
        Morphism::new("manual", ArrowSignature::new("TextStream", "TextStream"), panics).with_flag(Flag::NeutralByFiat),
    );
    let v = neutrality(&cat, m(&cat, "manual"), S).unwrap();
    assert_eq!((v.mode, v.outcome), (NeutralityMode::ByFiat, NeutralityOutcome::Neutral));
}

#[test]
fn translate_is_not_neutral() {
    let cat = pipes::pipes();
    let v = neutrality(&cat, m(&cat, "tr x y"), S).unwrap();
    let NeutralityOutcome::NotNeutral { counterexample } = v.outcome else { panic!("{v}") };
    let input = text(counterexample.input().unwrap());
    assert!(input.contains('x'));
    let (original, out) = replay(&cat, &counterexample).unwrap().unwrap();
    assert_ne!(out, original);
}

#[test]
fn endomorphism_inference() {
    let k = compilers::compilers();
    assert!(infer_endo(&k, m(&k, "constant_fold"), S).unwrap());
    assert!(!infer_endo(&k, m(&k, "arith_to_stack"), S).unwrap());

    // a pass-through declared into an overly broad target
    let mut cat = Category::new("broad");
    cat.add_object(pipes::text_stream()).unwrap();
    cat.add_object(Object::new("Anything", Arc::new(pipes::TextStreamDomain))).unwrap();
    cat.add_morphism(Morphism::new("p", ArrowSignature::new("TextStream", "Anything"), Behavior::identity())).unwrap();
    assert!(infer_endo(&cat, m(&cat, "p"), S).unwrap());
}
