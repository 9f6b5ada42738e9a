mod common;

use std::sync::Arc;

use scratchcat::instances::{builtin_category, circuits, compilers, pipes};
use scratchcat::kernel::{check_category, Violation};
use scratchcat::laws::disagreement;
use scratchcat::{
    compose, eval_expr, identity_of, ArrowSignature, Behavior, Category, CategoryError, CompositionExpr, Flag,
    Morphism, Object, ObjectId, Payload, Sampling,
};

fn text_object(name: &str) -> Object {
    Object::new(name, Arc::new(pipes::TextStreamDomain))
}

/// A C / Assembly / MachineCode toolchain with opaque text behaviors.
fn toolchain() -> Category {
    let mut cat = Category::new("toolchain");
    for o in ["C", "Assembly", "MachineCode"] {
        cat.add_object(text_object(o)).unwrap();
    }
    let tag = |t: &'static str| Behavior::new(t, move |p| Ok(Payload::bytes([p.as_bytes().unwrap(), t.as_bytes()].concat())));
    cat.add_morphism(Morphism::new("c_to_asm", ArrowSignature::new("C", "Assembly"), tag("asm"))).unwrap();
    cat.add_morphism(Morphism::new("asm_to_code", ArrowSignature::new("Assembly", "MachineCode"), tag("code"))).unwrap();
    cat.add_morphism(Morphism::new("c_to_c_opt", ArrowSignature::new("C", "C"), tag("opt"))).unwrap();
    cat
}

#[test]
fn composing_compilers_chains_signatures() {
    let cat = toolchain();
    let m = compose(&cat, cat.morphism("asm_to_code").unwrap(), cat.morphism("c_to_asm").unwrap()).unwrap();
    assert_eq!(m.sig, ArrowSignature::new("C", "MachineCode"));
    assert_eq!(m.canonical_id, "(asm_to_code∘c_to_asm)");
    assert_eq!(m.apply(&Payload::bytes("x")).unwrap(), Payload::bytes("xasmcode"));
}

#[test]
fn mismatched_composition_names_both_objects() {
    let cat = toolchain();
    let expr = CompositionExpr::parse("asm_to_code . c_to_c_opt").unwrap();
    let err = eval_expr(&cat, &expr).unwrap_err();
    assert_eq!(
        err,
        CategoryError::InterfaceMismatch {
            output: ObjectId::new("C"),
            input: ObjectId::new("Assembly"),
            at: Some("asm_to_code . c_to_c_opt".into()),
        }
    );
    assert!(err.to_string().contains("InterfaceMismatch(C, Assembly)"));
}

#[test]
fn identity_absorbs_on_samples() {
    let cat = pipes::pipes();
    let id = identity_of(&cat, &ObjectId::new(pipes::TEXT_STREAM)).unwrap();
    let f = cat.morphism("grep_v_foo").unwrap();
    let samples = cat.object(&f.sig.source).unwrap().sample(100, 0xC47);
    assert!(disagreement(&compose(&cat, id, f).unwrap(), Some(f), &samples).is_none());
}

#[test]
fn two_filters_in_sequence() {
    let cat = pipes::pipes();
    let m = compose(&cat, cat.morphism("grep_v_bar").unwrap(), cat.morphism("grep_v_foo").unwrap()).unwrap();
    let input = "foo\nbar\nbaz\n";
    let oracle = common::grep_v(&common::grep_v(input, "foo"), "bar");
    assert_eq!(oracle, "baz\n");
    assert_eq!(m.apply(&Payload::bytes(input)).unwrap(), Payload::bytes(oracle));
}

#[test]
fn filters_agree_with_reference_on_samples() {
    let cat = pipes::pipes();
    let f = cat.morphism("grep_v_foo").unwrap();
    for s in cat.object(&f.sig.source).unwrap().sample(100, 7) {
        let text = String::from_utf8(s.payload.as_bytes().unwrap().to_vec()).unwrap();
        assert_eq!(f.apply(&s.payload).unwrap(), Payload::bytes(common::grep_v(&text, "foo")));
    }
}

#[test]
fn expression_evaluation() {
    let cat = pipes::pipes();
    let m = eval_expr(&cat, &CompositionExpr::parse("grep_v_bar . grep_v_foo").unwrap()).unwrap();
    assert_eq!(m.sig, ArrowSignature::new("TextStream", "TextStream"));
    let single = eval_expr(&cat, &CompositionExpr::parse("swap_case").unwrap()).unwrap();
    assert_eq!(single.canonical_id, "swap_case");
    let aliased = eval_expr(&cat, &CompositionExpr::parse(r#""grep -v bar" . cat"#).unwrap()).unwrap();
    assert_eq!(aliased.canonical_id, "(grep_v_bar∘pass_through)");
}

#[test]
fn unknown_names_in_expressions() {
    let cat = pipes::pipes();
    assert_eq!(
        eval_expr(&cat, &CompositionExpr::parse("nope . cat").unwrap()).unwrap_err(),
        CategoryError::UnknownMorphism("nope".into())
    );
}

#[test]
fn designated_identities() {
    let p = pipes::pipes();
    let id = identity_of(&p, &ObjectId::new("TextStream")).unwrap();
    assert_eq!(id.canonical_id, "pass_through");
    assert!(id.aliases.contains("cat") && id.aliases.contains("grep '.*'"));

    let c = circuits::circuits();
    let usb = identity_of(&c, &ObjectId::new("USB")).unwrap();
    assert!(usb.has_flag(Flag::Virtual));

    let k = compilers::compilers();
    let arith = identity_of(&k, &ObjectId::new("Arith")).unwrap();
    assert_eq!(arith.canonical_id, "cpp_like");
    assert!(arith.has_flag(Flag::NeutralByFiat));
}

#[test]
fn builtins_are_well_formed() {
    for name in ["pipes", "compilers", "circuits", "netpipes"] {
        let report = check_category(&builtin_category(name).unwrap(), Sampling::default());
        assert!(report.is_ok(), "{name}: {:?}", report.violations);
    }
}

#[test]
fn dangling_target_is_reported() {
    let mut cat = Category::new("broken");
    cat.add_object(text_object("A")).unwrap();
    cat.add_identity(Morphism::new("id_A", ArrowSignature::new("A", "A"), Behavior::identity())).unwrap();
    cat.add_morphism(Morphism::new("f", ArrowSignature::new("A", "Nowhere"), Behavior::identity())).unwrap();
    let report = check_category(&cat, Sampling::new(10, 1));
    assert!(report.violations.contains(&Violation::DanglingTarget { morphism: "f".into(), object: ObjectId::new("Nowhere") }));
}

#[test]
fn codomain_violation_names_the_sample() {
    let mut cat = compilers::compilers();
    let garbage = Behavior::new("garbage", |_| Ok(Payload::program(compilers::stack_language(), "ADD\n")));
    cat.add_morphism(Morphism::new("bad", ArrowSignature::new("Arith", "Stack"), garbage)).unwrap();
    let report = check_category(&cat, Sampling::new(20, 3));
    let seeds: Vec<u64> = report
        .violations
        .iter()
        .filter_map(|v| match v {
            Violation::CodomainViolation { morphism, sample_seed } if morphism == "bad" => Some(*sample_seed),
            _ => None,
        })
        .collect();
    assert_eq!(seeds.len(), 1);
    let first = cat.object(&ObjectId::new("Arith")).unwrap().sample(20, 3)[0].seed;
    assert_eq!(seeds[0], first);
}

#[test]
fn missing_identity_is_reported() {
    let mut cat = Category::new("bare");
    cat.add_object(text_object("A")).unwrap();
    let report = check_category(&cat, Sampling::new(5, 1));
    assert_eq!(report.violations, vec![Violation::MissingIdentity { object: ObjectId::new("A") }]);
}

#[test]
fn sampling_is_deterministic() {
    let o = pipes::text_stream();
    assert_eq!(o.sample(50, 9), o.sample(50, 9));
    assert_ne!(o.sample(50, 9), o.sample(50, 10));
}
