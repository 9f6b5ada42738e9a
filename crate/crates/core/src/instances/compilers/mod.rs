//! Toy compilers: `Arith -> Stack -> MachineCode`, plus a source-to-source
//! constant folder on Arith.
//!
//! Each object's validity predicate is a real parser; Stack and MachineCode
//! additionally require stack discipline (no underflow, one result).

pub mod arith;
pub mod stack;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernel::{
    ArrowSignature, Behavior, BehaviorError, Category, Flag, Language, Morphism, Object, ObjectId,
    Payload, PayloadDomain,
};

pub use stack::{execute_machinecode, execute_stack};

pub const ARITH: &str = "Arith";
pub const STACK: &str = "Stack";
pub const MACHINE_CODE: &str = "MachineCode";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("decode error at offset {offset}: {message}")]
    Decode { offset: usize, message: String },
    #[error("stack underflow at instruction {instruction}")]
    StackUnderflow { instruction: usize },
    #[error("program left {depth} values on the stack")]
    NonSingletonResult { depth: usize },
}

pub fn arith_language() -> Language {
    Language::text(ARITH)
}

pub fn stack_language() -> Language {
    Language::text(STACK)
}

pub fn machine_language() -> Language {
    Language::binary(MACHINE_CODE)
}

pub fn interpret_arith(program: &str) -> Result<u64, CompileError> {
    arith::interpret(program.as_bytes())
}

pub fn constant_fold(program: &str) -> Result<String, CompileError> {
    arith::constant_fold(program.as_bytes())
}

pub fn compile_arith(program: &str) -> Result<String, CompileError> {
    arith::parse(program.as_bytes()).map(|e| stack::to_text(&stack::lower(&e)))
}

pub fn assemble(program: &str) -> Result<Vec<u8>, CompileError> {
    stack::parse_text(program.as_bytes()).map(|p| stack::encode(&p))
}

fn generate_arith(seed: u64) -> String {
    arith::generate(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ArithDomain;

impl PayloadDomain for ArithDomain {
    fn validate(&self, payload: &Payload) -> bool {
        payload.program_code(ARITH).is_some_and(|c| arith::parse(c).is_ok())
    }

    fn sample_one(&self, seed: u64) -> Payload {
        Payload::program(arith_language(), generate_arith(seed))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StackDomain;

impl PayloadDomain for StackDomain {
    fn validate(&self, payload: &Payload) -> bool {
        payload.program_code(STACK).is_some_and(|c| execute_stack(c).is_ok())
    }

    fn sample_one(&self, seed: u64) -> Payload {
        let text = compile_arith(&generate_arith(seed)).expect("generated programs parse");
        Payload::program(stack_language(), text)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MachineCodeDomain;

impl PayloadDomain for MachineCodeDomain {
    fn validate(&self, payload: &Payload) -> bool {
        payload.program_code(MACHINE_CODE).is_some_and(|c| execute_machinecode(c).is_ok())
    }

    fn sample_one(&self, seed: u64) -> Payload {
        let text = compile_arith(&generate_arith(seed)).expect("generated programs parse");
        Payload::program(machine_language(), assemble(&text).expect("compiled programs assemble"))
    }
}

fn pass(
    name: &'static str,
    from: &'static str,
    to: Language,
    f: impl Fn(&[u8]) -> Result<Vec<u8>, CompileError> + Send + Sync + 'static,
) -> Behavior {
    Behavior::new(name, move |p| {
        let code = p
            .program_code(from)
            .ok_or_else(|| BehaviorError(format!("{name}: expected a {from} program")))?;
        f(code)
            .map(|out| Payload::program(to.clone(), out))
            .map_err(|e| BehaviorError(format!("{name}: {e}")))
    })
}

pub fn constant_fold_behavior() -> Behavior {
    pass("constant_fold", ARITH, arith_language(), |c| arith::constant_fold(c).map(String::into_bytes))
}

pub fn arith_to_stack_behavior() -> Behavior {
    pass("arith_to_stack", ARITH, stack_language(), |c| {
        arith::parse(c).map(|e| stack::to_text(&stack::lower(&e)).into_bytes())
    })
}

pub fn stack_to_code_behavior() -> Behavior {
    pass("stack_to_code", STACK, machine_language(), |c| stack::parse_text(c).map(|p| stack::encode(&p)))
}

/// Source-to-source pass that leaves programs untouched.
pub fn cpp_like_behavior() -> Behavior {
    pass("cpp_like", ARITH, arith_language(), |c| arith::parse(c).map(|_| c.to_vec()))
}

/// The compilers category over Arith, Stack and MachineCode.
pub fn compilers() -> Category {
    let mut cat = Category::new("compilers");
    cat.add_object(Object::new(ARITH, Arc::new(ArithDomain))).expect("fresh");
    cat.add_object(Object::new(STACK, Arc::new(StackDomain))).expect("fresh");
    cat.add_object(Object::new(MACHINE_CODE, Arc::new(MachineCodeDomain))).expect("fresh");

    let sig = ArrowSignature::new;
    cat.add_identity(
        Morphism::new("cpp_like", sig(ARITH, ARITH), cpp_like_behavior())
            .with_alias("cpp")
            .with_flag(Flag::NeutralByFiat),
    )
    .expect("fresh");
    for object in [STACK, MACHINE_CODE] {
        let id = ObjectId::new(object);
        cat.add_identity(
            Morphism::new(format!("id_{object}"), sig(object, object), Behavior::identity())
                .with_flag(Flag::NeutralByConstruction),
        )
        .unwrap_or_else(|e| panic!("identity for {id}: {e}"));
    }
    for m in [
        Morphism::new("constant_fold", sig(ARITH, ARITH), constant_fold_behavior()),
        Morphism::new("arith_to_stack", sig(ARITH, STACK), arith_to_stack_behavior()),
        Morphism::new("stack_to_code", sig(STACK, MACHINE_CODE), stack_to_code_behavior()),
    ] {
        cat.add_morphism(m).expect("unique builtin ids");
    }
    cat
}
