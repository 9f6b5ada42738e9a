//! Stack: postfix programs, one `\n`-terminated instruction per line
//! (`PUSH <int>`, `ADD`, `MUL`), and their byte encoding as machine code
//! (`0x01` + 8-byte little-endian operand, `0x02`, `0x03`).

use super::arith::Expr;
use super::CompileError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    Push(u64),
    Add,
    Mul,
}

pub const OP_PUSH: u8 = 0x01;
pub const OP_ADD: u8 = 0x02;
pub const OP_MUL: u8 = 0x03;

pub fn lower(expr: &Expr) -> Vec<Instr> {
    fn go(e: &Expr, out: &mut Vec<Instr>) {
        match e {
            Expr::Int(n) => out.push(Instr::Push(*n)),
            Expr::Add(a, b) => {
                go(a, out);
                go(b, out);
                out.push(Instr::Add);
            }
            Expr::Mul(a, b) => {
                go(a, out);
                go(b, out);
                out.push(Instr::Mul);
            }
        }
    }
    let mut out = Vec::new();
    go(expr, &mut out);
    out
}

pub fn to_text(program: &[Instr]) -> String {
    let mut out = String::new();
    for i in program {
        match i {
            Instr::Push(n) => out.push_str(&format!("PUSH {n}\n")),
            Instr::Add => out.push_str("ADD\n"),
            Instr::Mul => out.push_str("MUL\n"),
        }
    }
    out
}

pub fn parse_text(code: &[u8]) -> Result<Vec<Instr>, CompileError> {
    let text = std::str::from_utf8(code).map_err(|e| CompileError::Parse {
        offset: e.valid_up_to(),
        message: "stack programs are ASCII text".to_string(),
    })?;
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut offset = 0;
    let mut program = Vec::new();
    if body.is_empty() {
        return Ok(program);
    }
    for line in body.split('\n') {
        let instr = match line {
            "ADD" => Instr::Add,
            "MUL" => Instr::Mul,
            _ => line
                .strip_prefix("PUSH ")
                .filter(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|n| n.parse().ok())
                .map(Instr::Push)
                .ok_or_else(|| CompileError::Parse {
                    offset,
                    message: format!("invalid instruction {line:?}"),
                })?,
        };
        program.push(instr);
        offset += line.len() + 1;
    }
    Ok(program)
}

pub fn encode(program: &[Instr]) -> Vec<u8> {
    let mut out = Vec::new();
    for i in program {
        match i {
            Instr::Push(n) => {
                out.push(OP_PUSH);
                out.extend_from_slice(&n.to_le_bytes());
            }
            Instr::Add => out.push(OP_ADD),
            Instr::Mul => out.push(OP_MUL),
        }
    }
    out
}

pub fn decode(code: &[u8]) -> Result<Vec<Instr>, CompileError> {
    let mut program = Vec::new();
    let mut pos = 0;
    while pos < code.len() {
        match code[pos] {
            OP_PUSH => {
                let operand = code.get(pos + 1..pos + 9).ok_or(CompileError::Decode {
                    offset: pos,
                    message: "truncated PUSH operand".to_string(),
                })?;
                program.push(Instr::Push(u64::from_le_bytes(operand.try_into().expect("8 bytes"))));
                pos += 9;
            }
            OP_ADD => {
                program.push(Instr::Add);
                pos += 1;
            }
            OP_MUL => {
                program.push(Instr::Mul);
                pos += 1;
            }
            other => {
                return Err(CompileError::Decode {
                    offset: pos,
                    message: format!("unknown opcode {other:#04x}"),
                })
            }
        }
    }
    Ok(program)
}

/// Runs a program; it must leave exactly one value on the stack.
pub fn run(program: &[Instr]) -> Result<u64, CompileError> {
    let mut stack = Vec::new();
    for (index, i) in program.iter().enumerate() {
        match i {
            Instr::Push(n) => stack.push(*n),
            Instr::Add | Instr::Mul => {
                let (Some(b), Some(a)) = (stack.pop(), stack.pop()) else {
                    return Err(CompileError::StackUnderflow { instruction: index });
                };
                stack.push(if *i == Instr::Add { a.wrapping_add(b) } else { a.wrapping_mul(b) });
            }
        }
    }
    match stack.as_slice() {
        [v] => Ok(*v),
        _ => Err(CompileError::NonSingletonResult { depth: stack.len() }),
    }
}

pub fn execute_stack(code: &[u8]) -> Result<u64, CompileError> {
    run(&parse_text(code)?)
}

pub fn execute_machinecode(code: &[u8]) -> Result<u64, CompileError> {
    run(&decode(code)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::compilers::arith;

    #[test]
    fn executes_postfix() {
        assert_eq!(execute_stack(b"PUSH 2\nPUSH 3\nMUL\nPUSH 1\nADD\n").unwrap(), 7);
        assert_eq!(execute_stack(b"PUSH 5\n").unwrap(), 5);
        assert_eq!(execute_stack(b"PUSH 2\nPUSH 3\nMUL\nPUSH 1\nADD").unwrap(), 7);
        assert_eq!(execute_stack(b"PUSH 5").unwrap(), 5);
    }

    #[test]
    fn underflow_and_leftovers() {
        assert_eq!(execute_stack(b"ADD\n"), Err(CompileError::StackUnderflow { instruction: 0 }));
        assert_eq!(
            execute_stack(b"PUSH 1\nPUSH 2\n"),
            Err(CompileError::NonSingletonResult { depth: 2 })
        );
        assert_eq!(execute_stack(b"\n"), Err(CompileError::NonSingletonResult { depth: 0 }));
    }

    #[test]
    fn text_syntax_is_strict() {
        for bad in ["PUSH 5\n\n", "PUSH  5\n", "push 5\n", "PUSH -1\n", "PUSH\n", "ADD \n", "PUSH 1\n\nADD\n"] {
            assert!(parse_text(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn machine_code_layout() {
        let code = encode(&[Instr::Push(258), Instr::Add, Instr::Mul]);
        assert_eq!(code, [0x01, 0x02, 0x01, 0, 0, 0, 0, 0, 0, 0x02, 0x03]);
        assert_eq!(decode(&code).unwrap(), [Instr::Push(258), Instr::Add, Instr::Mul]);
        assert!(decode(&[0x01, 0x00]).is_err());
        assert!(decode(&[0x04]).is_err());
    }

    #[test]
    fn lowering_matches_interpreter() {
        let e = arith::parse(b"(1+2)*3+4").unwrap();
        let text = to_text(&lower(&e));
        assert_eq!(text, "PUSH 1\nPUSH 2\nADD\nPUSH 3\nMUL\nPUSH 4\nADD\n");
        assert_eq!(execute_stack(text.as_bytes()).unwrap(), 13);
    }
}
