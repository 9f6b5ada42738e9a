//! Reference implementations written independently of the crate, used as
//! test oracles.
#![allow(dead_code)]

/// `grep -v pattern`: keep lines (with their terminators) that do not
/// contain `pattern`.
pub fn grep_v(text: &str, pattern: &str) -> String {
    text.split_inclusive('\n').filter(|l| !l.contains(pattern)).collect()
}

/// Wrapping u64 evaluation of `+`, `*`, parentheses and decimal literals by
/// precedence climbing over a token list.
pub fn eval_arith(src: &str) -> u64 {
    let tokens: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let v = sum(&tokens, &mut pos);
    assert_eq!(pos, tokens.len(), "trailing input in {src:?}");
    v
}

fn sum(t: &[char], pos: &mut usize) -> u64 {
    let mut acc = product(t, pos);
    while t.get(*pos) == Some(&'+') {
        *pos += 1;
        acc = acc.wrapping_add(product(t, pos));
    }
    acc
}

fn product(t: &[char], pos: &mut usize) -> u64 {
    let mut acc = atom(t, pos);
    while t.get(*pos) == Some(&'*') {
        *pos += 1;
        acc = acc.wrapping_mul(atom(t, pos));
    }
    acc
}

fn atom(t: &[char], pos: &mut usize) -> u64 {
    if t[*pos] == '(' {
        *pos += 1;
        let v = sum(t, pos);
        assert_eq!(t[*pos], ')');
        *pos += 1;
        return v;
    }
    let start = *pos;
    while t.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    t[start..*pos].iter().collect::<String>().parse().unwrap()
}

/// Runs postfix stack text without using the crate's parser.
pub fn run_stack_text(text: &str) -> Option<u64> {
    let mut stack: Vec<u64> = Vec::new();
    for line in text.lines() {
        match line.split_once(' ') {
            Some(("PUSH", n)) => stack.push(n.parse().ok()?),
            None if line == "ADD" || line == "MUL" => {
                let (b, a) = (stack.pop()?, stack.pop()?);
                stack.push(if line == "ADD" { a.wrapping_add(b) } else { a.wrapping_mul(b) });
            }
            _ => return None,
        }
    }
    (stack.len() == 1).then(|| stack[0])
}

/// Decodes `[op][u64 le]?` machine code and runs it.
pub fn run_machine_code(code: &[u8]) -> Option<u64> {
    let mut stack: Vec<u64> = Vec::new();
    let mut i = 0;
    while i < code.len() {
        match code[i] {
            0x01 => {
                let bytes: [u8; 8] = code.get(i + 1..i + 9)?.try_into().ok()?;
                stack.push(u64::from_le_bytes(bytes));
                i += 9;
            }
            op @ (0x02 | 0x03) => {
                let (b, a) = (stack.pop()?, stack.pop()?);
                stack.push(if op == 0x02 { a.wrapping_add(b) } else { a.wrapping_mul(b) });
                i += 1;
            }
            _ => return None,
        }
    }
    (stack.len() == 1).then(|| stack[0])
}

pub fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
}
