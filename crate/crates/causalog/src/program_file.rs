//! Simulation program files.
//!
//! ```text
//! signature
//!   X: 0, 1
//!   Y: 0, 1
//! bits 1
//! program
//!   READBIT r1
//!   WRITE X <- r1
//!   WRITE Y <- X
//! ```
//!
//! A write's right-hand side is a value of the target, a register `rN`, a
//! variable, or `table(in1, in2: v v v v)` listing the target's values for
//! every combination of the inputs, first input most significant.
//! Variable names take precedence over register names and values.

use causalog_core::signature::Signature;
use causalog_core::simprog::{Expr, Instr, Operand, SimProgram};

use crate::error::{at_line, format_err, Result};
use crate::text::{lines, section, signature_block, write_signature};

fn register(tok: &str) -> Option<usize> {
    tok.strip_prefix('r')?.parse::<usize>().ok().filter(|&n| n >= 1).map(|n| n - 1)
}

fn operand(sig: &Signature, tok: &str) -> Option<Operand> {
    sig.index_of(tok).map(Operand::Var).or_else(|| register(tok).map(Operand::Reg))
}

fn expr(no: usize, sig: &Signature, var: usize, text: &str) -> Result<Expr> {
    let text = text.trim();
    if let Some(body) = text.strip_prefix("table(").and_then(|s| s.strip_suffix(')')) {
        let (ins, vals) = body.split_once(':').ok_or_else(|| format_err(no, "expected `table(inputs: values)`"))?;
        let inputs = ins
            .split(',')
            .map(str::trim)
            .map(|t| operand(sig, t).ok_or_else(|| format_err(no, format!("`{t}` is neither a variable nor a register"))))
            .collect::<Result<Vec<_>>>()?;
        let values = vals
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|t| sig.value_index(var, t).ok_or_else(|| format_err(no, format!("`{t}` is not a value of `{}`", sig.name(var)))))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Expr::Table { inputs, values });
    }
    if let Some(op) = operand(sig, text) {
        return Ok(Expr::Read(op));
    }
    sig.value_index(var, text)
        .map(Expr::Value)
        .ok_or_else(|| format_err(no, format!("`{text}` is not a value of `{}`, a variable or a register", sig.name(var))))
}

pub fn parse_program(src: &str) -> Result<SimProgram> {
    let mut sig_lines = Vec::new();
    let mut body = Vec::new();
    let mut bits = None;
    let mut current = None;
    for l in lines(src) {
        if let Some(rest) = l.text.strip_prefix("bits") {
            let n: u32 = rest.trim().parse().map_err(|_| format_err(l.no, "expected `bits N`"))?;
            bits = Some(n);
            continue;
        }
        if let Some(name) = section(l.text, &["signature", "program"]) {
            current = Some(name);
            continue;
        }
        match current {
            Some("signature") => sig_lines.push(l),
            Some(_) => body.push(l),
            None => return Err(format_err(l.no, "expected a section header")),
        }
    }
    let sig = signature_block(&sig_lines)?;
    let mut instrs = Vec::with_capacity(body.len());
    for l in &body {
        let words: Vec<&str> = l.text.split_whitespace().collect();
        let instr = match words.as_slice() {
            ["READBIT", r] => Instr::ReadBit(register(r).ok_or_else(|| format_err(l.no, format!("`{r}` is not a register")))?),
            ["IF", r, "GOTO", off] => Instr::IfGoto {
                reg: register(r).ok_or_else(|| format_err(l.no, format!("`{r}` is not a register")))?,
                offset: off.strip_prefix('+').and_then(|s| s.parse().ok()).ok_or_else(|| format_err(l.no, "expected `+n`"))?,
            },
            ["WRITE", ..] => {
                let rest = l.text["WRITE".len()..].trim();
                let (target, rhs) = rest.split_once("<-").ok_or_else(|| format_err(l.no, "expected `WRITE X <- expr`"))?;
                let target = target.trim();
                let var = sig.index_of(target).ok_or_else(|| format_err(l.no, format!("unknown variable `{target}`")))?;
                Instr::Write { var, expr: expr(l.no, &sig, var, rhs)? }
            }
            _ => return Err(format_err(l.no, format!("unknown instruction `{}`", l.text))),
        };
        instrs.push(instr);
    }
    let bits = bits.ok_or_else(|| format_err(0, "missing `bits N` header"))?;
    at_line(body.first().map_or(0, |l| l.no), SimProgram::new(sig, bits, instrs))
}

fn write_operand(sig: &Signature, op: &Operand) -> String {
    match op {
        Operand::Reg(r) => format!("r{}", r + 1),
        Operand::Var(v) => sig.name(*v).to_string(),
    }
}

pub fn write_program(p: &SimProgram) -> String {
    let sig = p.signature();
    let mut out = String::from("signature\n");
    write_signature(sig, "  ", &mut out);
    out.push_str(&format!("bits {}\nprogram\n", p.bit_bound()));
    for i in p.instructions() {
        let line = match i {
            Instr::ReadBit(r) => format!("READBIT r{}", r + 1),
            Instr::IfGoto { reg, offset } => format!("IF r{} GOTO +{offset}", reg + 1),
            Instr::Write { var, expr } => {
                let rhs = match expr {
                    Expr::Value(x) => sig.domain(*var)[*x].clone(),
                    Expr::Read(op) => write_operand(sig, op),
                    Expr::Table { inputs, values } => {
                        let ins: Vec<String> = inputs.iter().map(|op| write_operand(sig, op)).collect();
                        let vals: Vec<&str> = values.iter().map(|&x| sig.domain(*var)[x].as_str()).collect();
                        format!("table({}: {})", ins.join(", "), vals.join(" "))
                    }
                };
                format!("WRITE {} <- {rhs}", sig.name(*var))
            }
        };
        out.push_str(&format!("  {line}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use causalog_core::fixtures;
    use causalog_core::simprog::{compile_scm, DEFAULT_BIT_CAP};

    #[test]
    fn round_trip() {
        for (_, m) in fixtures::expressivity_models() {
            let c = compile_scm(&m, Some(4), DEFAULT_BIT_CAP).unwrap();
            let text = write_program(&c.program);
            assert_eq!(parse_program(&text).unwrap(), c.program, "{text}");
        }
    }

    #[test]
    fn copy_program() {
        let p = parse_program("signature\n X: 0, 1\n Y: 0, 1\nbits 1\nprogram\n READBIT r1\n WRITE X <- r1\n WRITE Y <- X\n").unwrap();
        assert_eq!(p.run(&[true]).unwrap(), vec![1, 1]);
        assert!(parse_program("signature\n X: 0, 1\nbits 0\nprogram\n READBIT r1\n WRITE X <- r1\n").is_err());
        assert!(parse_program("signature\n X: 0, 1\nbits 1\nprogram\n WRITE X <- 2\n").is_err());
    }
}
