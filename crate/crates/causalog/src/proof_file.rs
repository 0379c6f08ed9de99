//! Proof files.
//!
//! ```text
//! signature
//!   X: 0, 1
//!   Y: 0, 1
//! system AX2
//! assumptions
//!   a1. P(X=1) == P(Y=1)
//! proof
//!   1. P(X=1 & Y=1) + P(X=1 & ~Y=1) == P(X=1) ; Add
//!   2. P(X=1 & Y=1) + P(X=1 & Y=0) == P(X=1) ; DistStep 1 : X=1 & ~Y=1 => X=1 & Y=0
//!   3. P(X=1 & Y=1) + P(X=1 & Y=0) == P(Y=1) ; Subst 2 a1
//! ```
//!
//! Justifications are a schema name, `Assumption k`, `MP i j` (the second
//! reference is the implication), `PolyNorm i ...`, `Subst i j` (the
//! second reference is the equation) or `DistStep i : e => e'`. A
//! reference `k` is a line and `ak` an assumption. The signature section
//! is optional.

use causalog_core::axioms::{Justification, ProofLine, Ref, Schema, System};
use causalog_core::formula::{parse_event, parse_formula, Formula};
use causalog_core::signature::Signature;

use crate::error::{at_line, format_err, Result};
use crate::text::{lines, section, signature_block, write_signature, Line};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofFile {
    pub signature: Option<Signature>,
    pub system: System,
    pub assumptions: Vec<Formula>,
    pub lines: Vec<ProofLine>,
}

fn numbered<'a>(l: Line<'a>, prefix: &str, expected: usize) -> Result<&'a str> {
    let (num, rest) = l.text.split_once('.').ok_or_else(|| format_err(l.no, format!("expected `{prefix}{expected}. ...`")))?;
    if num.trim() != format!("{prefix}{expected}") {
        return Err(format_err(l.no, format!("expected number {prefix}{expected}, found `{}`", num.trim())));
    }
    Ok(rest.trim())
}

fn reference(no: usize, tok: &str) -> Result<Ref> {
    let bad = || format_err(no, format!("`{tok}` is not a reference"));
    match tok.strip_prefix('a') {
        Some(n) => n.parse().map(Ref::Assumption).map_err(|_| bad()),
        None => tok.parse().map(Ref::Line).map_err(|_| bad()),
    }
}

fn justification(no: usize, text: &str, sig: Option<&Signature>) -> Result<Justification> {
    let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let refs = |s: &str| -> Result<Vec<Ref>> { s.split_whitespace().map(|t| reference(no, t)).collect() };
    let exactly = |s: &str, n: usize| -> Result<Vec<Ref>> {
        let r = refs(s)?;
        if r.len() != n {
            return Err(format_err(no, format!("`{head}` takes {n} references")));
        }
        Ok(r)
    };
    Ok(match head.to_ascii_lowercase().as_str() {
        "assumption" => Justification::Assumption(rest.trim().parse().map_err(|_| format_err(no, "expected an assumption number"))?),
        "mp" => {
            let r = exactly(rest, 2)?;
            Justification::MP(r[0], r[1])
        }
        "polynorm" => Justification::PolyNorm(refs(rest)?),
        "subst" => {
            let r = exactly(rest, 2)?;
            Justification::Subst(r[0], r[1])
        }
        "diststep" => {
            let (r, events) = rest.split_once(':').ok_or_else(|| format_err(no, "expected `DistStep i : e => e'`"))?;
            let (from, to) = events.split_once("=>").ok_or_else(|| format_err(no, "expected `e => e'`"))?;
            let r = exactly(r, 1)?;
            Justification::DistStep(r[0], at_line(no, parse_event(from.trim(), sig))?, at_line(no, parse_event(to.trim(), sig))?)
        }
        _ => match Schema::from_name(head) {
            Some(s) if rest.trim().is_empty() => Justification::Axiom(s),
            _ => return Err(format_err(no, format!("unknown justification `{text}`"))),
        },
    })
}

pub fn parse_proof(src: &str) -> Result<ProofFile> {
    let mut sig_lines = Vec::new();
    let mut assumption_lines = Vec::new();
    let mut proof_lines = Vec::new();
    let mut system = System::Ax3;
    let mut current = None;
    for l in lines(src) {
        if let Some(rest) = l.text.strip_prefix("system") {
            system = System::from_name(rest.trim()).ok_or_else(|| format_err(l.no, format!("unknown system `{}`", rest.trim())))?;
            continue;
        }
        if let Some(name) = section(l.text, &["signature", "assumptions", "proof"]) {
            current = Some(name);
            continue;
        }
        match current {
            Some("signature") => sig_lines.push(l),
            Some("assumptions") => assumption_lines.push(l),
            Some(_) => proof_lines.push(l),
            None => return Err(format_err(l.no, "expected a section header")),
        }
    }
    let signature = if sig_lines.is_empty() { None } else { Some(signature_block(&sig_lines)?) };
    let sig = signature.as_ref();
    let assumptions = assumption_lines
        .iter()
        .enumerate()
        .map(|(i, l)| at_line(l.no, parse_formula(numbered(*l, "a", i + 1)?, sig)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(proof_lines.len());
    for (i, l) in proof_lines.iter().enumerate() {
        let body = numbered(*l, "", i + 1)?;
        let (formula, just) = body.split_once(';').ok_or_else(|| format_err(l.no, "expected `formula ; justification`"))?;
        out.push(ProofLine { formula: at_line(l.no, parse_formula(formula.trim(), sig))?, justification: justification(l.no, just.trim(), sig)? });
    }
    Ok(ProofFile { signature, system, assumptions, lines: out })
}

fn write_justification(j: &Justification) -> String {
    let refs = |rs: &[Ref]| rs.iter().map(|r| format!(" {r}")).collect::<String>();
    match j {
        Justification::Axiom(s) => s.name().to_string(),
        Justification::Assumption(k) => format!("Assumption {k}"),
        Justification::MP(a, b) => format!("MP {a} {b}"),
        Justification::PolyNorm(rs) => format!("PolyNorm{}", refs(rs)),
        Justification::Subst(a, b) => format!("Subst {a} {b}"),
        Justification::DistStep(r, from, to) => format!("DistStep {r} : {from} => {to}"),
    }
}

pub fn write_proof(p: &ProofFile) -> String {
    let mut out = String::new();
    if let Some(sig) = &p.signature {
        out.push_str("signature\n");
        write_signature(sig, "  ", &mut out);
    }
    out.push_str(&format!("system {}\n", p.system));
    out.push_str("assumptions\n");
    for (i, a) in p.assumptions.iter().enumerate() {
        out.push_str(&format!("  a{}. {a}\n", i + 1));
    }
    out.push_str("proof\n");
    for (i, l) in p.lines.iter().enumerate() {
        out.push_str(&format!("  {}. {} ; {}\n", i + 1, l.formula, write_justification(&l.justification)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use causalog_core::axioms::{check_proof, ProofVerdict};
    use causalog_core::baselogic::Limits;

    const SAMPLE: &str = "signature\n  X: 0, 1\n  Y: 0, 1\nsystem AX2\nassumptions\n  a1. P(X=1) == P(Y=1)\nproof\n  1. P(X=1 & Y=1) + P(X=1 & ~Y=1) == P(X=1) ; Add\n  2. P(X=1 & Y=1) + P(X=1 & Y=0) == P(X=1) ; DistStep 1 : X=1 & ~Y=1 => X=1 & Y=0\n  3. P(X=1 & Y=1) + P(X=1 & Y=0) == P(Y=1) ; Subst 2 a1\n";

    #[test]
    fn parses_and_checks() {
        let p = parse_proof(SAMPLE).unwrap();
        assert_eq!(p.system, System::Ax2);
        assert_eq!(p.lines.len(), 3);
        // `Add` is not a schema of AX2.
        let v = check_proof(&p.lines, &p.assumptions, p.system, p.signature.as_ref(), &Limits::default()).unwrap();
        assert!(matches!(v, ProofVerdict::Rejected { line: 1, .. }));
        let v = check_proof(&p.lines, &p.assumptions, System::Ax3, p.signature.as_ref(), &Limits::default()).unwrap();
        assert_eq!(v, ProofVerdict::Accepted);
        assert_eq!(parse_proof(&write_proof(&p)).unwrap(), p);
    }

    #[test]
    fn bad_lines() {
        assert!(parse_proof(&SAMPLE.replace("  3.", "  4.")).is_err());
        assert!(parse_proof(&SAMPLE.replace("Subst 2 a1", "Subst 2")).is_err());
        assert!(parse_proof(&SAMPLE.replace("; Add\n", "; Nope\n")).is_err());
        let err = parse_proof(&SAMPLE.replace("== P(Y=1) ;", "== P(Q=1) ;")).unwrap_err().to_string();
        assert!(err.starts_with("line 10"), "{err}");
    }
}
