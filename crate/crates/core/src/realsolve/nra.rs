//! SMT-LIB 2 (QF_NRA) rendering of polynomial systems, and a reader for
//! the same fragment.
//!
//! Unknowns whose names are legal simple symbols are emitted as is, other
//! names as `|quoted|` symbols; a name that cannot be quoted becomes `xN`
//! with a `; xN = name` comment. Importing an export yields the same system
//! up to the order of terms inside each polynomial.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Signed, Zero};

use super::{Poly, PolySystem, Rel};
use crate::num::{parse_rat, Rat};
use crate::{Error, Result};

fn simple_symbol(name: &str) -> bool {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

fn symbol(name: &str, idx: usize, comments: &mut String) -> String {
    if simple_symbol(name) {
        name.to_string()
    } else if !name.contains('|') && !name.contains('\\') {
        alloc::format!("|{name}|")
    } else {
        let _ = writeln!(comments, "; x{idx} = {name}");
        alloc::format!("x{idx}")
    }
}

fn constant(q: &Rat) -> String {
    let a = q.abs();
    let body = if a.denom().is_one() { a.numer().to_string() } else { alloc::format!("(/ {} {})", a.numer(), a.denom()) };
    if q.is_negative() {
        alloc::format!("(- {body})")
    } else {
        body
    }
}

fn poly_expr(p: &Poly, syms: &[String]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (m, c) in p.terms() {
        let mut factors: Vec<String> = Vec::new();
        if !c.is_one() || m.degree() == 0 {
            factors.push(constant(c));
        }
        factors.extend(m.vars().iter().map(|&v| syms[v as usize].clone()));
        terms.push(if factors.len() == 1 { factors.pop().expect("one") } else { alloc::format!("(* {})", factors.join(" ")) });
    }
    match terms.len() {
        0 => "0".to_string(),
        1 => terms.pop().expect("one"),
        _ => alloc::format!("(+ {})", terms.join(" ")),
    }
}

/// Renders `s` as a QF_NRA script.
pub fn export_nra(s: &PolySystem) -> String {
    let mut comments = String::new();
    let syms: Vec<String> = s.unknowns.iter().enumerate().map(|(i, n)| symbol(n, i, &mut comments)).collect();
    let mut out = String::from("(set-logic QF_NRA)\n");
    out.push_str(&comments);
    for sym in &syms {
        let _ = writeln!(out, "(declare-const {sym} Real)");
    }
    for c in &s.constraints {
        let e = poly_expr(&c.poly, &syms);
        let _ = match c.rel {
            Rel::Eq => writeln!(out, "(assert (= {e} 0))"),
            Rel::Geq => writeln!(out, "(assert (>= {e} 0))"),
            Rel::Gt => writeln!(out, "(assert (> {e} 0))"),
            Rel::Neq => writeln!(out, "(assert (not (= {e} 0)))"),
        };
    }
    out.push_str("(check-sat)\n(get-model)\n(exit)\n");
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            ';' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' | ')' => {
                toks.push(c.to_string());
                chars.next();
            }
            '|' => {
                chars.next();
                let mut sym = String::new();
                loop {
                    match chars.next() {
                        Some((_, '|')) => break,
                        Some((_, c)) => sym.push(c),
                        None => return Err(Error::Syntax { pos: i, msg: "unterminated quoted symbol".into() }),
                    }
                }
                toks.push(alloc::format!("|{sym}"));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut tok = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                }
                toks.push(tok);
            }
        }
    }
    Ok(toks)
}

fn parse_sexps(toks: &[String]) -> Result<Vec<Sexp>> {
    fn one(toks: &[String], pos: &mut usize) -> Result<Sexp> {
        let t = toks.get(*pos).ok_or_else(|| Error::Syntax { pos: *pos, msg: "unexpected end of input".into() })?;
        *pos += 1;
        match t.as_str() {
            "(" => {
                let mut items = Vec::new();
                loop {
                    match toks.get(*pos).map(String::as_str) {
                        Some(")") => {
                            *pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(one(toks, pos)?),
                        None => return Err(Error::Syntax { pos: *pos, msg: "missing ')'".into() }),
                    }
                }
            }
            ")" => Err(Error::Syntax { pos: *pos - 1, msg: "unexpected ')'".into() }),
            _ => Ok(Sexp::Atom(t.clone())),
        }
    }
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < toks.len() {
        out.push(one(toks, &mut pos)?);
    }
    Ok(out)
}

fn sym_name(tok: &str) -> &str {
    tok.strip_prefix('|').unwrap_or(tok)
}

fn expr(e: &Sexp, s: &mut PolySystem) -> Result<Poly> {
    match e {
        Sexp::Atom(a) => {
            if a.starts_with(|c: char| c.is_ascii_digit()) {
                parse_rat(a).map(Poly::constant).ok_or_else(|| Error::Schema(alloc::format!("bad numeral {a}")))
            } else {
                let name = sym_name(a);
                match s.unknowns.iter().position(|n| n == name) {
                    Some(i) => Ok(Poly::var(i as u32)),
                    None => Err(Error::UnknownVariable(name.to_string())),
                }
            }
        }
        Sexp::List(items) => {
            let (op, args) = match items.split_first() {
                Some((Sexp::Atom(op), args)) => (op.as_str(), args),
                _ => return Err(Error::Schema("expected an operator".into())),
            };
            let vals: Vec<Poly> = args.iter().map(|a| expr(a, s)).collect::<Result<_>>()?;
            match (op, vals.len()) {
                ("+", _) => Ok(vals.into_iter().fold(Poly::zero(), |a, b| a + b)),
                ("*", _) => Ok(vals.into_iter().fold(Poly::one(), |a, b| a * b)),
                ("-", 1) => Ok(-vals.into_iter().next().expect("one")),
                ("-", k) if k >= 2 => {
                    let mut it = vals.into_iter();
                    let first = it.next().expect("two");
                    Ok(it.fold(first, |a, b| a - b))
                }
                ("/", 2) => {
                    let d = vals[1].as_constant().filter(|d| !d.is_zero()).ok_or_else(|| Error::Schema("division by a non-constant".into()))?;
                    Ok(vals[0].scale(&(Rat::one() / d)))
                }
                _ => Err(Error::Schema(alloc::format!("unsupported operator {op}/{}", vals.len()))),
            }
        }
    }
}

fn assertion(e: &Sexp, s: &mut PolySystem, out: &mut Vec<(Poly, Rel)>) -> Result<()> {
    let Sexp::List(items) = e else { return Err(Error::Schema("assertion must be a list".into())) };
    let Some(Sexp::Atom(op)) = items.first() else { return Err(Error::Schema("expected a relation".into())) };
    let args = &items[1..];
    match op.as_str() {
        "and" => {
            for a in args {
                assertion(a, s, out)?;
            }
            Ok(())
        }
        "not" => {
            let inner = args.first().ok_or_else(|| Error::Schema("empty not".into()))?;
            let mut tmp = Vec::new();
            assertion(inner, s, &mut tmp)?;
            match tmp.as_slice() {
                [(p, Rel::Eq)] => out.push((p.clone(), Rel::Neq)),
                [(p, Rel::Geq)] => out.push((-p, Rel::Gt)),
                [(p, Rel::Gt)] => out.push((-p, Rel::Geq)),
                _ => return Err(Error::Schema("unsupported negation".into())),
            }
            Ok(())
        }
        "=" | ">=" | ">" | "<=" | "<" if args.len() == 2 => {
            let a = expr(&args[0], s)?;
            let b = expr(&args[1], s)?;
            out.push(match op.as_str() {
                "=" => (a - b, Rel::Eq),
                ">=" => (a - b, Rel::Geq),
                ">" => (a - b, Rel::Gt),
                "<=" => (b - a, Rel::Geq),
                _ => (b - a, Rel::Gt),
            });
            Ok(())
        }
        _ => Err(Error::Schema(alloc::format!("unsupported assertion head {op}"))),
    }
}

/// Reads a QF_NRA script of the shape [`export_nra`] produces (any
/// polynomial comparisons, `and`, `not`).
pub fn import_nra(text: &str) -> Result<PolySystem> {
    let mut s = PolySystem::new();
    let mut renamed: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("; ") {
            if let Some((sym, name)) = rest.split_once(" = ") {
                renamed.push((sym.to_string(), name.to_string()));
            }
        }
    }
    for e in parse_sexps(&tokenize(text)?)? {
        let Sexp::List(items) = &e else { continue };
        match items.first() {
            Some(Sexp::Atom(h)) if h == "declare-const" || h == "declare-fun" => {
                let Some(Sexp::Atom(sym)) = items.get(1) else { return Err(Error::Schema("declaration without a name".into())) };
                let sort = items.last();
                if sort != Some(&Sexp::Atom("Real".into())) {
                    return Err(Error::Schema("only Real unknowns are supported".into()));
                }
                s.unknown(sym_name(sym));
            }
            Some(Sexp::Atom(h)) if h == "assert" => {
                let body = items.get(1).ok_or_else(|| Error::Schema("empty assertion".into()))?;
                let mut cons = Vec::new();
                assertion(body, &mut s, &mut cons)?;
                for (p, r) in cons {
                    s.push(p, r);
                }
            }
            _ => {}
        }
    }
    for (sym, name) in renamed {
        if let Some(u) = s.unknowns.iter_mut().find(|u| **u == sym) {
            *u = name;
        }
    }
    Ok(s)
}
