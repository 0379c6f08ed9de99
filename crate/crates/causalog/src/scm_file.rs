//! Model files.
//!
//! ```text
//! variables
//!   X: 0, 1
//!   Y: 0, 1
//! exogenous
//!   u0: 1/2
//!   u1: 1/2
//! mechanisms
//!   X <- ()
//!     u0 -> 0
//!     u1 -> 1
//!   Y <- (X)
//!     0, _ -> 0
//!     1, _ -> 1
//! ```
//!
//! A row lists the parents' values and then an exogenous label, with `_`
//! matching anything. The first matching row gives the value; every cell
//! must be covered.

use causalog_core::num::{fmt_rat, parse_rat};
use causalog_core::scm::{ExoSpace, Mechanism, Scm};
use causalog_core::signature::Signature;

use crate::error::{at_line, format_err, Result};
use crate::text::{lines, section, signature_block, write_signature, Line};

const SECTIONS: &[&str] = &["variables", "exogenous", "mechanisms"];

struct MechBlock<'a> {
    head: Line<'a>,
    var: String,
    parents: Vec<String>,
    rows: Vec<Line<'a>>,
}

pub fn parse_scm(src: &str) -> Result<Scm> {
    let all = lines(src);
    let mut blocks: [Vec<Line<'_>>; 3] = Default::default();
    let mut current = None;
    for l in all {
        if let Some(name) = section(l.text, SECTIONS) {
            current = SECTIONS.iter().position(|s| *s == name);
            continue;
        }
        match current {
            Some(k) => blocks[k].push(l),
            None => return Err(format_err(l.no, "expected a `variables` section")),
        }
    }
    let [vars, exo_lines, mech_lines] = blocks;
    let sig = signature_block(&vars)?;

    let mut points = Vec::new();
    for l in &exo_lines {
        let (label, w) = l.text.split_once(':').ok_or_else(|| format_err(l.no, "expected `label: weight`"))?;
        let w = parse_rat(w.trim()).ok_or_else(|| format_err(l.no, format!("`{}` is not a rational", w.trim())))?;
        points.push((label.trim().to_string(), w));
    }
    let exo = if points.is_empty() { ExoSpace::point() } else { at_line(exo_lines[0].no, ExoSpace::new(points))? };

    let mut mechs: Vec<Option<MechBlock<'_>>> = (0..sig.len()).map(|_| None).collect();
    let mut open: Option<usize> = None;
    for l in mech_lines {
        if let Some((var, parents)) = l.text.split_once("<-") {
            let var = var.trim().to_string();
            let v = sig.index_of(&var).ok_or_else(|| format_err(l.no, format!("unknown variable `{var}`")))?;
            if mechs[v].is_some() {
                return Err(format_err(l.no, format!("second mechanism for `{var}`")));
            }
            let parents = parents.trim().trim_start_matches('(').trim_end_matches(')');
            let parents = parents.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect();
            mechs[v] = Some(MechBlock { head: l, var, parents, rows: Vec::new() });
            open = Some(v);
        } else {
            let v = open.ok_or_else(|| format_err(l.no, "row outside a mechanism"))?;
            mechs[v].as_mut().expect("opened").rows.push(l);
        }
    }

    let mut out = Vec::with_capacity(sig.len());
    for (v, block) in mechs.into_iter().enumerate() {
        let block = block.ok_or_else(|| format_err(0, format!("no mechanism for `{}`", sig.name(v))))?;
        out.push(mechanism(&sig, &exo, v, &block)?);
    }
    Ok(Scm::new(sig, exo, out)?)
}

fn mechanism(sig: &Signature, exo: &ExoSpace, v: usize, b: &MechBlock<'_>) -> Result<Mechanism> {
    let parents: Vec<usize> = b
        .parents
        .iter()
        .map(|p| sig.index_of(p).ok_or_else(|| format_err(b.head.no, format!("unknown parent `{p}`"))))
        .collect::<Result<_>>()?;
    let radix: Vec<usize> = parents.iter().map(|&p| sig.domain(p).len()).collect();
    let combos: usize = radix.iter().product();
    // Each row: per column, `None` for a wildcard or the value index.
    let mut rows: Vec<(Vec<Option<usize>>, usize, usize)> = Vec::new();
    for l in &b.rows {
        let (lhs, rhs) = l.text.split_once("->").ok_or_else(|| format_err(l.no, "expected `values -> value`"))?;
        let cols: Vec<&str> = lhs.split(',').map(str::trim).collect();
        if cols.len() != parents.len() + 1 {
            return Err(format_err(l.no, format!("expected {} columns", parents.len() + 1)));
        }
        let mut pattern = Vec::with_capacity(cols.len());
        for (k, c) in cols.iter().enumerate() {
            if *c == "_" {
                pattern.push(None);
            } else if k < parents.len() {
                let x = sig
                    .value_index(parents[k], c)
                    .ok_or_else(|| format_err(l.no, format!("`{c}` is not a value of `{}`", sig.name(parents[k]))))?;
                pattern.push(Some(x));
            } else {
                let u = exo.index_of(c).ok_or_else(|| format_err(l.no, format!("unknown exogenous point `{c}`")))?;
                pattern.push(Some(u));
            }
        }
        let value = rhs.trim();
        let x = sig.value_index(v, value).ok_or_else(|| format_err(l.no, format!("`{value}` is not a value of `{}`", b.var)))?;
        rows.push((pattern, x, l.no));
    }
    let mut table = Vec::with_capacity(combos * exo.len());
    let mut digits = vec![0usize; parents.len()];
    for idx in 0..combos {
        let mut rest = idx;
        for k in (0..parents.len()).rev() {
            digits[k] = rest % radix[k];
            rest /= radix[k];
        }
        for u in 0..exo.len() {
            let hit = rows.iter().find(|(pat, _, _)| {
                pat[..parents.len()].iter().zip(&digits).all(|(p, d)| p.is_none_or(|x| x == *d)) && pat[parents.len()].is_none_or(|x| x == u)
            });
            match hit {
                Some((_, x, _)) => table.push(*x),
                None => {
                    let at: Vec<String> = parents.iter().zip(&digits).map(|(&p, &d)| sig.domain(p)[d].clone()).chain([exo.label(u).to_string()]).collect();
                    return Err(format_err(b.head.no, format!("no row for `{}` at {}", b.var, at.join(", "))));
                }
            }
        }
    }
    Ok(Mechanism { parents, table })
}

pub fn write_scm(m: &Scm) -> String {
    let sig = m.signature();
    let exo = m.exo();
    let mut out = String::from("variables\n");
    write_signature(sig, "  ", &mut out);
    out.push_str("exogenous\n");
    for (label, w) in exo.iter() {
        out.push_str(&format!("  {label}: {}\n", fmt_rat(w)));
    }
    out.push_str("mechanisms\n");
    for v in 0..sig.len() {
        let mech = m.mechanism(v);
        let names: Vec<&str> = mech.parents.iter().map(|&p| sig.name(p)).collect();
        out.push_str(&format!("  {} <- ({})\n", sig.name(v), names.join(", ")));
        let radix: Vec<usize> = mech.parents.iter().map(|&p| sig.domain(p).len()).collect();
        let combos: usize = radix.iter().product();
        for idx in 0..combos {
            let mut rest = idx;
            let mut vals = vec![""; radix.len()];
            for k in (0..radix.len()).rev() {
                vals[k] = &sig.domain(mech.parents[k])[rest % radix[k]];
                rest /= radix[k];
            }
            let cells = &mech.table[idx * exo.len()..(idx + 1) * exo.len()];
            let prefix: String = vals.iter().map(|s| format!("{s}, ")).collect();
            if cells.iter().all(|&x| x == cells[0]) {
                out.push_str(&format!("    {prefix}_ -> {}\n", sig.domain(v)[cells[0]]));
            } else {
                for (u, &x) in cells.iter().enumerate() {
                    out.push_str(&format!("    {prefix}{} -> {}\n", exo.label(u), sig.domain(v)[x]));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use causalog_core::fixtures;

    #[test]
    fn round_trip_fixtures() {
        for (_, m) in fixtures::expressivity_models() {
            let text = write_scm(&m);
            assert_eq!(parse_scm(&text).unwrap(), m, "{text}");
        }
    }

    #[test]
    fn wildcards_and_errors() {
        let src = "variables\n X: 0, 1\n Y: 0,1\nexogenous\n a: 1/4\n b: 3/4\nmechanisms\n X <- ()\n  a -> 1\n  _ -> 0\n Y <- (X)\n  1, _ -> 1\n  _, _ -> 0\n";
        let m = parse_scm(src).unwrap();
        assert_eq!(m.mechanism(0).table, vec![1, 0]);
        assert_eq!(m.mechanism(1).table, vec![0, 0, 1, 1]);
        let missing = src.replace("  _ -> 0\n", "");
        let err = parse_scm(&missing).unwrap_err().to_string();
        assert!(err.contains("no row for `X`"), "{err}");
        assert!(parse_scm(&src.replace("3/4", "1/2")).is_err());
    }
}
