//! Pieces shared by the file formats: comment stripping, section headers,
//! signature blocks and assignment lists.

use causalog_core::formula::Intervention;
use causalog_core::signature::Signature;

use crate::error::{at_line, format_err, Result};

/// A non-empty line with its 1-based number, comments removed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Line<'a> {
    pub no: usize,
    pub text: &'a str,
}

pub(crate) fn lines(src: &str) -> Vec<Line<'_>> {
    src.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let text = raw.split('#').next().unwrap_or("").trim();
            (!text.is_empty()).then_some(Line { no: i + 1, text })
        })
        .collect()
}

/// The section keyword if `text` is one of `names`, with an optional colon.
pub(crate) fn section<'n>(text: &str, names: &[&'n str]) -> Option<&'n str> {
    let t = text.trim_end_matches(':').trim();
    names.iter().copied().find(|n| n.eq_ignore_ascii_case(t))
}

fn split_values(text: &str) -> Vec<String> {
    text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

/// `Name: v1, v2, ...`.
pub(crate) fn variable_line(line: Line<'_>) -> Result<(String, Vec<String>)> {
    let (name, values) = line.text.split_once(':').ok_or_else(|| format_err(line.no, "expected `Name: values`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format_err(line.no, "missing variable name"));
    }
    Ok((name.to_string(), split_values(values)))
}

pub(crate) fn signature_block(block: &[Line<'_>]) -> Result<Signature> {
    let vars: Vec<(String, Vec<String>)> = block.iter().map(|l| variable_line(*l)).collect::<Result<_>>()?;
    let first = block.first().map_or(0, |l| l.no);
    at_line(first, Signature::new(vars))
}

pub(crate) fn write_signature(sig: &Signature, indent: &str, out: &mut String) {
    for (name, dom) in sig.iter() {
        out.push_str(&format!("{indent}{name}: {}\n", dom.join(", ")));
    }
}

/// `X=1, Y=0`, optionally in brackets; empty for the empty intervention.
pub fn parse_assignment(text: &str, sig: Option<&Signature>) -> causalog_core::Result<Intervention> {
    let t = text.trim();
    let t = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
    let mut pairs = Vec::new();
    for part in t.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (v, x) = part.split_once('=').ok_or_else(|| causalog_core::Error::Syntax { pos: 0, msg: format!("expected `Var=value`, found `{part}`") })?;
        let (v, x) = (v.trim(), x.trim());
        if let Some(sig) = sig {
            sig.resolve(v, x)?;
        }
        pairs.push((v.to_string(), x.to_string()));
    }
    Intervention::new(pairs)
}

/// Names separated by commas or spaces.
pub fn parse_names(text: &str) -> Vec<String> {
    split_values(text)
}
