//! Graph files: one `A -> B` edge per line. A line holding a single name
//! declares an isolated node. `digraph` wrappers, braces and trailing
//! semicolons are ignored. Nodes are numbered in order of first
//! appearance.

use causalog_core::graph::Dag;

use crate::error::{at_line, format_err, Result};
use crate::text::lines;

pub fn parse_graph(src: &str) -> Result<Dag> {
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let add = |n: &str, names: &mut Vec<String>| {
        if !names.iter().any(|m| m == n) {
            names.push(n.to_string());
        }
    };
    let mut last = 0;
    for l in lines(src) {
        last = l.no;
        let t = l.text.trim_end_matches(';').trim();
        if t.starts_with("digraph") || t == "{" || t == "}" {
            continue;
        }
        let parts: Vec<&str> = t.split("->").map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty() || p.contains(char::is_whitespace)) {
            return Err(format_err(l.no, format!("expected `A -> B`, found `{t}`")));
        }
        for p in &parts {
            add(p, &mut names);
        }
        for w in parts.windows(2) {
            edges.push((w[0].to_string(), w[1].to_string()));
        }
    }
    at_line(last, Dag::new(&names, &edges))
}

pub fn write_graph(g: &Dag) -> String {
    let mut out = String::new();
    let mut touched = vec![false; g.len()];
    for (a, b) in g.edges() {
        touched[a] = true;
        touched[b] = true;
        out.push_str(&format!("{} -> {}\n", g.names()[a], g.names()[b]));
    }
    for (v, seen) in touched.iter().enumerate() {
        if !seen {
            out.push_str(&format!("{}\n", g.names()[v]));
        }
    }
    out
}
