//! Directed acyclic graphs over endogenous variables: d-separation,
//! mutilation, do-calculus premises and instances, and random Markov models.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{desugar, Event, Formula, Intervention, Prop, Term};
use crate::num::Rat;
use crate::scm::{decode, ExoSpace, Mechanism, Scm};
use crate::signature::Signature;
use crate::{Error, Result};

/// Directed graph with named nodes. Graphs built through [`Dag::new`] are
/// acyclic; influence graphs of non-recursive models may contain cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds an acyclic graph from node names and named edges.
    pub fn new<S: AsRef<str>>(names: &[S], edges: &[(S, S)]) -> Result<Dag> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::InvalidModel("graph declares a node twice".into()));
        }
        let idx = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| Error::UnknownNode(s.to_string()));
        let mut pairs = Vec::new();
        for (a, b) in edges {
            pairs.push((idx(a.as_ref())?, idx(b.as_ref())?));
        }
        let g = Dag::from_parts_unchecked(names.clone(), pairs);
        if let Err(cycle) = g.topological_order() {
            let names = cycle.iter().map(|&v| g.names[v].clone()).collect();
            return Err(Error::NotRecursive(names));
        }
        Ok(g)
    }

    /// Builds a graph without checking acyclicity. Duplicate edges collapse.
    pub fn from_parts_unchecked(names: Vec<String>, edges: Vec<(usize, usize)>) -> Dag {
        let n = names.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let set: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for (a, b) in set {
            parents[b].push(a);
            children[a].push(b);
        }
        Dag { names, parents, children }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<BTreeSet<usize>> {
        names.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// All edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            self.children.iter().enumerate().flat_map(|(a, cs)| cs.iter().map(move |&b| (a, b))).collect();
        out.sort();
        out
    }

    /// Edges as name pairs.
    pub fn named_edges(&self) -> Vec<(String, String)> {
        self.edges().into_iter().map(|(a, b)| (self.names[a].clone(), self.names[b].clone())).collect()
    }

    /// True when every edge of `self` is an edge of `other` (same node names).
    pub fn is_subgraph_of(&self, other: &Dag) -> bool {
        let theirs: BTreeSet<(String, String)> = other.named_edges().into_iter().collect();
        self.named_edges().iter().all(|e| theirs.contains(e))
    }

    /// Strict descendants of `v`.
    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        self.reach(&[v], |g, n| g.children(n)).into_iter().filter(|&w| w != v).collect()
    }

    /// Nodes with a directed path into `set`, including `set` itself.
    pub fn ancestors_of(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let start: Vec<usize> = set.iter().copied().collect();
        self.reach(&start, |g, n| g.parents(n))
    }

    fn reach(&self, start: &[usize], next: impl Fn(&Dag, usize) -> &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = start.iter().copied().collect();
        let mut stack: Vec<usize> = start.to_vec();
        while let Some(n) = stack.pop() {
            for &m in next(self, n) {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen
    }

    /// Kahn's algorithm, always taking the smallest ready index. On a cycle
    /// returns the nodes of one cycle in traversal order.
    pub fn topological_order(&self) -> core::result::Result<Vec<usize>, Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every remaining node has a remaining parent; walk parents until a
        // node repeats, then report the cycle in edge direction.
        let remaining: BTreeSet<usize> = (0..n).filter(|v| !order.contains(v)).collect();
        let mut path = Vec::new();
        let mut cur = *remaining.first().expect("cycle nodes remain");
        loop {
            if let Some(pos) = path.iter().position(|&p| p == cur) {
                let mut cycle: Vec<usize> = path[pos..].to_vec();
                cycle.reverse();
                let min_pos = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap_or(0);
                cycle.rotate_left(min_pos);
                return Err(cycle);
            }
            path.push(cur);
            cur = *self.parents[cur].iter().find(|p| remaining.contains(p)).expect("remaining node has a remaining parent");
        }
    }

    /// Removes edges into `overline` nodes and out of `underline` nodes.
    pub fn mutilate<S: AsRef<str>>(&self, overline: &[S], underline: &[S]) -> Result<Dag> {
        let over = self.indices(overline)?;
        let under = self.indices(underline)?;
        Ok(self.mutilate_idx(&over, &under))
    }

    fn mutilate_idx(&self, over: &BTreeSet<usize>, under: &BTreeSet<usize>) -> Dag {
        let edges = self.edges().into_iter().filter(|(a, b)| !over.contains(b) && !under.contains(a)).collect();
        Dag::from_parts_unchecked(self.names.clone(), edges)
    }

    /// `Z(W)`: the `Z` nodes that are not ancestors of any `W` node once the
    /// edges into `X` are removed.
    pub fn z_of_w<S: AsRef<str>>(&self, x: &[S], z: &[S], w: &[S]) -> Result<Vec<String>> {
        let x = self.indices(x)?;
        let z = self.indices(z)?;
        let w = self.indices(w)?;
        Ok(self.z_of_w_idx(&x, &z, &w).into_iter().map(|v| self.names[v].clone()).collect())
    }

    fn z_of_w_idx(&self, x: &BTreeSet<usize>, z: &BTreeSet<usize>, w: &BTreeSet<usize>) -> BTreeSet<usize> {
        let gx = self.mutilate_idx(x, &BTreeSet::new());
        let anc = gx.ancestors_of(w);
        z.iter().copied().filter(|v| !anc.contains(v)).collect()
    }

    /// Whether `x` and `y` are d-separated given `z`.
    pub fn d_separated<S: AsRef<str>>(&self, x: &[S], y: &[S], z: &[S]) -> Result<bool> {
        let x = self.indices(x)?;
        let y = self.indices(y)?;
        let z = self.indices(z)?;
        Ok(self.d_separated_idx(&x, &y, &z))
    }

    /// Reachability over active trails (the "Bayes ball" traversal).
    pub fn d_separated_idx(&self, x: &BTreeSet<usize>, y: &BTreeSet<usize>, z: &BTreeSet<usize>) -> bool {
        let anc_z = self.ancestors_of(z);
        // Direction: true = arrived from a child (moving up).
        let mut seen: BTreeSet<(usize, bool)> = BTreeSet::new();
        let mut queue: VecDeque<(usize, bool)> = x.iter().map(|&v| (v, true)).collect();
        while let Some((n, up)) = queue.pop_front() {
            if !seen.insert((n, up)) {
                continue;
            }
            let observed = z.contains(&n);
            if !observed && y.contains(&n) {
                return false;
            }
            if up {
                if !observed {
                    queue.extend(self.parents[n].iter().map(|&p| (p, true)));
                    queue.extend(self.children[n].iter().map(|&c| (c, false)));
                }
            } else {
                if !observed {
                    queue.extend(self.children[n].iter().map(|&c| (c, false)));
                }
                if anc_z.contains(&n) {
                    queue.extend(self.parents[n].iter().map(|&p| (p, true)));
                }
            }
        }
        true
    }

    /// Evaluates the graphical side condition of do-calculus rule 1, 2 or 3.
    pub fn docalc_premise(&self, rule: u8, sets: &DoSets) -> Result<bool> {
        let x = self.indices(&sets.x)?;
        let y = self.indices(&sets.y)?;
        let z = self.indices(&sets.z)?;
        let w = self.indices(&sets.w)?;
        let empty = BTreeSet::new();
        let g = match rule {
            1 => self.mutilate_idx(&x, &empty),
            2 => self.mutilate_idx(&x, &z),
            3 => {
                let zw = self.z_of_w_idx(&x, &z, &w);
                let over: BTreeSet<usize> = x.union(&zw).copied().collect();
                self.mutilate_idx(&over, &empty)
            }
            _ => return Err(Error::Schema(alloc::format!("there is no do-calculus rule {rule}"))),
        };
        let cond: BTreeSet<usize> = x.union(&w).copied().collect();
        Ok(g.d_separated_idx(&y, &z, &cond))
    }

    /// Emits the desugared equivalences of the rule for every instantiation
    /// of the involved variables, refusing when the premise fails.
    pub fn docalc_instances(&self, sig: &Signature, rule: u8, sets: &DoSets) -> Result<Vec<Formula>> {
        if !self.docalc_premise(rule, sets)? {
            return Err(Error::PremiseViolated(rule));
        }
        docalc_formulas(sig, rule, sets)
    }
}

/// Variable sets of a do-calculus schema.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DoSets {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub w: Vec<String>,
}

impl DoSets {
    pub fn new(x: &[&str], y: &[&str], z: &[&str], w: &[&str]) -> Self {
        let own = |s: &[&str]| s.iter().map(|v| v.to_string()).collect();
        DoSets { x: own(x), y: own(y), z: own(z), w: own(w) }
    }
}

/// The rule's schema instances, without checking any premise.
pub fn docalc_formulas(sig: &Signature, rule: u8, sets: &DoSets) -> Result<Vec<Formula>> {
    if !(1..=3).contains(&rule) {
        return Err(Error::Schema(alloc::format!("there is no do-calculus rule {rule}")));
    }
    let mut vars: Vec<String> = Vec::new();
    for v in sets.x.iter().chain(&sets.y).chain(&sets.z).chain(&sets.w) {
        if sig.index_of(v).is_none() {
            return Err(Error::UnknownVariable(v.clone()));
        }
        if vars.contains(v) {
            return Err(Error::Schema(alloc::format!("`{v}` appears in two sets")));
        }
        vars.push(v.clone());
    }
    let radix: Vec<usize> = vars.iter().map(|v| sig.domain_of(v).expect("checked").len()).collect();
    let count: usize = radix.iter().product();
    if count > 1 << 16 {
        return Err(Error::SizeGuard("too many do-calculus instances".into()));
    }
    let mut vals = vec![0; vars.len()];
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        decode(idx, &radix, &mut vals);
        let pick = |names: &[String]| -> Vec<(String, String)> {
            let mut v: Vec<(String, String)> = names
                .iter()
                .map(|n| {
                    let k = vars.iter().position(|m| m == n).expect("collected");
                    (n.clone(), sig.domain_of(n).expect("checked")[vals[k]].clone())
                })
                .collect();
            v.sort();
            v
        };
        let (x, y, z, w) = (pick(&sets.x), pick(&sets.y), pick(&sets.z), pick(&sets.w));
        let intervention = |parts: &[&[(String, String)]]| -> Intervention {
            Intervention::new(parts.iter().flat_map(|p| p.iter().cloned())).expect("disjoint sets")
        };
        let prop = |parts: &[&[(String, String)]]| -> Prop {
            let mut atoms: Vec<(String, String)> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
            atoms.sort();
            Prop::conj(atoms.into_iter().map(|(v, x)| Prop::atom(v, x)))
        };
        let cond = |alpha: Intervention, target: Prop, given: &[&[(String, String)]]| -> Term {
            let yes = Event::cond(alpha.clone(), target);
            if given.iter().all(|g| g.is_empty()) {
                Term::p(yes)
            } else {
                Term::given(yes, Event::cond(alpha, prop(given)))
            }
        };
        let ax = intervention(&[&x]);
        let axz = intervention(&[&x, &z]);
        let ty = prop(&[&y]);
        let (lhs, rhs) = match rule {
            1 => (cond(ax.clone(), ty.clone(), &[&z, &w]), cond(ax, ty, &[&w])),
            2 => (cond(axz, ty.clone(), &[&w]), cond(ax, ty, &[&z, &w])),
            _ => (cond(axz, ty.clone(), &[&w]), cond(ax, ty, &[&w])),
        };
        out.push(desugar(&Formula::equiv(lhs, rhs)));
    }
    Ok(out)
}

/// A random model whose declared parents are the graph's parents, with one
/// private exogenous factor per variable and full-support rational
/// conditional distributions (denominators at most 97). Rows of each
/// conditional table are pairwise distinct, so every edge is an influence.
pub fn random_markov_scm(g: &Dag, seed: u64, domain_sizes: &[usize]) -> Result<Scm> {
    if g.topological_order().is_err() {
        return Err(Error::InvalidModel("graph has a cycle".into()));
    }
    if domain_sizes.len() != g.len() || domain_sizes.iter().any(|&k| k == 0 || k > 48) {
        return Err(Error::InvalidModel("one domain size in 1..=48 per node is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = Signature::new(
        g.names()
            .iter()
            .zip(domain_sizes)
            .map(|(n, &k)| (n.clone(), (0..k).map(|x| x.to_string()).collect::<Vec<_>>())),
    )?;
    // Per variable: cut points of the merged CDFs and, per row, the value on
    // each segment.
    let mut factors: Vec<(Vec<Rat>, Vec<Vec<usize>>)> = Vec::new();
    for v in 0..g.len() {
        let k = domain_sizes[v];
        let rows: usize = g.parents(v).iter().map(|&p| domain_sizes[p]).product();
        let mut cpts: Vec<Vec<i64>> = Vec::new();
        let mut den_of: Vec<i64> = Vec::new();
        let mut attempts = 0;
        while cpts.len() < rows {
            let d: i64 = rng.random_range((k as i64).max(2)..=97);
            let row = random_composition(&mut rng, d, k);
            let fresh = cpts.iter().zip(&den_of).all(|(r, &dd)| r.iter().zip(&row).any(|(a, b)| a * d != b * dd));
            attempts += 1;
            if fresh || k == 1 || attempts > 1000 {
                cpts.push(row);
                den_of.push(d);
            }
        }
        let mut cuts: BTreeSet<Rat> = BTreeSet::new();
        for (row, &d) in cpts.iter().zip(&den_of) {
            let mut acc = 0;
            for &c in &row[..k - 1] {
                acc += c;
                cuts.insert(Rat::new(BigInt::from(acc), BigInt::from(d)));
            }
        }
        cuts.insert(Rat::new(1.into(), 1.into()));
        let cuts: Vec<Rat> = cuts.into_iter().collect();
        let mut assign = Vec::with_capacity(rows);
        for (row, &d) in cpts.iter().zip(&den_of) {
            let mut seg_vals = Vec::with_capacity(cuts.len());
            for cut in &cuts {
                // The segment ending at `cut` belongs to the first value
                // whose cumulative mass reaches `cut`.
                let mut acc = 0;
                let mut val = k - 1;
                for (x, &c) in row.iter().enumerate() {
                    acc += c;
                    if Rat::new(BigInt::from(acc), BigInt::from(d)) >= *cut {
                        val = x;
                        break;
                    }
                }
                seg_vals.push(val);
            }
            assign.push(seg_vals);
        }
        factors.push((cuts, assign));
    }
    let seg_counts: Vec<usize> = factors.iter().map(|(c, _)| c.len()).collect();
    let total: usize = seg_counts.iter().product();
    if total > 1 << 16 {
        return Err(Error::SizeGuard("exogenous product space too large".into()));
    }
    let seg_weight = |v: usize, s: usize| -> Rat {
        let cuts = &factors[v].0;
        if s == 0 {
            cuts[0].clone()
        } else {
            &cuts[s] - &cuts[s - 1]
        }
    };
    let mut points = Vec::with_capacity(total);
    let mut segs = vec![0; g.len()];
    let mut seg_of_point: Vec<Vec<usize>> = Vec::with_capacity(total);
    for idx in 0..total {
        decode(idx, &seg_counts, &mut segs);
        let mut w = Rat::new(1.into(), 1.into());
        for (v, &s) in segs.iter().enumerate() {
            w *= seg_weight(v, s);
        }
        points.push((alloc::format!("u{idx}"), w));
        seg_of_point.push(segs.clone());
    }
    let exo = ExoSpace::new(points)?;
    let mut mechs = Vec::new();
    for v in 0..g.len() {
        let rows: usize = g.parents(v).iter().map(|&p| domain_sizes[p]).product();
        let mut table = Vec::with_capacity(rows * total);
        for r in 0..rows {
            for segs in &seg_of_point {
                table.push(factors[v].1[r][segs[v]]);
            }
        }
        mechs.push(Mechanism { parents: g.parents(v).to_vec(), table });
    }
    Scm::new(sig, exo, mechs)
}

/// `k` positive integers summing to `d`.
fn random_composition(rng: &mut ChaCha8Rng, d: i64, k: usize) -> Vec<i64> {
    let mut cuts: BTreeSet<i64> = BTreeSet::new();
    while cuts.len() < k - 1 {
        cuts.insert(rng.random_range(1..d));
    }
    let mut out = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(core::iter::once(d)) {
        out.push(c - prev);
        prev = c;
    }
    out
}
