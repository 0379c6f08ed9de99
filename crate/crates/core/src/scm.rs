//! Finite structural causal models.
//!
//! Values are stored as indices into the signature's domains. A mechanism
//! is a total table over the product of its declared parents' domains and
//! the exogenous points.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::formula::Intervention;
use crate::graph::Dag;
use crate::num::Rat;
use crate::signature::Signature;
use crate::{Error, Result};

/// Finite exogenous space: labelled points with rational weights summing
/// to one. Zero weights are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExoSpace {
    labels: Vec<String>,
    weights: Vec<Rat>,
}

impl ExoSpace {
    pub fn new<L: Into<String>>(points: impl IntoIterator<Item = (L, Rat)>) -> Result<Self> {
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        for (l, w) in points {
            let l = l.into();
            if labels.contains(&l) {
                return Err(Error::InvalidModel(alloc::format!("exogenous point `{l}` declared twice")));
            }
            if w < Rat::zero() {
                return Err(Error::InvalidModel(alloc::format!("exogenous point `{l}` has negative weight")));
            }
            labels.push(l);
            weights.push(w);
        }
        if labels.is_empty() {
            return Err(Error::InvalidModel("exogenous space is empty".into()));
        }
        let total: Rat = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidModel(alloc::format!(
                "exogenous weights sum to {}",
                crate::num::fmt_rat(&total)
            )));
        }
        Ok(ExoSpace { labels, weights })
    }

    /// A single point of weight one.
    pub fn point() -> Self {
        ExoSpace { labels: vec!["u".into()], weights: vec![Rat::one()] }
    }

    /// `n` equally likely points labelled `u0, u1, ...`.
    pub fn uniform(n: usize) -> Self {
        let w = Rat::new(1.into(), (n as i64).into());
        ExoSpace { labels: (0..n).map(|i| alloc::format!("u{i}")).collect(), weights: vec![w; n] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn weight(&self, u: usize) -> &Rat {
        &self.weights[u]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rat)> {
        self.labels.iter().map(String::as_str).zip(&self.weights)
    }

    /// Indices of points with positive weight.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&u| !self.weights[u].is_zero())
    }
}

/// Mechanism of one variable: declared parents and a table indexed by
/// `parent_index * exo_len + u`, where `parent_index` is the mixed-radix
/// index of the parents' values (first parent most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mechanism {
    pub parents: Vec<usize>,
    pub table: Vec<usize>,
}

/// An endogenous instantiation as value indices in signature order.
pub type Instantiation = Vec<usize>;

/// A structural causal model over a finite signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scm {
    sig: Signature,
    exo: ExoSpace,
    mechs: Vec<Mechanism>,
}

/// Outcome of [`Scm::check_recursive`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recursion {
    Order(Vec<usize>),
    Cycle(Vec<usize>),
}

/// A failure of the Markov condition: `var` is not independent of
/// `nondescendants` given `parents` at the reported values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovViolation {
    pub var: String,
    pub nondescendants: Vec<String>,
    pub parents: Vec<String>,
    /// The variable's value followed by the values of the conditioning
    /// variables (non-descendants, then parents).
    pub values: Vec<(String, String)>,
    /// `P(var | nondescendants, parents)`.
    pub conditional_on_all: Rat,
    /// `P(var | parents)`.
    pub conditional_on_parents: Rat,
}

impl Scm {
    /// Builds a model, validating table sizes, parent indices and values.
    pub fn new(sig: Signature, exo: ExoSpace, mechs: Vec<Mechanism>) -> Result<Self> {
        if mechs.len() != sig.len() {
            return Err(Error::InvalidModel("one mechanism per variable is required".into()));
        }
        for (v, m) in mechs.iter().enumerate() {
            let mut size = 1usize;
            for (k, &p) in m.parents.iter().enumerate() {
                if p >= sig.len() {
                    return Err(Error::InvalidModel(alloc::format!("bad parent of `{}`", sig.name(v))));
                }
                if m.parents[..k].contains(&p) {
                    return Err(Error::InvalidModel(alloc::format!("repeated parent of `{}`", sig.name(v))));
                }
                size = size
                    .checked_mul(sig.domain(p).len())
                    .ok_or_else(|| Error::SizeGuard("mechanism table".into()))?;
            }
            if m.table.len() != size * exo.len() {
                return Err(Error::InvalidModel(alloc::format!("mechanism of `{}` is not total", sig.name(v))));
            }
            if m.table.iter().any(|&x| x >= sig.domain(v).len()) {
                return Err(Error::InvalidModel(alloc::format!(
                    "mechanism of `{}` leaves its domain",
                    sig.name(v)
                )));
            }
        }
        Ok(Scm { sig, exo, mechs })
    }

    /// Builds a model from closures: `f(v, parent_values, u)` gives the value
    /// index of variable `v`.
    pub fn from_fn(
        sig: Signature,
        exo: ExoSpace,
        parents: Vec<Vec<usize>>,
        mut f: impl FnMut(usize, &[usize], usize) -> usize,
    ) -> Result<Self> {
        let mut mechs = Vec::new();
        for (v, ps) in parents.into_iter().enumerate() {
            let radix: Vec<usize> = ps.iter().map(|&p| sig.domain(p).len()).collect();
            let count: usize = radix.iter().product();
            let mut table = Vec::with_capacity(count * exo.len());
            let mut vals = vec![0; ps.len()];
            for idx in 0..count {
                decode(idx, &radix, &mut vals);
                for u in 0..exo.len() {
                    table.push(f(v, &vals, u));
                }
            }
            mechs.push(Mechanism { parents: ps, table });
        }
        Scm::new(sig, exo, mechs)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn exo(&self) -> &ExoSpace {
        &self.exo
    }

    pub fn mechanism(&self, v: usize) -> &Mechanism {
        &self.mechs[v]
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechs
    }

    /// Output of `f_v` given a full instantiation (only parents are read).
    pub fn eval_mechanism(&self, v: usize, values: &[usize], u: usize) -> usize {
        let m = &self.mechs[v];
        let mut idx = 0;
        for &p in &m.parents {
            idx = idx * self.sig.domain(p).len() + values[p];
        }
        m.table[idx * self.exo.len() + u]
    }

    /// Replaces the mechanisms of intervened variables by constants.
    pub fn apply_intervention(&self, i: &Intervention) -> Result<Scm> {
        let mut mechs = self.mechs.clone();
        for (var, value) in i.iter() {
            let (v, x) = self.sig.resolve(var, value)?;
            mechs[v] = Mechanism { parents: Vec::new(), table: vec![x; self.exo.len()] };
        }
        Ok(Scm { sig: self.sig.clone(), exo: self.exo.clone(), mechs })
    }

    /// Edges `X -> Y` such that, at some positive-weight point, changing
    /// only `X` changes `f_Y`.
    pub fn influence_graph(&self) -> Dag {
        let n = self.sig.len();
        let mut edges = Vec::new();
        for y in 0..n {
            let m = &self.mechs[y];
            let radix: Vec<usize> = m.parents.iter().map(|&p| self.sig.domain(p).len()).collect();
            let count: usize = radix.iter().product();
            for (k, &x) in m.parents.iter().enumerate() {
                // Stride of parent k in the mixed-radix index.
                let stride: usize = radix[k + 1..].iter().product();
                let influences = (0..count).filter(|idx| (idx / stride) % radix[k] == 0).any(|base| {
                    self.exo.support().any(|u| {
                        let first = m.table[base * self.exo.len() + u];
                        (1..radix[k]).any(|d| m.table[(base + d * stride) * self.exo.len() + u] != first)
                    })
                });
                if influences {
                    edges.push((x, y));
                }
            }
        }
        Dag::from_parts_unchecked(self.sig.names().to_vec(), edges)
    }

    /// Topological order of the influence graph, preferring declaration
    /// order among ready variables, or a cycle.
    pub fn check_recursive(&self) -> Recursion {
        let g = self.influence_graph();
        match g.topological_order() {
            Ok(order) => Recursion::Order(order),
            Err(cycle) => Recursion::Cycle(cycle),
        }
    }

    /// The recursive order, or [`Error::NotRecursive`].
    pub fn order(&self) -> Result<Vec<usize>> {
        match self.check_recursive() {
            Recursion::Order(o) => Ok(o),
            Recursion::Cycle(c) => Err(Error::NotRecursive(c.iter().map(|&v| self.sig.name(v).to_string()).collect())),
        }
    }

    /// Unique solution at exogenous point `u`.
    pub fn solve(&self, u: usize) -> Result<Instantiation> {
        let order = self.order()?;
        Ok(self.solve_in_order(&order, u))
    }

    /// Solves along a precomputed order of the influence graph. Parents
    /// that come later in the order do not affect the output at positive
    /// weight points and read as the first domain value.
    pub fn solve_in_order(&self, order: &[usize], u: usize) -> Instantiation {
        let mut values = vec![0; self.sig.len()];
        for &v in order {
            values[v] = self.eval_mechanism(v, &values, u);
        }
        values
    }

    /// Exact pushforward distribution over endogenous instantiations.
    pub fn distribution(&self) -> Result<BTreeMap<Instantiation, Rat>> {
        let order = self.order()?;
        let mut dist = BTreeMap::new();
        for u in self.exo.support() {
            let v = self.solve_in_order(&order, u);
            *dist.entry(v).or_insert_with(Rat::zero) += self.exo.weight(u);
        }
        Ok(dist)
    }

    /// Distribution of the intervened model.
    pub fn distribution_under(&self, i: &Intervention) -> Result<BTreeMap<Instantiation, Rat>> {
        let order = self.order()?;
        let m = self.apply_intervention(i)?;
        let mut dist = BTreeMap::new();
        for u in m.exo.support() {
            let v = m.solve_in_order(&order, u);
            *dist.entry(v).or_insert_with(Rat::zero) += m.exo.weight(u);
        }
        Ok(dist)
    }

    /// Checks that every variable is independent of its non-descendants
    /// given its parents in the influence graph, with exact arithmetic.
    pub fn check_markov(&self) -> Result<core::result::Result<(), MarkovViolation>> {
        let joint = self.distribution()?;
        let g = self.influence_graph();
        for v in 0..self.sig.len() {
            let parents: Vec<usize> = g.parents(v).to_vec();
            let desc = g.descendants(v);
            let nd: Vec<usize> =
                (0..self.sig.len()).filter(|&w| w != v && !desc.contains(&w) && !parents.contains(&w)).collect();
            if nd.is_empty() {
                continue;
            }
            let project = |inst: &Instantiation, vars: &[usize]| -> Vec<usize> { vars.iter().map(|&w| inst[w]).collect() };
            let mut cond_vars = nd.clone();
            cond_vars.extend(&parents);
            let mut p_all: BTreeMap<Vec<usize>, Rat> = BTreeMap::new();
            let mut p_v_all: BTreeMap<(usize, Vec<usize>), Rat> = BTreeMap::new();
            let mut p_pa: BTreeMap<Vec<usize>, Rat> = BTreeMap::new();
            let mut p_v_pa: BTreeMap<(usize, Vec<usize>), Rat> = BTreeMap::new();
            for (inst, w) in &joint {
                let c = project(inst, &cond_vars);
                let pa = project(inst, &parents);
                *p_all.entry(c.clone()).or_insert_with(Rat::zero) += w;
                *p_v_all.entry((inst[v], c)).or_insert_with(Rat::zero) += w;
                *p_pa.entry(pa.clone()).or_insert_with(Rat::zero) += w;
                *p_v_pa.entry((inst[v], pa)).or_insert_with(Rat::zero) += w;
            }
            for (c, pc) in &p_all {
                let pa = c[nd.len()..].to_vec();
                for x in 0..self.sig.domain(v).len() {
                    let zero = Rat::zero();
                    let lhs = p_v_all.get(&(x, c.clone())).unwrap_or(&zero) / pc;
                    let rhs = p_v_pa.get(&(x, pa.clone())).unwrap_or(&zero) / &p_pa[&pa];
                    if lhs != rhs {
                        let mut values = vec![(self.sig.name(v).to_string(), self.sig.domain(v)[x].clone())];
                        for (k, &w) in cond_vars.iter().enumerate() {
                            values.push((self.sig.name(w).to_string(), self.sig.domain(w)[c[k]].clone()));
                        }
                        let names = |vs: &[usize]| vs.iter().map(|&w| self.sig.name(w).to_string()).collect();
                        return Ok(Err(MarkovViolation {
                            var: self.sig.name(v).to_string(),
                            nondescendants: names(&nd),
                            parents: names(&parents),
                            values,
                            conditional_on_all: lhs,
                            conditional_on_parents: rhs,
                        }));
                    }
                }
            }
        }
        Ok(Ok(()))
    }

    /// Renders an instantiation as `(name, value)` pairs.
    pub fn describe(&self, inst: &[usize]) -> Vec<(String, String)> {
        inst.iter()
            .enumerate()
            .map(|(v, &x)| (self.sig.name(v).to_string(), self.sig.domain(v)[x].clone()))
            .collect()
    }
}

/// Decodes a mixed-radix index, most significant digit first.
pub(crate) fn decode(mut idx: usize, radix: &[usize], out: &mut [usize]) {
    for k in (0..radix.len()).rev() {
        out[k] = idx % radix[k];
        idx /= radix[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::rat;

    #[test]
    fn m1_intervention_and_solve() {
        let m1 = fixtures::prop2_m1();
        let x0 = m1.apply_intervention(&Intervention::single("X", "0")).unwrap();
        assert!(x0.mechanism(0).parents.is_empty());
        assert_eq!(x0.mechanism(1), m1.mechanism(1));
        assert_eq!(m1.apply_intervention(&Intervention::top()).unwrap(), m1);
        let y1 = m1.apply_intervention(&Intervention::single("Y", "1")).unwrap();
        assert_eq!(y1.solve(0).unwrap(), vec![0, 1]);
        assert_eq!(m1.solve(1).unwrap(), vec![1, 1]);
        assert_eq!(x0.solve(1).unwrap(), vec![0, 0]);
    }

    #[test]
    fn prop3_m2_solution() {
        let m2 = fixtures::prop3_m2();
        let u = m2.exo().index_of("x1y2").unwrap();
        assert_eq!(m2.describe(&m2.solve(u).unwrap()), vec![("X".into(), "1".into()), ("Y".into(), "0".into())]);
    }

    #[test]
    fn influence_graphs() {
        let g = fixtures::prop2_m1().influence_graph();
        assert_eq!(g.edges(), vec![(0, 1)]);
        let g = fixtures::prop2_m2().influence_graph();
        assert_eq!(g.edges(), vec![(1, 0)]);
        let sig = Signature::binary(&["A", "B"]);
        let c = Scm::from_fn(sig, ExoSpace::point(), vec![vec![], vec![0]], |_, _, _| 1).unwrap();
        assert!(c.influence_graph().edges().is_empty());
        assert_eq!(c.check_recursive(), Recursion::Order(vec![0, 1]));
    }

    #[test]
    fn cycle_detected() {
        let sig = Signature::binary(&["X", "Y"]);
        let m = Scm::from_fn(sig, ExoSpace::point(), vec![vec![1], vec![0]], |_, p, _| p[0]).unwrap();
        assert_eq!(m.check_recursive(), Recursion::Cycle(vec![0, 1]));
        assert!(matches!(m.solve(0), Err(Error::NotRecursive(_))));
    }

    #[test]
    fn zero_weight_points_ignored_for_influence() {
        let sig = Signature::binary(&["X", "Y"]);
        let exo = ExoSpace::new([("a", Rat::one()), ("b", Rat::zero())]).unwrap();
        let m = Scm::from_fn(sig, exo, vec![vec![], vec![0]], |v, p, u| if v == 1 && u == 1 { p[0] } else { 0 }).unwrap();
        assert!(m.influence_graph().edges().is_empty());
    }

    #[test]
    fn markov_checks() {
        assert_eq!(fixtures::prop2_m1().check_markov().unwrap(), Ok(()));
        let sig = Signature::binary(&["X", "Y"]);
        let m = Scm::from_fn(sig, ExoSpace::uniform(2), vec![vec![], vec![]], |_, _, u| u).unwrap();
        let w = m.check_markov().unwrap().unwrap_err();
        assert_eq!(w.var, "X");
        assert_eq!(w.nondescendants, vec!["Y".to_string()]);
        assert!(w.parents.is_empty());
        assert_ne!(w.conditional_on_all, w.conditional_on_parents);
        assert_eq!(w.conditional_on_parents, rat(1, 2));
        let sig = Signature::binary(&["X", "Y"]);
        let c = Scm::from_fn(sig, ExoSpace::uniform(2), vec![vec![], vec![]], |_, _, _| 1).unwrap();
        assert_eq!(c.check_markov().unwrap(), Ok(()));
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(ExoSpace::new([("a", rat(1, 3)), ("b", rat(1, 3))]).is_err());
    }
}
