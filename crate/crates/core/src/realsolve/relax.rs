//! Sound refutation of nonlinear systems inside a box by McCormick
//! relaxation and branch-and-bound.
//!
//! Every monomial of degree two or more is replaced by a fresh unknown
//! bounded by the McCormick envelopes of a binary product decomposition.
//! An infeasible relaxation proves the box holds no solution; feasible
//! relaxations are split along the widest nonlinear unknown.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::linear::{decide_linear, LinearVerdict};
use super::{Constraint, Monomial, Poly, PolySystem, Rel};
use crate::num::{rat, Rat};
use crate::Result;

/// Box and node budget for [`refute_in_box`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxConfig {
    pub lo: Rat,
    pub hi: Rat,
    pub max_nodes: usize,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig { lo: Rat::zero(), hi: Rat::one(), max_nodes: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelaxOutcome {
    /// No point of the box satisfies the system.
    Refuted,
    /// A relaxation optimum that happens to satisfy the system exactly.
    Witness(Vec<Rat>),
    Inconclusive,
}

fn mul_interval(a: &(Rat, Rat), b: &(Rat, Rat)) -> (Rat, Rat) {
    let c = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = c.iter().min().expect("four").clone();
    let hi = c.iter().max().expect("four").clone();
    (lo, hi)
}

struct Lifter<'a> {
    bounds: &'a [(Rat, Rat)],
    sys: PolySystem,
    lifted: BTreeMap<Monomial, (u32, (Rat, Rat))>,
}

impl Lifter<'_> {
    /// Unknown standing for `m` in the relaxation, with its interval.
    fn lift(&mut self, m: &Monomial) -> (u32, (Rat, Rat)) {
        let vars = m.vars();
        if vars.len() == 1 {
            return (vars[0], self.bounds[vars[0] as usize].clone());
        }
        if let Some(x) = self.lifted.get(m) {
            return x.clone();
        }
        let (a, ai) = self.lift(&Monomial::var(vars[0]));
        let (b, bi) = self.lift(&Monomial::from_vars(vars[1..].to_vec()));
        let wi = mul_interval(&ai, &bi);
        let name = alloc::format!("w{}", self.sys.unknowns.len());
        let w = self.sys.unknown(&name);
        let (pa, pb, pw) = (Poly::var(a), Poly::var(b), Poly::var(w));
        let k = |q: &Rat| Poly::constant(q.clone());
        // w ≥ aL·b + bL·a − aL·bL and w ≥ aU·b + bU·a − aU·bU
        for (x, y) in [(&ai.0, &bi.0), (&ai.1, &bi.1)] {
            let rhs = pb.scale(x) + pa.scale(y) - k(&(x * y));
            self.sys.push(&pw - &rhs, Rel::Geq);
        }
        // w ≤ aU·b + bL·a − aU·bL and w ≤ aL·b + bU·a − aL·bU
        for (x, y) in [(&ai.1, &bi.0), (&ai.0, &bi.1)] {
            let rhs = pb.scale(x) + pa.scale(y) - k(&(x * y));
            self.sys.push(rhs - pw.clone(), Rel::Geq);
        }
        self.lifted.insert(m.clone(), (w, wi.clone()));
        (w, wi)
    }
}

fn relaxation(s: &PolySystem, bounds: &[(Rat, Rat)]) -> PolySystem {
    let mut lf = Lifter { bounds, sys: PolySystem { unknowns: s.unknowns.clone(), constraints: Vec::new() }, lifted: BTreeMap::new() };
    for (v, (lo, hi)) in bounds.iter().enumerate() {
        let x = Poly::var(v as u32);
        lf.sys.push(&x - &Poly::constant(lo.clone()), Rel::Geq);
        lf.sys.push(Poly::constant(hi.clone()) - x, Rel::Geq);
    }
    for c in &s.constraints {
        let mut p = Poly::zero();
        for (m, q) in c.poly.terms() {
            if m.degree() >= 2 {
                let (w, _) = lf.lift(m);
                p.add_term(Monomial::var(w), q.clone());
            } else {
                p.add_term(m.clone(), q.clone());
            }
        }
        lf.sys.constraints.push(Constraint { poly: p, rel: c.rel });
    }
    lf.sys
}

/// Branch-and-bound over `[lo, hi]^n`. `Refuted` is a proof of
/// infeasibility inside the box.
pub fn refute_in_box(s: &PolySystem, cfg: &RelaxConfig) -> Result<RelaxOutcome> {
    let n = s.unknowns.len();
    let mut nonlinear = vec![false; n];
    for c in &s.constraints {
        for (m, _) in c.poly.terms() {
            if m.degree() >= 2 {
                for &v in m.vars() {
                    nonlinear[v as usize] = true;
                }
            }
        }
    }
    let mut stack: Vec<Vec<(Rat, Rat)>> = vec![vec![(cfg.lo.clone(), cfg.hi.clone()); n]];
    let mut nodes = 0;
    let half = rat(1, 2);
    while let Some(bounds) = stack.pop() {
        if nodes >= cfg.max_nodes {
            return Ok(RelaxOutcome::Inconclusive);
        }
        nodes += 1;
        let r = relaxation(s, &bounds);
        match decide_linear(&r)? {
            LinearVerdict::Unsat => continue,
            LinearVerdict::Sat(w) => {
                let x: Vec<Rat> = w[..n].to_vec();
                if s.holds_at(&x) {
                    return Ok(RelaxOutcome::Witness(x));
                }
            }
        }
        let split = (0..n)
            .filter(|&v| nonlinear[v])
            .max_by(|&a, &b| {
                let wa = &bounds[a].1 - &bounds[a].0;
                let wb = &bounds[b].1 - &bounds[b].0;
                wa.cmp(&wb).then(b.cmp(&a))
            });
        let Some(v) = split else {
            // Linear after all: the relaxation is exact.
            return Ok(RelaxOutcome::Inconclusive);
        };
        let mid = (&bounds[v].0 + &bounds[v].1) * &half;
        let mut left = bounds.clone();
        left[v].1 = mid.clone();
        let mut right = bounds;
        right[v].0 = mid;
        stack.push(right);
        stack.push(left);
    }
    Ok(RelaxOutcome::Refuted)
}
