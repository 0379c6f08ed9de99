//! Truth of base formulas at exogenous points, probabilities of events, and
//! model checking of probabilistic formulas.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::formula::{desugar, Event, Formula, Intervention, Prop, Term};
use crate::num::Rat;
use crate::scm::{Instantiation, Scm};
use crate::Result;

/// Evaluates formulas against one model, memoizing solutions per
/// intervention and probabilities per event.
pub struct Evaluator<'a> {
    model: &'a Scm,
    order: Vec<usize>,
    solutions: BTreeMap<Intervention, Vec<Instantiation>>,
    probs: BTreeMap<Event, Rat>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a Scm) -> Result<Self> {
        let order = model.order()?;
        Ok(Evaluator { model, order, solutions: BTreeMap::new(), probs: BTreeMap::new() })
    }

    pub fn model(&self) -> &Scm {
        self.model
    }

    /// Solutions of the intervened model at every exogenous point.
    pub fn solutions(&mut self, alpha: &Intervention) -> Result<&[Instantiation]> {
        if !self.solutions.contains_key(alpha) {
            let m = self.model.apply_intervention(alpha)?;
            let sols = (0..m.exo().len()).map(|u| m.solve_in_order(&self.order, u)).collect();
            self.solutions.insert(alpha.clone(), sols);
        }
        Ok(&self.solutions[alpha])
    }

    fn eval_prop(&self, p: &Prop, inst: &[usize]) -> Result<bool> {
        let sig = self.model.signature();
        let mut err = None;
        let val = p.eval(&mut |var, value| match sig.resolve(var, value) {
            Ok((v, x)) => inst[v] == x,
            Err(e) => {
                err.get_or_insert(e);
                false
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(val),
        }
    }

    /// Truth of `e` at exogenous point `u`.
    pub fn eval_base(&mut self, u: usize, e: &Event) -> Result<bool> {
        Ok(match e {
            Event::Cond(alpha, p) => {
                let inst = self.solutions(alpha)?[u].clone();
                self.eval_prop(p, &inst)?
            }
            Event::Not(x) => !self.eval_base(u, x)?,
            Event::And(a, b) => self.eval_base(u, a)? && self.eval_base(u, b)?,
        })
    }

    /// Total weight of the points where `e` holds.
    pub fn prob(&mut self, e: &Event) -> Result<Rat> {
        if let Some(p) = self.probs.get(e) {
            return Ok(p.clone());
        }
        let mut total = Rat::zero();
        let points: Vec<usize> = self.model.exo().support().collect();
        for u in points {
            if self.eval_base(u, e)? {
                total += self.model.exo().weight(u);
            }
        }
        self.probs.insert(e.clone(), total.clone());
        Ok(total)
    }

    /// Exact value of a term. Conditional probabilities with a zero
    /// denominator evaluate to zero; desugared terms never contain them.
    pub fn term(&mut self, t: &Term) -> Result<Rat> {
        let mut events = Vec::new();
        t.for_each_event(&mut |e| events.push(e.clone()));
        let mut table = BTreeMap::new();
        for e in events {
            let p = self.prob(&e)?;
            table.insert(e, p);
        }
        // Conditional-probability numerators are derived events.
        let mut missing = Vec::new();
        collect_cond(t, &mut missing);
        for e in missing {
            let p = self.prob(&e)?;
            table.insert(e, p);
        }
        Ok(t.eval(&mut |e| table[e].clone()))
    }

    /// Satisfaction of `f` after desugaring.
    pub fn check(&mut self, f: &Formula) -> Result<bool> {
        let f = desugar(f);
        let events = f.events();
        let mut table = BTreeMap::new();
        for e in events {
            let p = self.prob(&e)?;
            table.insert(e, p);
        }
        Ok(f.eval(&mut |e| table[e].clone()))
    }
}

fn collect_cond(t: &Term, out: &mut Vec<Event>) {
    match t {
        Term::CondProb(e, g) => out.push(e.clone().and_merged(g.clone())),
        Term::Add(a, b) | Term::Mul(a, b) => {
            collect_cond(a, out);
            collect_cond(b, out);
        }
        Term::Neg(a) => collect_cond(a, out),
        Term::Prob(_) | Term::Const(_) => {}
    }
}

/// Truth of `e` at exogenous point `u` of `m`.
pub fn eval_base(m: &Scm, u: usize, e: &Event) -> Result<bool> {
    Evaluator::new(m)?.eval_base(u, e)
}

/// `P(e)` in `m`.
pub fn prob(m: &Scm, e: &Event) -> Result<Rat> {
    Evaluator::new(m)?.prob(e)
}

/// Whether `m` satisfies `f`.
pub fn model_check(m: &Scm, f: &Formula) -> Result<bool> {
    Evaluator::new(m)?.check(f)
}
