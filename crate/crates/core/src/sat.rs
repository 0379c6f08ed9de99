//! Satisfiability and validity of probabilistic formulas.
//!
//! A formula is desugared and split lazily into DNF clauses of literals
//! `t ≥ t'` or `t > t'`. For each clause and each variable order, the atoms
//! of Δ realizable over that order are grouped by which clause events they
//! entail; one unknown per group turns the clause into a polynomial system
//! whose solutions are exactly the distributions over those atoms that
//! satisfy the clause. A solution is then reduced to a basic one, whose
//! support has at most `|E| + 1` atoms, and converted into a model with one
//! exogenous point per supported atom. Every model is re-checked against
//! the input formula before it is reported.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::baselogic::{Block, DeltaAtom, DeltaContext, Limits};
use crate::formula::{desugar, Event, Formula, Term};
use crate::num::Rat;
use crate::realsolve::{
    decide_linear, normalize, refute_in_box, search_witness, Interner, LinearVerdict, Poly, PolySystem, RelaxConfig, RelaxOutcome, Rel,
    SearchConfig, Verdict,
};
use crate::scm::{ExoSpace, Scm};
use crate::semantics::model_check;
use crate::signature::Signature;
use crate::{Error, Result};

/// `lhs ≥ rhs`, or `lhs > rhs` when strict.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub lhs: Term,
    pub rhs: Term,
    pub strict: bool,
}

impl Literal {
    pub fn formula(&self) -> Formula {
        if self.strict {
            Formula::geq(self.rhs.clone(), self.lhs.clone()).not()
        } else {
            Formula::geq(self.lhs.clone(), self.rhs.clone())
        }
    }
}

/// Decides one polynomial system for an external backend.
pub trait NraOracle: Sync {
    fn decide(&self, s: &PolySystem) -> Verdict;
}

/// Runs independent branches. Implementations may evaluate all of them
/// (in parallel, say) or stop after the first satisfiable one; the
/// verdict only depends on the lowest satisfiable index.
pub trait Executor: Sync {
    fn run(&self, n: usize, f: &(dyn Fn(usize) -> Result<BranchResult> + Sync)) -> Vec<Result<BranchResult>>;
}

/// Evaluates branches in index order and stops at the first SAT.
pub struct Sequential;

impl Executor for Sequential {
    fn run(&self, n: usize, f: &(dyn Fn(usize) -> Result<BranchResult> + Sync)) -> Vec<Result<BranchResult>> {
        let mut out = Vec::new();
        for i in 0..n {
            let r = f(i);
            let stop = matches!(&r, Ok(b) if matches!(b.outcome, BranchOutcome::Sat(_)));
            out.push(r);
            if stop {
                break;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SatConfig {
    /// Domains of the variables; without one every domain is open and
    /// witness models add a value named like `other`.
    pub signature: Option<Signature>,
    pub limits: Limits,
    pub search: SearchConfig,
    pub relax: RelaxConfig,
    pub max_clauses: usize,
    /// Reject formulas above this level.
    pub max_level: Option<u8>,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            signature: None,
            limits: Limits::default(),
            search: SearchConfig::default(),
            relax: RelaxConfig::default(),
            max_clauses: 4096,
            max_level: None,
        }
    }
}

/// Counters describing one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatStats {
    pub clauses: usize,
    pub branches: usize,
    pub atoms: usize,
    pub max_groups: usize,
    pub linear_systems: usize,
    pub nonlinear_systems: usize,
    pub refuted_linear: usize,
    pub refuted_relaxation: usize,
    pub refuted_oracle: usize,
    pub unknown_branches: usize,
}

impl SatStats {
    fn absorb(&mut self, o: &SatStats) {
        self.clauses += o.clauses;
        self.branches += o.branches;
        self.atoms += o.atoms;
        self.max_groups = self.max_groups.max(o.max_groups);
        self.linear_systems += o.linear_systems;
        self.nonlinear_systems += o.nonlinear_systems;
        self.refuted_linear += o.refuted_linear;
        self.refuted_relaxation += o.refuted_relaxation;
        self.refuted_oracle += o.refuted_oracle;
        self.unknown_branches += o.unknown_branches;
    }
}

/// A satisfying model together with the branch that produced it.
#[derive(Clone, Debug)]
pub struct SatWitness {
    pub model: Scm,
    pub order: Vec<String>,
    /// Supported atoms (as base formulas) with their probabilities.
    pub support: Vec<(Event, Rat)>,
    /// `|E| + 1` for the accepted clause.
    pub bound: usize,
    pub clause: Vec<Literal>,
}

#[derive(Clone, Debug)]
pub enum SatVerdict {
    Sat(Box<SatWitness>),
    Unsat,
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct SatResult {
    pub verdict: SatVerdict,
    pub stats: SatStats,
}

#[derive(Clone, Debug)]
pub enum ValidVerdict {
    Valid,
    Invalid(Box<SatWitness>),
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct ValidResult {
    pub verdict: ValidVerdict,
    pub stats: SatStats,
}

/// Outcome of one (clause, order) branch.
#[derive(Clone, Debug)]
pub enum BranchOutcome {
    Sat(Vec<(DeltaAtom, Rat)>),
    Unsat,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub outcome: BranchOutcome,
    pub stats: SatStats,
}

/// Enumerates the DNF clauses of a desugared formula, calling `k` on each
/// until it returns `true`. Returns whether `k` stopped the enumeration.
pub fn for_each_clause(f: &Formula, k: &mut dyn FnMut(&[Literal]) -> Result<bool>) -> Result<bool> {
    let mut acc = Vec::new();
    clauses(f, true, &mut acc, k)
}

fn clauses(f: &Formula, pos: bool, acc: &mut Vec<Literal>, k: &mut dyn FnMut(&[Literal]) -> Result<bool>) -> Result<bool> {
    match (f, pos) {
        (Formula::Geq(a, b), _) => {
            acc.push(if pos {
                Literal { lhs: a.clone(), rhs: b.clone(), strict: false }
            } else {
                Literal { lhs: b.clone(), rhs: a.clone(), strict: true }
            });
            let r = k(acc);
            acc.pop();
            r
        }
        (Formula::Not(x), _) => clauses(x, !pos, acc, k),
        (Formula::And(x, y), true) => clauses(x, true, acc, &mut |acc: &[Literal]| {
            let mut acc = acc.to_vec();
            clauses(y, true, &mut acc, k)
        }),
        (Formula::And(x, y), false) => Ok(clauses(x, false, acc, k)? || clauses(y, false, acc, k)?),
        _ => clauses(&desugar(f), pos, acc, k),
    }
}

struct ClauseSystem {
    ctx: DeltaContext,
    events: Vec<Event>,
    lits: Vec<(Poly, Rel)>,
}

fn prepare(clause: &[Literal], sig: Option<&Signature>) -> Result<ClauseSystem> {
    let mut interner = Interner::new();
    let mut lits = Vec::new();
    for l in clause {
        let p = normalize(&l.lhs, &mut interner) - normalize(&l.rhs, &mut interner);
        lits.push((p, if l.strict { Rel::Gt } else { Rel::Geq }));
    }
    let mut events = Vec::new();
    for leaf in interner.leaves() {
        match leaf {
            Term::Prob(e) => events.push(e.clone()),
            _ => return Err(Error::Schema("conditional probabilities must be desugared first".into())),
        }
    }
    let ctx = DeltaContext::from_events(events.iter(), sig)?;
    Ok(ClauseSystem { ctx, events, lits })
}

fn substitute(cs: &ClauseSystem, atoms: &[DeltaAtom], profiles: &[Vec<bool>]) -> PolySystem {
    let names: Vec<String> = (0..atoms.len()).map(|i| alloc::format!("d{i}")).collect();
    let mut s = PolySystem { unknowns: names, constraints: Vec::new() };
    let subs: Vec<Poly> = (0..cs.events.len())
        .map(|e| {
            let hits: Vec<usize> = (0..atoms.len()).filter(|&a| profiles[a][e]).collect();
            if hits.len() == atoms.len() {
                Poly::one()
            } else {
                hits.into_iter().fold(Poly::zero(), |acc, a| acc + Poly::var(a as u32))
            }
        })
        .collect();
    let total = (0..atoms.len()).fold(Poly::zero(), |acc, a| acc + Poly::var(a as u32));
    s.push(total - Poly::one(), Rel::Eq);
    for a in 0..atoms.len() {
        s.push(Poly::var(a as u32), Rel::Geq);
    }
    for (p, r) in &cs.lits {
        s.push(p.compose(&subs), *r);
    }
    s
}

fn profiles(cs: &ClauseSystem, atoms: &[DeltaAtom]) -> Result<Vec<Vec<bool>>> {
    atoms.iter().map(|d| cs.events.iter().map(|e| cs.ctx.entails(d, e)).collect()).collect()
}

/// The polynomial system of a clause over the given atoms: one unknown
/// `dᵢ` per atom, normalization, nonnegativity, and each literal with
/// every probability replaced by the sum of the atoms entailing its event.
pub fn build_system(clause: &[Literal], sig: Option<&Signature>, order: &[String], atoms: &[DeltaAtom]) -> Result<PolySystem> {
    let cs = prepare(clause, sig)?;
    let ord = order_indices(&cs.ctx, order)?;
    if let Some(d) = atoms.iter().find(|d| !cs.ctx.in_delta_order(d, &ord)) {
        return Err(Error::Witness(alloc::format!("atom {} is not realizable over the order", cs.ctx.atom_event(d))));
    }
    let prof = profiles(&cs, atoms)?;
    Ok(substitute(&cs, atoms, &prof))
}

fn order_indices(ctx: &DeltaContext, order: &[String]) -> Result<Vec<usize>> {
    let idx: Vec<usize> = order
        .iter()
        .map(|n| ctx.vars().iter().position(|v| v == n).ok_or_else(|| Error::UnknownVariable(n.clone())))
        .collect::<Result<_>>()?;
    if idx.len() != ctx.vars().len() {
        return Err(Error::Schema("the order must list every variable of the formula".into()));
    }
    Ok(idx)
}

/// Decides one branch: the atoms over `order` grouped by profile.
fn decide_branch(cs: &ClauseSystem, order: &[usize], cfg: &SatConfig, oracle: Option<&dyn NraOracle>) -> Result<BranchResult> {
    let mut stats = SatStats { branches: 1, ..SatStats::default() };
    let atoms = cs.ctx.delta_order(order, cfg.limits.max_atoms)?;
    stats.atoms = atoms.len();
    let prof = profiles(cs, &atoms)?;
    let mut groups: BTreeMap<&[bool], usize> = BTreeMap::new();
    for (i, p) in prof.iter().enumerate() {
        groups.entry(p.as_slice()).or_insert(i);
    }
    let reps: Vec<usize> = groups.values().copied().collect();
    stats.max_groups = reps.len();
    let rep_atoms: Vec<DeltaAtom> = reps.iter().map(|&i| atoms[i].clone()).collect();
    let rep_prof: Vec<Vec<bool>> = reps.iter().map(|&i| prof[i].clone()).collect();
    let sys = substitute(cs, &rep_atoms, &rep_prof);
    let verdict = if sys.is_linear() {
        stats.linear_systems = 1;
        match decide_linear(&sys)? {
            LinearVerdict::Sat(x) => Verdict::Sat(x),
            LinearVerdict::Unsat => {
                stats.refuted_linear = 1;
                Verdict::Unsat
            }
        }
    } else {
        stats.nonlinear_systems = 1;
        match search_witness(&sys, &cfg.search) {
            Some(x) => Verdict::Sat(x),
            None => match refute_in_box(&sys, &cfg.relax)? {
                RelaxOutcome::Witness(x) => Verdict::Sat(x),
                RelaxOutcome::Refuted => {
                    stats.refuted_relaxation = 1;
                    Verdict::Unsat
                }
                RelaxOutcome::Inconclusive => match oracle.map(|o| o.decide(&sys)) {
                    Some(Verdict::Sat(x)) if sys.holds_at(&x) => Verdict::Sat(x),
                    Some(Verdict::Unsat) => {
                        stats.refuted_oracle = 1;
                        Verdict::Unsat
                    }
                    _ => Verdict::Unknown,
                },
            },
        }
    };
    let outcome = match verdict {
        Verdict::Sat(q) => BranchOutcome::Sat(reduce_support(&rep_atoms, &rep_prof, &q)?),
        Verdict::Unsat => BranchOutcome::Unsat,
        Verdict::Unknown => {
            stats.unknown_branches = 1;
            BranchOutcome::Unknown
        }
    };
    Ok(BranchResult { outcome, stats })
}

/// Replaces a distribution over atoms by a basic one inducing the same
/// event probabilities; its support has at most `|E| + 1` atoms.
fn reduce_support(atoms: &[DeltaAtom], prof: &[Vec<bool>], q: &[Rat]) -> Result<Vec<(DeltaAtom, Rat)>> {
    let live: Vec<usize> = (0..atoms.len()).filter(|&i| q[i].is_positive()).collect();
    let n_events = prof.first().map_or(0, Vec::len);
    let mut s = PolySystem { unknowns: live.iter().map(|i| alloc::format!("d{i}")).collect(), constraints: Vec::new() };
    let total = (0..live.len()).fold(Poly::zero(), |acc, k| acc + Poly::var(k as u32));
    s.push(total - Poly::one(), Rel::Eq);
    for k in 0..live.len() {
        s.push(Poly::var(k as u32), Rel::Geq);
    }
    for e in 0..n_events {
        let mut lhs = Poly::zero();
        let mut value = Rat::zero();
        for (k, (&i, row)) in live.iter().zip(live.iter().map(|&i| &prof[i])).enumerate() {
            if row[e] {
                lhs = lhs + Poly::var(k as u32);
                value += &q[i];
            }
        }
        s.push(lhs - Poly::constant(value), Rel::Eq);
    }
    let LinearVerdict::Sat(r) = decide_linear(&s)? else {
        return Err(Error::Witness("support reduction lost feasibility".into()));
    };
    let support: Vec<(DeltaAtom, Rat)> =
        live.iter().zip(r).filter(|(_, p)| p.is_positive()).map(|(&i, p)| (atoms[i].clone(), p)).collect();
    if support.len() > n_events + 1 {
        return Err(Error::Witness(alloc::format!("support of {} atoms exceeds {}", support.len(), n_events + 1)));
    }
    Ok(support)
}

fn spare_name(taken: &[&str]) -> String {
    let mut name = "other".to_string();
    let mut k = 1;
    while taken.contains(&name.as_str()) {
        name = alloc::format!("other{k}");
        k += 1;
    }
    name
}

/// Without a signature, witnesses range over every variable of the whole
/// formula (not only those of the satisfied clause) so they can be checked
/// against it; each domain holds the mentioned values and one spare.
fn open_signature(phi: &Formula) -> Result<Signature> {
    let mut vals: alloc::collections::BTreeMap<String, Vec<String>> = alloc::collections::BTreeMap::new();
    for a in phi.atoms() {
        vals.entry(a.var).or_default().push(a.value);
    }
    Signature::new(vals.into_iter().map(|(var, mut vs)| {
        let taken: Vec<&str> = vs.iter().map(String::as_str).collect();
        let spare = spare_name(&taken);
        vs.push(spare);
        (var, vs)
    }))
}

/// A model with one exogenous point per supported atom. Variable
/// `order[i]` reads every earlier variable of the order; its table follows
/// the atom's conflict cells, unconstrained cells copy the atom's outcome
/// under the empty intervention, and the "other" block maps to a value the
/// formula never mentions.
pub fn model_from_witness(ctx: &DeltaContext, order: &[usize], support: &[(DeltaAtom, Rat)], sig: Option<&Signature>) -> Result<Scm> {
    for (d, _) in support {
        if !ctx.in_delta_order(d, order) {
            return Err(Error::Witness(alloc::format!("atom {} is not realizable over the order", ctx.atom_event(d))));
        }
    }
    let sig = match sig {
        Some(s) => s.clone(),
        None => {
            let vars: Vec<(String, Vec<String>)> = (0..ctx.vars().len())
                .map(|v| {
                    let mut vals: Vec<String> = ctx.mentioned(v).into_iter().map(String::from).collect();
                    if ctx.blocks(v).contains(&Block::Other) {
                        let taken: Vec<&str> = ctx.mentioned(v);
                        vals.push(spare_name(&taken));
                    }
                    (ctx.vars()[v].clone(), vals)
                })
                .collect();
            Signature::new(vars)?
        }
    };
    // ctx variable index -> signature index, and block <-> value maps.
    let sig_of: Vec<usize> =
        ctx.vars().iter().map(|n| sig.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone()))).collect::<Result<_>>()?;
    let mut block_value: Vec<Vec<usize>> = Vec::new();
    let mut value_block: Vec<Vec<u16>> = Vec::new();
    for (v, &sv) in sig_of.iter().enumerate() {
        let dom = sig.domain(sv);
        let mentioned = ctx.mentioned(v);
        let other = ctx.blocks(v).iter().position(|b| *b == Block::Other);
        let spare = dom.iter().position(|x| !mentioned.contains(&x.as_str()));
        let mut bv = Vec::new();
        for b in ctx.blocks(v) {
            bv.push(match b {
                Block::Value(x) => sig.value_index(sv, x).ok_or_else(|| Error::ValueOutsideDomain { var: ctx.vars()[v].clone(), value: x.clone() })?,
                Block::Other => spare.ok_or_else(|| Error::Witness(alloc::format!("no spare value for {}", ctx.vars()[v])))?,
            });
        }
        let vb: Vec<u16> = dom
            .iter()
            .map(|x| match ctx.blocks(v).iter().position(|b| *b == Block::Value(x.clone())) {
                Some(b) => b as u16,
                None => other.map_or(0, |o| o as u16),
            })
            .collect();
        block_value.push(bv);
        value_block.push(vb);
    }
    let top_row = ctx.interventions().iter().position(|a| a.is_top());
    let exo = ExoSpace::new(support.iter().enumerate().map(|(k, (_, p))| (alloc::format!("d{k}"), p.clone())))?;
    let tables: Vec<_> = support.iter().map(|(d, _)| ctx.conflict_table(d, order)).collect();
    let mut parents = vec![Vec::new(); sig.len()];
    let mut pos_of = vec![None; sig.len()];
    for (i, &v) in order.iter().enumerate() {
        parents[sig_of[v]] = order[..i].iter().map(|&p| sig_of[p]).collect();
        pos_of[sig_of[v]] = Some((i, v));
    }
    Scm::from_fn(sig.clone(), exo, parents, |sv, pvals, u| {
        let Some((i, v)) = pos_of[sv] else { return 0 };
        let key: Vec<u16> = order[..i].iter().zip(pvals).map(|(&p, &x)| value_block[p][x]).collect();
        let hit = tables[u].cells.iter().find_map(|row| match &row[i] {
            Some((k, out)) if *k == key => Some(*out),
            _ => None,
        });
        let block = hit.unwrap_or_else(|| match top_row {
            Some(r) => support[u].0.blocks[r * ctx.vars().len() + v],
            None => 0,
        });
        block_value[v][block as usize]
    })
}

/// Decides satisfiability of `phi`.
pub fn decide_sat(phi: &Formula, cfg: &SatConfig) -> Result<SatResult> {
    decide_sat_with(phi, cfg, &Sequential, None)
}

/// [`decide_sat`] with a branch executor and an optional external backend
/// for nonlinear systems the built-in tiers leave open.
pub fn decide_sat_with(phi: &Formula, cfg: &SatConfig, exec: &dyn Executor, oracle: Option<&dyn NraOracle>) -> Result<SatResult> {
    if let Some(max) = cfg.max_level {
        let l = phi.level();
        if l > max {
            return Err(Error::Schema(alloc::format!("formula has level {l}, above the requested {max}")));
        }
    }
    if let Some(sig) = &cfg.signature {
        phi.check(sig)?;
    }
    let witness_sig = match &cfg.signature {
        Some(s) => s.clone(),
        None => open_signature(phi)?,
    };
    let d = desugar(phi);
    let mut stats = SatStats::default();
    let mut found: Option<SatWitness> = None;
    let mut open: Option<String> = None;
    let mut count = 0usize;
    let guard = for_each_clause(&d, &mut |clause| {
        count += 1;
        if count > cfg.max_clauses {
            open = Some(alloc::format!("more than {} clauses", cfg.max_clauses));
            return Ok(true);
        }
        stats.clauses += 1;
        let cs = match prepare(clause, cfg.signature.as_ref()) {
            Ok(cs) => cs,
            Err(e @ Error::SizeGuard(_)) => {
                open = Some(alloc::format!("{e}"));
                return Ok(false);
            }
            Err(e) => return Err(e),
        };
        let n_orders = crate::baselogic::factorial(cs.ctx.vars().len()).unwrap_or(usize::MAX);
        if n_orders > cfg.limits.max_orders {
            open = Some(alloc::format!("{n_orders} orders exceed the limit"));
            return Ok(false);
        }
        let orders: Vec<Vec<usize>> = cs.ctx.orders().collect();
        let results = exec.run(orders.len(), &|i| decide_branch(&cs, &orders[i], cfg, oracle));
        for (i, r) in results.into_iter().enumerate() {
            let r = match r {
                Ok(r) => r,
                Err(e @ Error::SizeGuard(_)) => {
                    open = Some(alloc::format!("{e}"));
                    continue;
                }
                Err(e) => return Err(e),
            };
            stats.absorb(&r.stats);
            match r.outcome {
                BranchOutcome::Sat(support) => {
                    let model = model_from_witness(&cs.ctx, &orders[i], &support, Some(&witness_sig))?;
                    if !model_check(&model, phi)? {
                        return Err(Error::Witness("constructed model fails the formula".into()));
                    }
                    found = Some(SatWitness {
                        model,
                        order: cs.ctx.order_names(&orders[i]),
                        support: support.iter().map(|(d, p)| (cs.ctx.atom_event(d), p.clone())).collect(),
                        bound: cs.events.len() + 1,
                        clause: clause.to_vec(),
                    });
                    return Ok(true);
                }
                BranchOutcome::Unsat => {}
                BranchOutcome::Unknown => {
                    open.get_or_insert_with(|| "a nonlinear branch was neither solved nor refuted".into());
                }
            }
        }
        Ok(false)
    });
    guard?;
    let verdict = match (found, open) {
        (Some(w), _) => SatVerdict::Sat(Box::new(w)),
        (None, Some(reason)) => SatVerdict::Unknown(reason),
        (None, None) => SatVerdict::Unsat,
    };
    Ok(SatResult { verdict, stats })
}

/// Validity through satisfiability of the negation.
pub fn decide_valid(phi: &Formula, cfg: &SatConfig) -> Result<ValidResult> {
    decide_valid_with(phi, cfg, &Sequential, None)
}

pub fn decide_valid_with(phi: &Formula, cfg: &SatConfig, exec: &dyn Executor, oracle: Option<&dyn NraOracle>) -> Result<ValidResult> {
    let r = decide_sat_with(&phi.clone().not(), cfg, exec, oracle)?;
    let verdict = match r.verdict {
        SatVerdict::Sat(w) => ValidVerdict::Invalid(w),
        SatVerdict::Unsat => ValidVerdict::Valid,
        SatVerdict::Unknown(s) => ValidVerdict::Unknown(s),
    };
    Ok(ValidResult { verdict, stats: r.stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::num::rat;
    use crate::semantics::prob;

    fn f(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    fn binary(names: &[&str]) -> SatConfig {
        SatConfig { signature: Some(Signature::binary(names)), ..SatConfig::default() }
    }

    fn sat(s: &str, cfg: &SatConfig) -> SatVerdict {
        decide_sat(&f(s), cfg).unwrap().verdict
    }

    #[test]
    fn dnf_clauses() {
        let d = desugar(&f("P(X=1) >= 0 & (P(Y=1) >= 0 | ~P(X=0) >= 0)"));
        let mut seen = Vec::new();
        for_each_clause(&d, &mut |c| {
            seen.push(c.len());
            Ok(false)
        })
        .unwrap();
        assert_eq!(seen, vec![2, 2]);
    }

    #[test]
    fn build_system_example() {
        let sig = Signature::binary(&["X"]);
        let clause = vec![Literal { lhs: Term::p(Event::atom("X", "1")), rhs: Term::constant(rat(2, 3)), strict: false }];
        let cs = prepare(&clause, Some(&sig)).unwrap();
        let atoms: Vec<DeltaAtom> = cs.ctx.atoms().collect();
        let s = build_system(&clause, Some(&sig), &["X".into()], &atoms).unwrap();
        assert_eq!(s.constraints.len(), 4);
        let one = atoms.iter().position(|d| cs.ctx.entails(d, &Event::atom("X", "1")).unwrap()).unwrap();
        let mut q = vec![rat(1, 4); 2];
        q[one] = rat(3, 4);
        assert!(s.holds_at(&q));
        assert!(!s.holds_at(&[rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn unsat_examples() {
        assert!(matches!(sat("P(X=1) > 1/2 & P(X=0) > 1/2", &binary(&["X"])), SatVerdict::Unsat));
        assert!(matches!(sat("P(X=1) > 1/2 & P(X=0) > 1/2", &SatConfig::default()), SatVerdict::Unsat));
        let cyc = "P([X=1]Y=1 & [X=0]Y=0) > 0 & P([Y=1]X=1 & [Y=0]X=0) > 0";
        assert!(matches!(sat(cyc, &binary(&["X", "Y"])), SatVerdict::Unsat));
    }

    #[test]
    fn tautology_and_constant_model() {
        assert!(matches!(sat("P(top) == 1", &SatConfig::default()), SatVerdict::Sat(_)));
        let SatVerdict::Sat(w) = sat("P(X=1) == 1", &binary(&["X"])) else { panic!() };
        assert_eq!(w.support.len(), 1);
    }

    #[test]
    fn independent_coins() {
        let s = "P(X=1) * P(Y=1) == P(X=1 & Y=1) & P(X=1) == 1/2 & P(Y=1) == 1/2";
        let SatVerdict::Sat(w) = sat(s, &binary(&["X", "Y"])) else { panic!() };
        assert!(w.support.len() <= w.bound);
        let m = &w.model;
        let p = |e: &str| prob(m, &crate::formula::parse_event(e, None).unwrap()).unwrap();
        assert_eq!(p("X=1 & Y=1"), rat(1, 4));
    }

    #[test]
    fn validity_examples() {
        let add = f("P(X=1 & Y=1) + P(X=1 & ~Y=1) == P(X=1)");
        assert!(matches!(decide_valid(&add, &SatConfig::default()).unwrap().verdict, ValidVerdict::Valid));
        let incexc = f("P([X=1, Y=1]Z=1) - P([Y=1](X=1 & Z=1)) - P([X=1](Y=1 & Z=1)) + P(X=1 & Y=1 & Z=1) >= 0");
        assert!(matches!(decide_valid(&incexc, &SatConfig::default()).unwrap().verdict, ValidVerdict::Valid));
        let cond = f("P(Y=1 | X=1) == P([X=1]Y=1)");
        let ValidVerdict::Invalid(w) = decide_valid(&cond, &binary(&["X", "Y"])).unwrap().verdict else { panic!() };
        assert!(!model_check(&w.model, &cond).unwrap());
    }

    #[test]
    fn witness_reproduces_atom_probabilities() {
        let sig = Signature::binary(&["X", "Y"]);
        let phi = f("P([X=1]Y=1) == 1/2 & P([X=0]Y=0 & [X=1]Y=1) > 0");
        let SatVerdict::Sat(w) = decide_sat(&phi, &SatConfig { signature: Some(sig), ..SatConfig::default() }).unwrap().verdict else {
            panic!()
        };
        for (atom, p) in &w.support {
            assert_eq!(&prob(&w.model, atom).unwrap(), p);
        }
    }

    #[test]
    fn level_guard() {
        let cfg = SatConfig { max_level: Some(1), ..SatConfig::default() };
        assert!(decide_sat(&f("P([X=1]Y=1) >= 0"), &cfg).is_err());
    }
}
