//! Axiom schemata of the three calculi, instance recognition, and a
//! Hilbert-style proof checker.
//!
//! Fixed-shape schemata (the polynomial calculus, `NonNeg`, `Add`, `Dist`)
//! are recognized by unifying the desugared formula with a desugared
//! template whose metavariables are placeholder leaves. Schemata with a
//! variable number of conjuncts (`Def`, `ProbRec`, `ProbRec2`, `IncExc`,
//! `Add2`) are recognized by reading their parameters off the formula and
//! comparing against the regenerated instance.
//!
//! Besides axioms, assumptions and modus ponens, the checker accepts three
//! derived rules that keep equational reasoning short:
//!
//! * `PolyNorm`: the line follows from the cited lines propositionally,
//!   treating comparisons whose polynomial normal forms are positive
//!   multiples of each other as the same atom, and `q ≥ 0 → m·q ≥ 0` for a
//!   monomial `m` in probabilities;
//! * `Subst`: like `PolyNorm` with one cited equation `e ≡ 0`, where
//!   comparisons whose normal forms differ by a multiple of `e` are the same
//!   atom;
//! * `DistStep`: replaces the probability of a base formula by that of a
//!   base-equivalent one.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Signed;

use crate::baselogic::{base_valid, Limits};
use crate::formula::{desugar, Atom, Event, Formula, Intervention, Parsed, Prop, Term};
use crate::num::int;
use crate::realsolve::{normalize, Interner, Poly};
use crate::signature::Signature;
use crate::{Error, Result};

macro_rules! schemata {
    ($($name:ident),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Schema { $($name),* }

        impl Schema {
            pub const ALL: &'static [Schema] = &[$(Schema::$name),*];

            pub fn name(self) -> &'static str {
                match self { $(Schema::$name => stringify!($name)),* }
            }

            pub fn from_name(name: &str) -> Option<Schema> {
                Schema::ALL.iter().copied().find(|s| s.name().eq_ignore_ascii_case(name))
            }
        }
    };
}

schemata!(
    Def, Bool, NonNeg, Add, Dist, ProbRec, Add2, ProbRec2, IncExc, OrdTot, OrdTrans, NonDegen, AddComm, AddAssoc, Zero, AddOrd,
    MulOrdG, MulOrdL, MulComm, MulAssoc, One, MulDist, ZeroMul, NoZeroDiv, Neg, AddPos, MulPos, NegAdd, NegMul, NegNeg, OrdSq,
);

impl Schema {
    /// The sixteen axioms of the polynomial calculus.
    pub const POLY: &'static [Schema] = &[
        Schema::OrdTot,
        Schema::OrdTrans,
        Schema::NonDegen,
        Schema::AddComm,
        Schema::AddAssoc,
        Schema::Zero,
        Schema::AddOrd,
        Schema::MulOrdG,
        Schema::MulOrdL,
        Schema::MulComm,
        Schema::MulAssoc,
        Schema::One,
        Schema::MulDist,
        Schema::ZeroMul,
        Schema::NoZeroDiv,
        Schema::Neg,
    ];

    /// Principles derivable from the polynomial calculus.
    pub const DERIVED: &'static [Schema] =
        &[Schema::AddPos, Schema::MulPos, Schema::NegAdd, Schema::NegMul, Schema::NegNeg, Schema::OrdSq];

    /// Number of term metavariables of a polynomial schema.
    pub fn arity(self) -> Option<usize> {
        use Schema::*;
        Some(match self {
            NonDegen => 0,
            Zero | One | ZeroMul | Neg | NegNeg | OrdSq => 1,
            OrdTot | AddComm | MulComm | NoZeroDiv | AddPos | MulPos | NegAdd | NegMul => 2,
            OrdTrans | AddAssoc | AddOrd | MulOrdG | MulOrdL | MulAssoc | MulDist => 3,
            _ => return None,
        })
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    Ax1,
    Ax2,
    Ax3,
}

impl System {
    pub fn max_level(self) -> u8 {
        match self {
            System::Ax1 => 1,
            System::Ax2 => 2,
            System::Ax3 => 3,
        }
    }

    /// Whether proof lines may cite `s`. The level-2 variants are sound
    /// level-3 principles and are admitted there as derived schemata.
    pub fn admits(self, s: Schema) -> bool {
        use Schema::*;
        if Schema::POLY.contains(&s) || Schema::DERIVED.contains(&s) {
            return true;
        }
        match self {
            System::Ax1 => matches!(s, Bool | NonNeg | Add | Dist),
            System::Ax2 => matches!(s, Bool | NonNeg | Add2 | Dist | ProbRec2 | IncExc),
            System::Ax3 => matches!(s, Bool | NonNeg | Add | Dist | ProbRec | Add2 | ProbRec2 | IncExc),
        }
    }

    pub fn from_name(s: &str) -> Option<System> {
        match s.to_ascii_uppercase().as_str() {
            "AX1" | "1" => Some(System::Ax1),
            "AX2" | "2" => Some(System::Ax2),
            "AX3" | "3" => Some(System::Ax3),
            _ => None,
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AX{}", self.max_level())
    }
}

/// One step of a `ProbRec` chain: `X_i` switched between `from` and `to`
/// under `alpha` changes whether the next variable of the chain equals
/// `next_value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub alpha: Intervention,
    pub var: String,
    pub from: String,
    pub to: String,
    pub next_value: String,
}

/// Schema parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Params {
    /// `Def` for one variable under one intervention.
    Def { var: String, alpha: Intervention },
    Events(Vec<Event>),
    Chain(Vec<Link>),
    Add2 { alpha: Intervention, beta: Prop, gamma: Prop },
    /// `ProbRec2` over these variables, with domains from the signature.
    Vars(Vec<String>),
    /// `IncExc` for this joint value of its variables.
    Values(Intervention),
    Terms(Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomMatch {
    pub schema: Schema,
    pub bindings: Vec<(String, String)>,
}

fn conjunct_guard(count: usize) -> Result<()> {
    if count > 1 << 16 {
        return Err(Error::SizeGuard(alloc::format!("{count} schema conjuncts")));
    }
    Ok(())
}

fn zero() -> Term {
    Term::constant(int(0))
}

fn one() -> Term {
    Term::constant(int(1))
}

fn le(a: Term, b: Term) -> Formula {
    Formula::geq(b, a)
}

fn poly_template(s: Schema, t: &[Term]) -> Formula {
    use Schema::*;
    let t = |i: usize| t[i].clone();
    match s {
        OrdTot => Formula::geq(t(0), t(1)).or(Formula::geq(t(1), t(0))),
        OrdTrans => Formula::geq(t(0), t(1)).and(Formula::geq(t(1), t(2))).implies(Formula::geq(t(0), t(2))),
        NonDegen => Formula::equiv(zero(), one()).not(),
        AddComm => Formula::equiv(t(0).add(t(1)), t(1).add(t(0))),
        AddAssoc => Formula::equiv(t(0).add(t(1)).add(t(2)), t(0).add(t(1).add(t(2)))),
        Zero => Formula::equiv(t(0).add(zero()), t(0)),
        AddOrd => Formula::geq(t(0), t(1)).implies(Formula::geq(t(0).add(t(2)), t(1).add(t(2)))),
        MulOrdG => Formula::geq(t(0), t(1))
            .and(Formula::geq(t(2), zero()))
            .implies(Formula::geq(t(0).mul(t(2)), t(1).mul(t(2)))),
        MulOrdL => Formula::geq(t(0), t(1)).and(le(t(2), zero())).implies(le(t(0).mul(t(2)), t(1).mul(t(2)))),
        MulComm => Formula::equiv(t(0).mul(t(1)), t(1).mul(t(0))),
        MulAssoc => Formula::equiv(t(0).mul(t(1)).mul(t(2)), t(0).mul(t(1).mul(t(2)))),
        One => Formula::equiv(t(0).mul(one()), t(0)),
        MulDist => Formula::equiv(t(0).mul(t(1).add(t(2))), t(0).mul(t(1)).add(t(0).mul(t(2)))),
        ZeroMul => Formula::equiv(t(0).mul(zero()), zero()),
        NoZeroDiv => Formula::equiv(t(0).mul(t(1)), zero()).implies(Formula::equiv(t(0), zero()).or(Formula::equiv(t(1), zero()))),
        Neg => Formula::equiv(t(0).add(t(0).neg()), zero()),
        AddPos => Formula::geq(t(0), zero()).and(Formula::gt(t(1), zero())).implies(Formula::gt(t(0).add(t(1)), zero())),
        MulPos => Formula::gt(t(0), zero()).and(Formula::gt(t(1), zero())).implies(Formula::gt(t(0).mul(t(1)), zero())),
        NegAdd => Formula::equiv(t(0).add(t(1)).neg(), t(0).neg().add(t(1).neg())),
        NegMul => Formula::equiv(t(0).mul(t(1)).neg(), t(0).neg().mul(t(1))),
        NegNeg => Formula::equiv(t(0).neg().neg(), t(0)),
        OrdSq => Formula::geq(t(0).mul(t(0)), zero()),
        _ => unreachable!("not a polynomial schema"),
    }
}

fn event_template(s: Schema, e: &[Event]) -> Formula {
    let p = |i: usize| Term::p(e[i].clone());
    match s {
        Schema::NonNeg => Formula::geq(p(0), zero()),
        Schema::Add => Formula::equiv(
            Term::p(e[0].clone().and(e[1].clone())).add(Term::p(e[0].clone().and(e[1].clone().not()))),
            p(0),
        ),
        Schema::Dist => Formula::equiv(p(0), p(1)),
        _ => unreachable!("not an event schema"),
    }
}

fn event_arity(s: Schema) -> Option<usize> {
    match s {
        Schema::NonNeg => Some(1),
        Schema::Add | Schema::Dist => Some(2),
        _ => None,
    }
}

fn def_event(var: &str, alpha: &Intervention, domain: &[String]) -> Event {
    let mut parts = Vec::new();
    for (i, v) in domain.iter().enumerate() {
        for w in &domain[i + 1..] {
            parts.push(Prop::atom(var, v.as_str()).and(Prop::atom(var, w.as_str())).not());
        }
    }
    parts.push(Prop::disj(domain.iter().map(|v| Prop::atom(var, v.as_str()))));
    Event::cond(alpha.clone(), Prop::conj(parts))
}

fn with(alpha: &Intervention, var: &str, value: &str) -> Result<Intervention> {
    if alpha.contains(var) {
        return Err(Error::Schema(alloc::format!("the intervention already sets {var}")));
    }
    alpha.conjoin(&Intervention::single(var, value))
}

fn rec_event(link: &Link, next_var: &str) -> Result<Event> {
    let target = Prop::atom(next_var, link.next_value.as_str());
    Ok(Event::cond(with(&link.alpha, &link.var, &link.from)?, target.clone())
        .and(Event::cond(with(&link.alpha, &link.var, &link.to)?, target.not())))
}

fn is_zero_prob(e: Event) -> Formula {
    Formula::equiv(Term::p(e), zero())
}

fn prob_rec(chain: &[Link]) -> Result<Formula> {
    let n = chain.len();
    if n < 2 || chain[0].var == chain[n - 1].var {
        return Err(Error::Schema("a ProbRec chain needs two links and distinct end variables".into()));
    }
    if chain.iter().any(|l| l.from == l.to) {
        return Err(Error::Schema("each link must switch between two different values".into()));
    }
    let ev = |i: usize| rec_event(&chain[i], &chain[(i + 1) % n].var);
    let mut premises = Vec::new();
    for i in 0..n - 1 {
        premises.push(is_zero_prob(ev(i)?).not());
    }
    Ok(Formula::conj(premises).implies(is_zero_prob(ev(n - 1)?)))
}

fn add2(alpha: &Intervention, beta: &Prop, gamma: &Prop) -> Formula {
    let c = |p: Prop| Term::p(Event::cond(alpha.clone(), p));
    Formula::equiv(c(beta.clone().and(gamma.clone())).add(c(beta.clone().and(gamma.clone().not()))), c(beta.clone()))
}

fn subsets(n: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

fn pick(vals: &[(String, String)], mask: u32) -> Vec<(String, String)> {
    vals.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()).collect()
}

fn prop_of(pairs: &[(String, String)]) -> Prop {
    Prop::conj(pairs.iter().map(|(v, x)| Prop::atom(v.as_str(), x.as_str())))
}

fn intervention_of(pairs: &[(String, String)]) -> Intervention {
    Intervention::new(pairs.iter().cloned()).expect("distinct variables")
}

/// The conjuncts of `IncExc` for the joint value `w`, one per subset `Y`.
fn inc_exc_conjuncts(w: &Intervention) -> Result<Vec<Formula>> {
    let vals: Vec<(String, String)> = w.iter().map(|(v, x)| (v.to_string(), x.to_string())).collect();
    let n = vals.len();
    if n > 12 {
        return Err(Error::SizeGuard(alloc::format!("IncExc over {n} variables")));
    }
    let full = (1u32 << n) - 1;
    let mut out = Vec::new();
    for y in subsets(n) {
        let rest = full & !y;
        let mut terms = Vec::new();
        for x in subsets(n) {
            if x & !rest != 0 {
                continue;
            }
            let free = x | y;
            let t = Term::p(Event::cond(intervention_of(&pick(&vals, full & !free)), prop_of(&pick(&vals, free))));
            terms.push(if x.count_ones() % 2 == 1 { t.neg() } else { t });
        }
        out.push(Formula::geq(Term::sum(terms), zero()));
    }
    Ok(out)
}

fn domain<'a>(sig: Option<&'a Signature>, var: &str) -> Result<&'a [String]> {
    sig.ok_or_else(|| Error::Schema(alloc::format!("the domain of {var} needs a signature")))?
        .domain_of(var)
        .ok_or_else(|| Error::UnknownVariable(var.to_string()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn assignments(vars: &[String], doms: &[&[String]], mask: u32) -> Vec<Vec<(String, String)>> {
    let mut out = vec![Vec::new()];
    for (i, v) in vars.iter().enumerate() {
        if mask >> i & 1 == 0 {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                doms[i].iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push((v.clone(), x.clone()));
                    p
                })
            })
            .collect();
    }
    out
}

fn prob_rec2(vars: &[String], doms: &[&[String]]) -> Result<Formula> {
    let n = vars.len();
    if n > 5 {
        return Err(Error::SizeGuard(alloc::format!("ProbRec2 over {n} variables")));
    }
    let mut disjuncts = Vec::new();
    let mut count = 0usize;
    for order in permutations(n) {
        let rank = |i: usize| order.iter().position(|&o| o == i).expect("permutation");
        let mut conjuncts = Vec::new();
        for x in subsets(n) {
            for y in subsets(n).filter(|&y| y != 0 && y & x == 0) {
                for z in subsets(n).filter(|&z| z != 0 && z & (x | y) == 0) {
                    let before = (0..n).filter(|&i| y >> i & 1 == 1).all(|i| (0..n).filter(|&j| z >> j & 1 == 1).all(|j| rank(i) < rank(j)));
                    if !before {
                        continue;
                    }
                    for xv in assignments(vars, doms, x) {
                        for yv in assignments(vars, doms, y) {
                            for zv in assignments(vars, doms, z) {
                                count += 1;
                                conjunct_guard(count)?;
                                let mut xz = xv.clone();
                                xz.extend(zv.iter().cloned());
                                let ty = prop_of(&yv);
                                conjuncts.push(Formula::equiv(
                                    Term::p(Event::cond(intervention_of(&xv), ty.clone())),
                                    Term::p(Event::cond(intervention_of(&xz), ty)),
                                ));
                            }
                        }
                    }
                }
            }
        }
        disjuncts.push(Formula::conj(conjuncts));
    }
    Ok(Formula::disj(disjuncts))
}

/// Fully expanded, desugared instance of a schema. `Def` yields a base
/// formula; everything else a probabilistic formula.
pub fn generate_schema(schema: Schema, params: &Params, sig: Option<&Signature>) -> Result<Parsed> {
    let bad = || Error::Schema(alloc::format!("wrong parameters for {schema}"));
    let f = match (schema, params) {
        (Schema::Def, Params::Def { var, alpha }) => return Ok(Parsed::Event(def_event(var, alpha, domain(sig, var)?))),
        (s, Params::Terms(t)) if s.arity() == Some(t.len()) => poly_template(s, t),
        (s, Params::Events(e)) if event_arity(s) == Some(e.len()) => event_template(s, e),
        (Schema::ProbRec, Params::Chain(c)) => prob_rec(c)?,
        (Schema::Add2, Params::Add2 { alpha, beta, gamma }) => add2(alpha, beta, gamma),
        (Schema::ProbRec2, Params::Vars(vars)) => {
            let doms: Vec<&[String]> = vars.iter().map(|v| domain(sig, v)).collect::<Result<_>>()?;
            prob_rec2(vars, &doms)?
        }
        (Schema::IncExc, Params::Values(w)) => Formula::conj(inc_exc_conjuncts(w)?),
        _ => return Err(bad()),
    };
    Ok(Parsed::Formula(desugar(&f)))
}

const META: &str = "?";

fn meta_term(k: usize) -> Term {
    Term::p(meta_event(k))
}

fn meta_event(k: usize) -> Event {
    Event::atom(META, alloc::format!("{k}"))
}

fn meta_index(e: &Event) -> Option<usize> {
    match e {
        Event::Cond(a, Prop::Atom(Atom { var, value })) if a.is_top() && var == META => value.parse().ok(),
        _ => None,
    }
}

#[derive(Default)]
struct Bindings {
    terms: BTreeMap<usize, Term>,
    events: BTreeMap<usize, Event>,
}

fn unify_event(p: &Event, t: &Event, b: &mut Bindings) -> bool {
    if let Some(k) = meta_index(p) {
        return match b.events.get(&k) {
            Some(prev) => prev == t,
            None => {
                b.events.insert(k, t.clone());
                true
            }
        };
    }
    // An intervention distributes over the connectives of its formula, so
    // `[α]¬q` also counts as `¬[α]q` and `[α](q ∧ r)` as `[α]q ∧ [α]r`.
    match (p, t) {
        (Event::Not(x), Event::Not(y)) => unify_event(x, y, b),
        (Event::Not(x), Event::Cond(a, Prop::Not(q))) => unify_event(x, &Event::cond(a.clone(), (**q).clone()), b),
        (Event::And(a, c), Event::And(x, y)) => unify_event(a, x, b) && unify_event(c, y, b),
        (Event::And(a, c), Event::Cond(alpha, Prop::And(q, r))) => {
            unify_event(a, &Event::cond(alpha.clone(), (**q).clone()), b)
                && unify_event(c, &Event::cond(alpha.clone(), (**r).clone()), b)
        }
        _ => p == t,
    }
}

fn unify_term(p: &Term, t: &Term, b: &mut Bindings, term_meta: bool) -> bool {
    match (p, t) {
        (Term::Prob(e), _) if term_meta && meta_index(e).is_some() => {
            let k = meta_index(e).expect("checked");
            match b.terms.get(&k) {
                Some(prev) => prev == t,
                None => {
                    b.terms.insert(k, t.clone());
                    true
                }
            }
        }
        (Term::Prob(e), Term::Prob(x)) => unify_event(e, x, b),
        (Term::Add(a, c), Term::Add(x, y)) | (Term::Mul(a, c), Term::Mul(x, y)) => {
            unify_term(a, x, b, term_meta) && unify_term(c, y, b, term_meta)
        }
        (Term::Neg(a), Term::Neg(x)) => unify_term(a, x, b, term_meta),
        _ => p == t,
    }
}

fn unify(p: &Formula, t: &Formula, b: &mut Bindings, term_meta: bool) -> bool {
    match (p, t) {
        (Formula::Geq(a, c), Formula::Geq(x, y)) => unify_term(a, x, b, term_meta) && unify_term(c, y, b, term_meta),
        (Formula::Not(a), Formula::Not(x)) => unify(a, x, b, term_meta),
        (Formula::And(a, c), Formula::And(x, y)) => unify(a, x, b, term_meta) && unify(c, y, b, term_meta),
        _ => false,
    }
}

/// Skeleton of a desugared formula: `Geq` atoms under `Not` and `And`.
fn geq_atoms<'a>(f: &'a Formula, out: &mut Vec<(&'a Term, &'a Term)>) {
    match f {
        Formula::Geq(a, b) => {
            if !out.iter().any(|(x, y)| *x == a && *y == b) {
                out.push((a, b));
            }
        }
        Formula::Not(x) => geq_atoms(x, out),
        Formula::And(x, y) => {
            geq_atoms(x, out);
            geq_atoms(y, out);
        }
        _ => unreachable!("desugared"),
    }
}

fn eval_skeleton(f: &Formula, val: &dyn Fn(&Term, &Term) -> bool) -> bool {
    match f {
        Formula::Geq(a, b) => val(a, b),
        Formula::Not(x) => !eval_skeleton(x, val),
        Formula::And(x, y) => eval_skeleton(x, val) && eval_skeleton(y, val),
        _ => unreachable!("desugared"),
    }
}

const MAX_TABLE_ATOMS: usize = 20;

/// Whether `f` is a propositional tautology over its comparison atoms.
pub fn is_tautology(f: &Formula) -> Result<bool> {
    let d = desugar(f);
    let mut atoms = Vec::new();
    geq_atoms(&d, &mut atoms);
    if atoms.len() > MAX_TABLE_ATOMS {
        return Err(Error::SizeGuard(alloc::format!("{} atoms in a truth table", atoms.len())));
    }
    for mask in 0u64..(1 << atoms.len()) {
        let val = |a: &Term, b: &Term| {
            let i = atoms.iter().position(|(x, y)| *x == a && *y == b).expect("collected");
            mask >> i & 1 == 1
        };
        if !eval_skeleton(&d, &val) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn describe_bindings(b: &Bindings) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = b.terms.iter().map(|(k, t)| (alloc::format!("t{}", k + 1), t.to_string())).collect();
    out.extend(b.events.iter().map(|(k, e)| (alloc::format!("e{}", k + 1), e.to_string())));
    out
}

fn event_pair(f: &Formula) -> Option<(&Event, &Event)> {
    match f {
        Formula::And(l, r) => match (&**l, &**r) {
            (Formula::Geq(Term::Prob(a), Term::Prob(b)), Formula::Geq(Term::Prob(c), Term::Prob(d))) if a == d && b == c => Some((a, b)),
            _ => None,
        },
        _ => None,
    }
}

fn link_of(e: &Event) -> Option<(Link, String)> {
    let Event::And(l, r) = e else { return None };
    let (Event::Cond(a1, Prop::Atom(t1)), Event::Cond(a2, Prop::Not(t2))) = (&**l, &**r) else { return None };
    if **t2 != Prop::Atom(t1.clone()) {
        return None;
    }
    let diff: Vec<&str> = a1.vars().filter(|v| a2.get(v) != a1.get(v)).collect();
    let [var] = diff.as_slice() else { return None };
    let alpha = Intervention::new(a1.iter().filter(|(v, _)| v != var)).ok()?;
    let link = Link {
        alpha,
        var: var.to_string(),
        from: a1.get(var)?.to_string(),
        to: a2.get(var)?.to_string(),
        next_value: t1.value.clone(),
    };
    Some((link, t1.var.clone()))
}

/// `¬(P(ψ) ≡ 0)` conjuncts and the final `P(ψ) ≡ 0` of a desugared
/// implication.
fn prob_rec_events(f: &Formula) -> Option<Vec<Event>> {
    let Formula::Not(inner) = f else { return None };
    let Formula::And(prem, concl) = &**inner else { return None };
    let Formula::Not(concl) = &**concl else { return None };
    let zero_of = |g: &Formula| -> Option<Event> {
        match g {
            Formula::And(l, _) => match &**l {
                Formula::Geq(Term::Prob(e), _) => Some(e.clone()),
                _ => None,
            },
            _ => None,
        }
    };
    let mut premises = Vec::new();
    let mut cur: &Formula = prem;
    loop {
        match cur {
            Formula::And(rest, last) if matches!(&**last, Formula::Not(_)) => {
                let Formula::Not(z) = &**last else { unreachable!() };
                premises.push(zero_of(z)?);
                cur = rest;
            }
            Formula::Not(z) => {
                premises.push(zero_of(z)?);
                break;
            }
            _ => return None,
        }
    }
    premises.reverse();
    premises.push(zero_of(concl)?);
    Some(premises)
}

fn parsed_eq(p: &Parsed, f: &Formula) -> bool {
    matches!(p, Parsed::Formula(g) if g == f)
}

/// Every schema that the formula instantiates, with its bindings. The
/// input is desugared first. `Dist` matches only when the two base
/// formulas are equivalent; `Bool` matches propositional tautologies over
/// the comparison atoms.
pub fn match_axiom(input: &Parsed, sig: Option<&Signature>, limits: &Limits) -> Result<Vec<AxiomMatch>> {
    let f = match input {
        Parsed::Event(e) => return Ok(match_def(e, sig).into_iter().collect()),
        Parsed::Formula(f) => desugar(f),
    };
    let mut out = Vec::new();
    for &s in Schema::POLY.iter().chain(Schema::DERIVED) {
        let metas: Vec<Term> = (0..s.arity().expect("polynomial")).map(meta_term).collect();
        let pat = desugar(&poly_template(s, &metas));
        let mut b = Bindings::default();
        if unify(&pat, &f, &mut b, true) {
            out.push(AxiomMatch { schema: s, bindings: describe_bindings(&b) });
        }
    }
    for s in [Schema::NonNeg, Schema::Add] {
        let metas: Vec<Event> = (0..event_arity(s).expect("event schema")).map(meta_event).collect();
        let pat = desugar(&event_template(s, &metas));
        let mut b = Bindings::default();
        if unify(&pat, &f, &mut b, false) {
            out.push(AxiomMatch { schema: s, bindings: describe_bindings(&b) });
        }
    }
    if let Some((a, b)) = event_pair(&f) {
        if base_valid(a, b, sig, limits)?.is_none() {
            out.push(AxiomMatch { schema: Schema::Dist, bindings: vec![("e1".into(), a.to_string()), ("e2".into(), b.to_string())] });
        }
    }
    if let Some(m) = match_add2(&f) {
        out.push(m);
    }
    if let Some(m) = match_prob_rec(&f) {
        out.push(m);
    }
    if let Some(m) = match_inc_exc(&f)? {
        out.push(m);
    }
    if let Some(m) = match_prob_rec2(&f, sig)? {
        out.push(m);
    }
    // A truth table past the size guard only matters when nothing else
    // matched; large ProbRec2 or IncExc instances routinely exceed it.
    match is_tautology(&f) {
        Ok(true) => out.push(AxiomMatch { schema: Schema::Bool, bindings: Vec::new() }),
        Ok(false) => {}
        Err(Error::SizeGuard(_)) if !out.is_empty() => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn match_def(e: &Event, sig: Option<&Signature>) -> Option<AxiomMatch> {
    let mut first = None;
    e.for_each_cond(&mut |a, p| {
        if first.is_none() {
            let mut atom = None;
            p.for_each_atom(&mut |x| {
                atom.get_or_insert_with(|| x.clone());
            });
            first = atom.map(|x| (a.clone(), x.var));
        }
    });
    let (alpha, var) = first?;
    let dom: Vec<String> = match sig.and_then(|s| s.domain_of(&var)) {
        Some(d) => d.to_vec(),
        None => {
            let mut vals: Vec<String> = Vec::new();
            e.for_each_cond(&mut |_, p| {
                p.for_each_atom(&mut |x| {
                    if x.var == var && !vals.contains(&x.value) {
                        vals.push(x.value.clone());
                    }
                })
            });
            vals
        }
    };
    (def_event(&var, &alpha, &dom) == *e)
        .then(|| AxiomMatch { schema: Schema::Def, bindings: vec![("V".into(), var), ("alpha".into(), alpha.to_string())] })
}

fn match_add2(f: &Formula) -> Option<AxiomMatch> {
    let Formula::And(l, _) = f else { return None };
    let Formula::Geq(Term::Add(x, _), _) = &**l else { return None };
    let Term::Prob(Event::Cond(alpha, Prop::And(beta, gamma))) = &**x else { return None };
    parsed_eq(&Parsed::Formula(desugar(&add2(alpha, beta, gamma))), f).then(|| AxiomMatch {
        schema: Schema::Add2,
        bindings: vec![("alpha".into(), alpha.to_string()), ("beta".into(), beta.to_string()), ("gamma".into(), gamma.to_string())],
    })
}

fn match_prob_rec(f: &Formula) -> Option<AxiomMatch> {
    let events = prob_rec_events(f)?;
    let parsed: Vec<(Link, String)> = events.iter().map(link_of).collect::<Option<_>>()?;
    let n = parsed.len();
    if (0..n).any(|i| parsed[i].1 != parsed[(i + 1) % n].0.var) {
        return None;
    }
    let chain: Vec<Link> = parsed.into_iter().map(|(l, _)| l).collect();
    let regenerated = desugar(&prob_rec(&chain).ok()?);
    (regenerated == *f).then(|| AxiomMatch {
        schema: Schema::ProbRec,
        bindings: vec![("chain".into(), chain.iter().map(|l| l.var.as_str()).collect::<Vec<_>>().join(" -> "))],
    })
}

fn mentioned_values(f: &Formula) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for a in f.atoms() {
        if !out.iter().any(|(v, _)| *v == a.var) {
            out.push((a.var, a.value));
        }
    }
    out
}

fn match_inc_exc(f: &Formula) -> Result<Option<AxiomMatch>> {
    let vals = mentioned_values(f);
    if vals.is_empty() || vals.len() > 8 || f.atoms().len() != vals.len() {
        return Ok(None);
    }
    let w = intervention_of(&vals);
    let conjuncts: Vec<Formula> = inc_exc_conjuncts(&w)?.iter().map(desugar).collect();
    let full = desugar(&Formula::conj(conjuncts.clone()));
    Ok((full == *f || conjuncts.contains(f)).then(|| AxiomMatch { schema: Schema::IncExc, bindings: vec![("w".into(), w.to_string())] }))
}

fn match_prob_rec2(f: &Formula, sig: Option<&Signature>) -> Result<Option<AxiomMatch>> {
    let vars = f.variables();
    if vars.is_empty() || vars.len() > 3 || !matches!(f, Formula::Not(_)) {
        return Ok(None);
    }
    let owned: Vec<Vec<String>> = match sig {
        Some(s) => vars.iter().map(|v| s.domain_of(v).map(<[String]>::to_vec).ok_or_else(|| Error::UnknownVariable(v.clone()))).collect::<Result<_>>()?,
        None => vars
            .iter()
            .map(|v| {
                let mut d: Vec<String> = f.atoms().into_iter().filter(|a| a.var == *v).map(|a| a.value).collect();
                d.dedup();
                d
            })
            .collect(),
    };
    let doms: Vec<&[String]> = owned.iter().map(Vec::as_slice).collect();
    let g = desugar(&prob_rec2(&vars, &doms)?);
    Ok((g == *f).then(|| AxiomMatch { schema: Schema::ProbRec2, bindings: vec![("W".into(), vars.join(","))] }))
}

/// A cited line or assumption, numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ref {
    Line(usize),
    Assumption(usize),
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ref::Line(n) => write!(f, "{n}"),
            Ref::Assumption(n) => write!(f, "a{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(Schema),
    Assumption(usize),
    /// The first reference is `φ`, the second `φ → ψ`.
    MP(Ref, Ref),
    PolyNorm(Vec<Ref>),
    /// A line, and an equation whose multiples may be added to it.
    Subst(Ref, Ref),
    DistStep(Ref, Event, Event),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofVerdict {
    Accepted,
    Rejected { line: usize, reason: String },
}

/// Polynomial form of every comparison atom, with positive-multiple,
/// monomial-multiple and modular relations between them.
struct PolyTable<'a> {
    atoms: Vec<(&'a Term, &'a Term)>,
    class: Vec<usize>,
    fixed: Vec<Option<bool>>,
    implies: Vec<(usize, usize)>,
}

/// Polynomial normal form in which `P([α]⊤)` is one and `P([α]⊥)` zero.
fn poly_of(t: &Term, interner: &mut Interner) -> Poly {
    match t {
        Term::Prob(Event::Cond(_, Prop::Top)) => Poly::one(),
        Term::Prob(Event::Cond(_, Prop::Bot)) => Poly::zero(),
        Term::Add(a, b) => poly_of(a, interner) + poly_of(b, interner),
        Term::Mul(a, b) => poly_of(a, interner) * poly_of(b, interner),
        Term::Neg(a) => -poly_of(a, interner),
        other => normalize(other, interner),
    }
}

fn positive_multiple(a: &Poly, b: &Poly) -> bool {
    match (a.leading(), b.leading()) {
        (Some((ma, ca)), Some((mb, cb))) if ma == mb => {
            let c = cb / ca;
            c.is_positive() && a.scale(&c) == *b
        }
        _ => false,
    }
}

fn monomial_multiple(a: &Poly, b: &Poly) -> bool {
    if a.is_zero() {
        return false;
    }
    match b.div_exact(a) {
        Some(q) => q.len() == 1 && q.terms().all(|(_, c)| c.is_positive()),
        None => false,
    }
}

impl<'a> PolyTable<'a> {
    fn new(formulas: &[&'a Formula], modulo: Option<&Formula>) -> Result<Self> {
        let mut atoms = Vec::new();
        for f in formulas {
            geq_atoms(f, &mut atoms);
        }
        let mut interner = Interner::new();
        let polys: Vec<Poly> = atoms.iter().map(|(a, b)| poly_of(a, &mut interner) - poly_of(b, &mut interner)).collect();
        let e = modulo.map(|m| match m {
            Formula::And(l, _) => match &**l {
                Formula::Geq(a, b) => poly_of(a, &mut interner) - poly_of(b, &mut interner),
                _ => unreachable!("checked equation"),
            },
            _ => unreachable!("checked equation"),
        });
        let n = atoms.len();
        let mut class: Vec<usize> = (0..n).collect();
        let find = |class: &Vec<usize>, mut i: usize| {
            while class[i] != i {
                i = class[i];
            }
            i
        };
        let mut implies = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let same = positive_multiple(&polys[i], &polys[j])
                    || e.as_ref().is_some_and(|e| !e.is_zero() && (&polys[j] - &polys[i]).div_exact(e).is_some());
                if same {
                    let (ri, rj) = (find(&class, i), find(&class, j));
                    if ri != rj {
                        class[rj] = ri;
                    }
                } else if monomial_multiple(&polys[i], &polys[j]) {
                    implies.push((i, j));
                }
            }
        }
        let class: Vec<usize> = (0..n).map(|i| find(&class, i)).collect();
        let fixed = polys.iter().map(|p| p.as_constant().map(|c| !c.is_negative())).collect();
        Ok(PolyTable { atoms, class, fixed, implies })
    }

    /// Whether every assignment consistent with the relations that makes
    /// all premises true makes the target true.
    fn entails(&self, premises: &[&Formula], target: &Formula) -> Result<bool> {
        let reps: Vec<usize> = (0..self.atoms.len()).filter(|&i| self.class[i] == i).collect();
        if reps.len() > MAX_TABLE_ATOMS {
            return Err(Error::SizeGuard(alloc::format!("{} atoms in a truth table", reps.len())));
        }
        'assign: for mask in 0u64..(1 << reps.len()) {
            let value = |i: usize| mask >> reps.iter().position(|&r| r == self.class[i]).expect("representative") & 1 == 1;
            for i in 0..self.atoms.len() {
                if self.fixed[i].is_some_and(|v| v != value(i)) {
                    continue 'assign;
                }
            }
            if self.implies.iter().any(|&(a, b)| value(a) && !value(b)) {
                continue;
            }
            let val = |a: &Term, b: &Term| {
                let i = self.atoms.iter().position(|(x, y)| *x == a && *y == b).expect("collected");
                value(i)
            };
            if premises.iter().all(|p| eval_skeleton(p, &val)) && !eval_skeleton(target, &val) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn is_equation(f: &Formula) -> bool {
    matches!(f, Formula::And(l, r) if matches!((&**l, &**r), (Formula::Geq(a, b), Formula::Geq(c, d)) if a == d && b == c))
}

fn replace_event(f: &Formula, from: &Event, to: &Event) -> Formula {
    fn term(t: &Term, from: &Event, to: &Event) -> Term {
        match t {
            Term::Prob(e) if e == from => Term::Prob(to.clone()),
            Term::Add(a, b) => term(a, from, to).add(term(b, from, to)),
            Term::Mul(a, b) => term(a, from, to).mul(term(b, from, to)),
            Term::Neg(a) => term(a, from, to).neg(),
            other => other.clone(),
        }
    }
    match f {
        Formula::Geq(a, b) => Formula::geq(term(a, from, to), term(b, from, to)),
        Formula::Not(x) => replace_event(x, from, to).not(),
        Formula::And(x, y) => replace_event(x, from, to).and(replace_event(y, from, to)),
        _ => unreachable!("desugared"),
    }
}

/// Checks every line of a proof. Each line must lie in the system's
/// language and be justified by earlier lines or assumptions.
pub fn check_proof(
    lines: &[ProofLine],
    assumptions: &[Formula],
    system: System,
    sig: Option<&Signature>,
    limits: &Limits,
) -> Result<ProofVerdict> {
    let assumed: Vec<Formula> = assumptions.iter().map(desugar).collect();
    let mut done: Vec<Formula> = Vec::with_capacity(lines.len());
    for (k, line) in lines.iter().enumerate() {
        let n = k + 1;
        let reject = |reason: String| Ok(ProofVerdict::Rejected { line: n, reason });
        let level = line.formula.level();
        if level > system.max_level() {
            return reject(alloc::format!("level {level} is outside {system}"));
        }
        let cur = desugar(&line.formula);
        let get = |r: &Ref| -> core::result::Result<&Formula, String> {
            match *r {
                Ref::Line(i) if i >= 1 && i < n => Ok(&done[i - 1]),
                Ref::Assumption(i) if i >= 1 && i <= assumed.len() => Ok(&assumed[i - 1]),
                _ => Err(alloc::format!("reference {r} is not an earlier line or an assumption")),
            }
        };
        let verdict: core::result::Result<(), String> = (|| match &line.justification {
            Justification::Axiom(s) => {
                if !system.admits(*s) {
                    return Err(alloc::format!("{s} is not a schema of {system}"));
                }
                let found = match_axiom(&Parsed::Formula(cur.clone()), sig, limits).map_err(|e| e.to_string())?;
                if found.iter().any(|m| m.schema == *s) {
                    Ok(())
                } else if *s == Schema::Dist {
                    if let Some((a, b)) = event_pair(&cur) {
                        if let Ok(Some(cx)) = base_valid(a, b, sig, limits) {
                            return Err(alloc::format!(
                                "the base formulas differ at atom {} under order {}",
                                cx.atom,
                                cx.order.join("<")
                            ));
                        }
                    }
                    Err("not an instance of Dist".into())
                } else {
                    Err(alloc::format!("not an instance of {s}"))
                }
            }
            Justification::Assumption(i) => match assumed.get(i.wrapping_sub(1)) {
                Some(a) if *a == cur => Ok(()),
                Some(_) => Err(alloc::format!("differs from assumption {i}")),
                None => Err(alloc::format!("there is no assumption {i}")),
            },
            Justification::MP(a, b) => {
                let (a, b) = (get(a)?, get(b)?);
                if *b == a.clone().and(cur.clone().not()).not() {
                    Ok(())
                } else {
                    Err("the second premise is not an implication from the first to this line".into())
                }
            }
            Justification::PolyNorm(refs) => {
                let prem: Vec<&Formula> = refs.iter().map(get).collect::<core::result::Result<_, _>>()?;
                let mut all = prem.clone();
                all.push(&cur);
                let table = PolyTable::new(&all, None).map_err(|e| e.to_string())?;
                match table.entails(&prem, &cur) {
                    Ok(true) => Ok(()),
                    Ok(false) => Err("does not follow by polynomial normalization".into()),
                    Err(e) => Err(e.to_string()),
                }
            }
            Justification::Subst(a, e) => {
                let (a, e) = (get(a)?, get(e)?);
                if !is_equation(e) {
                    return Err("the cited substitution is not an equation".into());
                }
                let table = PolyTable::new(&[a, e, &cur], Some(e)).map_err(|x| x.to_string())?;
                match table.entails(&[a, e], &cur) {
                    Ok(true) => Ok(()),
                    Ok(false) => Err("does not differ from the cited line by a multiple of the equation".into()),
                    Err(x) => Err(x.to_string()),
                }
            }
            Justification::DistStep(a, from, to) => {
                let a = get(a)?;
                if let Some(cx) = base_valid(from, to, sig, limits).map_err(|e| e.to_string())? {
                    return Err(alloc::format!(
                        "{from} and {to} are not equivalent: atom {} under order {}",
                        cx.atom,
                        cx.order.join("<")
                    ));
                }
                let replaced = replace_event(a, from, to);
                let table = PolyTable::new(&[&replaced, &cur], None).map_err(|e| e.to_string())?;
                match table.entails(&[&replaced], &cur) {
                    Ok(true) => Ok(()),
                    Ok(false) => Err("does not follow by replacing the equivalent base formulas".into()),
                    Err(e) => Err(e.to_string()),
                }
            }
        })();
        if let Err(reason) = verdict {
            return reject(reason);
        }
        done.push(cur);
    }
    Ok(ProofVerdict::Accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_event, parse_formula};

    fn f(s: &str) -> Formula {
        parse_formula(s, None).unwrap()
    }

    fn schemas(s: &str, sig: Option<&Signature>) -> Vec<Schema> {
        match_axiom(&Parsed::Formula(f(s)), sig, &Limits::default()).unwrap().into_iter().map(|m| m.schema).collect()
    }

    #[test]
    fn spec_examples() {
        assert!(schemas("P([X=1]Y=1) >= 0", None).contains(&Schema::NonNeg));
        assert!(schemas("~(0 == 1)", None).contains(&Schema::NonDegen));
        let sig = Signature::binary(&["X"]);
        let Parsed::Event(def) = generate_schema(Schema::Def, &Params::Def { var: "X".into(), alpha: Intervention::top() }, Some(&sig)).unwrap()
        else {
            panic!()
        };
        assert_eq!(def, parse_event("~(X=0 & X=1) & ~(~X=0 & ~X=1)", None).unwrap());
        let m = match_axiom(&Parsed::Event(def), Some(&sig), &Limits::default()).unwrap();
        assert_eq!(m[0].schema, Schema::Def);
    }

    #[test]
    fn inc_exc_contains_sample_conjunct() {
        let w = Intervention::new([("X", "1"), ("Y", "1"), ("Z", "1")]).unwrap();
        let Parsed::Formula(g) = generate_schema(Schema::IncExc, &Params::Values(w), None).unwrap() else { panic!() };
        let sample = desugar(&f("P([X=1, Y=1]Z=1) - P([Y=1](X=1 & Z=1)) - P([X=1](Y=1 & Z=1)) + P(X=1 & Y=1 & Z=1) >= 0"));
        let mut atoms = Vec::new();
        geq_atoms(&g, &mut atoms);
        assert_eq!(atoms.len(), 8);
        assert!(atoms.iter().any(|(a, b)| Formula::geq((*a).clone(), (*b).clone()) == sample));
        assert!(schemas("P([X=1, Y=1]Z=1) - P([Y=1](X=1 & Z=1)) - P([X=1](Y=1 & Z=1)) + P(X=1 & Y=1 & Z=1) >= 0", None)
            .contains(&Schema::IncExc));
    }

    #[test]
    fn prob_rec2_two_orders() {
        let sig = Signature::binary(&["X", "Y"]);
        let Parsed::Formula(g) = generate_schema(Schema::ProbRec2, &Params::Vars(vec!["X".into(), "Y".into()]), Some(&sig)).unwrap() else {
            panic!()
        };
        // Y = {X}, Z = {Y} in one order and the reverse in the other; each
        // with X empty and 4 value combinations.
        let s = g.to_string();
        assert!(s.contains("P([Y=0]X=0)"));
        assert!(s.contains("P([X=1]Y=0)"));
        let m = match_axiom(&Parsed::Formula(g), Some(&sig), &Limits::default()).unwrap();
        assert!(m.iter().any(|m| m.schema == Schema::ProbRec2));
    }

    #[test]
    fn truth_table_guard_does_not_hide_other_matches() {
        let sig = Signature::uniform(&["X", "Y"], 3);
        let inst = generate_schema(Schema::ProbRec2, &Params::Vars(vec!["X".into(), "Y".into()]), Some(&sig)).unwrap();
        let m = match_axiom(&inst, Some(&sig), &Limits::default()).unwrap();
        assert_eq!(m.iter().map(|m| m.schema).collect::<Vec<_>>(), vec![Schema::ProbRec2]);
    }

    #[test]
    fn add2_template() {
        let alpha = Intervention::single("X", "1");
        let Parsed::Formula(g) =
            generate_schema(Schema::Add2, &Params::Add2 { alpha, beta: Prop::atom("Y", "1"), gamma: Prop::atom("Z", "0") }, None).unwrap()
        else {
            panic!()
        };
        assert_eq!(g, desugar(&f("P([X=1](Y=1 & Z=0)) + P([X=1](Y=1 & Z!=0)) == P([X=1]Y=1)")));
        assert!(match_axiom(&Parsed::Formula(g), None, &Limits::default()).unwrap().iter().any(|m| m.schema == Schema::Add2));
    }

    #[test]
    fn prob_rec_round_trip() {
        let link = |v: &str, next: &str| Link { alpha: Intervention::top(), var: v.into(), from: "0".into(), to: "1".into(), next_value: next.into() };
        let chain = vec![link("X", "1"), link("Y", "1")];
        let Parsed::Formula(g) = generate_schema(Schema::ProbRec, &Params::Chain(chain), None).unwrap() else { panic!() };
        let m = match_axiom(&Parsed::Formula(g), None, &Limits::default()).unwrap();
        assert!(m.iter().any(|m| m.schema == Schema::ProbRec), "{m:?}");
        let bad = vec![link("X", "1"), link("X", "1")];
        assert!(generate_schema(Schema::ProbRec, &Params::Chain(bad), None).is_err());
    }

    #[test]
    fn poly_and_bool() {
        assert!(schemas("P(X=1) + P(Y=1) == P(Y=1) + P(X=1)", None).contains(&Schema::AddComm));
        assert!(schemas("P(X=1) >= P(Y=1) | P(Y=1) >= P(X=1)", None).contains(&Schema::OrdTot));
        assert!(schemas("P(X=1) * P(X=1) >= 0", None).contains(&Schema::OrdSq));
        assert!(schemas("P(X=1) >= 1/2 | ~(P(X=1) >= 1/2)", None).contains(&Schema::Bool));
        assert!(!schemas("P(X=1) >= 1/2", None).contains(&Schema::Bool));
    }

    #[test]
    fn dist_requires_equivalence() {
        let sig = Signature::binary(&["X"]);
        assert!(schemas("P(X!=1) == P(X=0)", Some(&sig)).contains(&Schema::Dist));
        assert!(!schemas("P(X!=1) == P(X=0)", None).contains(&Schema::Dist));
    }

    fn line(s: &str, j: Justification) -> ProofLine {
        ProofLine { formula: f(s), justification: j }
    }

    #[test]
    fn small_proofs() {
        let sig = Signature::binary(&["X", "Y"]);
        let lim = Limits::default();
        let assumptions = vec![f("P(X=1) >= 1/2"), f("P(X=1) >= 1/2 -> P(Y=1) >= 1/3")];
        let ok = vec![
            line("P(X=1) >= 1/2", Justification::Assumption(1)),
            line("P(Y=1) >= 1/3", Justification::MP(Ref::Line(1), Ref::Assumption(2))),
            line("3 * P(Y=1) >= 1", Justification::PolyNorm(vec![Ref::Line(2)])),
        ];
        assert_eq!(check_proof(&ok, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(), ProofVerdict::Accepted);
        let bad = vec![
            line("P(Y=1) >= 1/2", Justification::Assumption(1)),
        ];
        assert!(matches!(check_proof(&bad, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(), ProofVerdict::Rejected { line: 1, .. }));
        let mismatched = vec![
            line("P(Y=1) >= 1/2", Justification::Axiom(Schema::Bool)),
            line("P(Y=1) >= 1/3", Justification::MP(Ref::Assumption(1), Ref::Assumption(2))),
            line("P(Y=0) >= 1/3", Justification::MP(Ref::Line(1), Ref::Assumption(2))),
        ];
        assert!(matches!(
            check_proof(&mismatched, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(),
            ProofVerdict::Rejected { line: 1, .. }
        ));
        let mp_bad = vec![line("P(Y=0) >= 1/3", Justification::MP(Ref::Assumption(1), Ref::Assumption(2)))];
        assert!(matches!(check_proof(&mp_bad, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(), ProofVerdict::Rejected { line: 1, .. }));
    }

    #[test]
    fn dist_step_and_subst() {
        let sig = Signature::binary(&["X", "Y"]);
        let lim = Limits::default();
        let assumptions = vec![f("P(X=1) == P(Y=1)")];
        let e = |s: &str| parse_event(s, None).unwrap();
        let ok = vec![
            line("P(X=1 & Y=1) + P(X=1 & ~Y=1) == P(X=1)", Justification::Axiom(Schema::Add)),
            line("P(X=1 & Y=1) + P(X=1 & Y=0) == P(X=1)", Justification::DistStep(Ref::Line(1), e("X=1 & ~Y=1"), e("X=1 & Y=0"))),
            line("P(X=1 & Y=1) + P(X=1 & Y=0) == P(Y=1)", Justification::Subst(Ref::Line(2), Ref::Assumption(1))),
            line("2 * P(Y=1) == 2 * P(X=1 & Y=1) + 2 * P(X=1 & Y=0)", Justification::PolyNorm(vec![Ref::Line(3)])),
        ];
        assert_eq!(check_proof(&ok, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(), ProofVerdict::Accepted);
        let bad = vec![
            line("P(X=1 & Y=1) + P(X=1 & ~Y=1) == P(X=1)", Justification::Axiom(Schema::Add)),
            line("P(X=1 & Y=1) + P(Y=0) == P(X=1)", Justification::DistStep(Ref::Line(1), e("X=1 & ~Y=1"), e("Y=0"))),
        ];
        let ProofVerdict::Rejected { line, reason } = check_proof(&bad, &assumptions, System::Ax1, Some(&sig), &lim).unwrap() else {
            panic!()
        };
        assert_eq!(line, 2);
        assert!(reason.contains("atom"), "{reason}");
    }

    #[test]
    fn monomial_multiples_only_one_way() {
        let sig = Signature::binary(&["X", "Y"]);
        let lim = Limits::default();
        let assumptions = vec![f("P(X=1) == P(Y=1)")];
        let up = vec![line("P(X=1) * P(Y=0) == P(Y=1) * P(Y=0)", Justification::PolyNorm(vec![Ref::Assumption(1)]))];
        assert_eq!(check_proof(&up, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(), ProofVerdict::Accepted);
        let assumptions = vec![f("P(X=1) * P(Y=0) == P(Y=1) * P(Y=0)")];
        let down = vec![line("P(X=1) == P(Y=1)", Justification::PolyNorm(vec![Ref::Assumption(1)]))];
        assert!(matches!(check_proof(&down, &assumptions, System::Ax1, Some(&sig), &lim).unwrap(), ProofVerdict::Rejected { .. }));
    }

    #[test]
    fn front_door_derivation() {
        use crate::fixtures::*;
        let sig = front_door_signature();
        let assumptions = front_door_assumptions();
        let proof = front_door_proof();
        assert_eq!(proof.last().unwrap().formula, front_door_conclusion());
        for system in [System::Ax2, System::Ax3] {
            assert_eq!(check_proof(&proof, &assumptions, system, Some(&sig), &Limits::default()).unwrap(), ProofVerdict::Accepted);
        }
        assert!(matches!(
            check_proof(&proof, &assumptions, System::Ax1, Some(&sig), &Limits::default()).unwrap(),
            ProofVerdict::Rejected { line: 1, .. }
        ));
        let mut broken = proof.clone();
        let last = broken.len() - 1;
        broken[last - 1].justification = Justification::PolyNorm(vec![Ref::Line(last - 1)]);
        assert_eq!(
            check_proof(&broken, &assumptions, System::Ax3, Some(&sig), &Limits::default()).unwrap(),
            ProofVerdict::Rejected { line: last, reason: "does not follow by polynomial normalization".into() }
        );
    }

    #[test]
    fn constants_are_evaluated() {
        let lines = vec![line("~(0 == 1)", Justification::PolyNorm(vec![]))];
        assert_eq!(check_proof(&lines, &[], System::Ax1, None, &Limits::default()).unwrap(), ProofVerdict::Accepted);
        let lines = vec![line("0 == 1", Justification::PolyNorm(vec![]))];
        assert!(matches!(check_proof(&lines, &[], System::Ax1, None, &Limits::default()).unwrap(), ProofVerdict::Rejected { .. }));
    }

    #[test]
    fn level_restriction() {
        let lines = vec![line("P([X=1]Y=1) >= 0", Justification::Axiom(Schema::NonNeg))];
        let v = check_proof(&lines, &[], System::Ax1, None, &Limits::default()).unwrap();
        assert!(matches!(v, ProofVerdict::Rejected { line: 1, .. }));
        assert_eq!(check_proof(&lines, &[], System::Ax2, None, &Limits::default()).unwrap(), ProofVerdict::Accepted);
        let add = vec![line("P([X=1]Y=1 & Z=1) + P([X=1]Y=1 & ~Z=1) == P([X=1]Y=1)", Justification::Axiom(Schema::Add))];
        assert!(matches!(check_proof(&add, &[], System::Ax2, None, &Limits::default()).unwrap(), ProofVerdict::Rejected { .. }));
        assert_eq!(check_proof(&add, &[], System::Ax3, None, &Limits::default()).unwrap(), ProofVerdict::Accepted);
    }
}
