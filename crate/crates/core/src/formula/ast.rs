use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::num::Rat;
use crate::signature::Signature;
use crate::{Error, Result};

/// `V = v` for an endogenous variable `V` and value symbol `v`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub var: String,
    pub value: String,
}

impl Atom {
    pub fn new(var: impl Into<String>, value: impl Into<String>) -> Self {
        Atom { var: var.into(), value: value.into() }
    }
}

/// A conjunction of atoms read as a partial assignment. The empty
/// intervention is `⊤`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Intervention(BTreeMap<String, String>);

impl Intervention {
    pub fn top() -> Self {
        Intervention(BTreeMap::new())
    }

    /// Collects assignments; a variable may repeat only with the same value.
    pub fn new<V, X, I>(pairs: I) -> Result<Self>
    where
        V: Into<String>,
        X: Into<String>,
        I: IntoIterator<Item = (V, X)>,
    {
        let mut map = BTreeMap::new();
        for (v, x) in pairs {
            let (v, x) = (v.into(), x.into());
            match map.get(&v) {
                Some(old) if *old != x => return Err(Error::DuplicateAssignment(v)),
                _ => {
                    map.insert(v, x);
                }
            }
        }
        Ok(Intervention(map))
    }

    pub fn single(var: impl Into<String>, value: impl Into<String>) -> Self {
        let mut map = BTreeMap::new();
        map.insert(var.into(), value.into());
        Intervention(map)
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.iter().map(|(v, x)| Atom::new(v, x)).collect()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    /// Conjunction of two interventions; conflicting values are an error.
    pub fn conjoin(&self, other: &Intervention) -> Result<Intervention> {
        Intervention::new(self.iter().chain(other.iter()))
    }

    /// Union where `other` wins on shared variables.
    pub fn override_with(&self, other: &Intervention) -> Intervention {
        let mut map = self.0.clone();
        for (k, v) in &other.0 {
            map.insert(k.clone(), v.clone());
        }
        Intervention(map)
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        for (v, x) in self.iter() {
            sig.resolve(v, x)?;
        }
        Ok(())
    }
}

impl FromIterator<Atom> for Intervention {
    /// Later atoms win; use [`Intervention::new`] to reject conflicts.
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        Intervention(iter.into_iter().map(|a| (a.var, a.value)).collect())
    }
}

/// Propositional formulas over atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    Top,
    Bot,
    Atom(Atom),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn atom(var: impl Into<String>, value: impl Into<String>) -> Prop {
        Prop::Atom(Atom::new(var, value))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Prop {
        Prop::Not(Box::new(self))
    }

    pub fn and(self, other: Prop) -> Prop {
        Prop::And(Box::new(self), Box::new(other))
    }

    /// `¬(¬a ∧ ¬b)`.
    pub fn or(self, other: Prop) -> Prop {
        self.not().and(other.not()).not()
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conj(items: impl IntoIterator<Item = Prop>) -> Prop {
        let mut it = items.into_iter();
        match it.next() {
            None => Prop::Top,
            Some(first) => it.fold(first, Prop::and),
        }
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn disj(items: impl IntoIterator<Item = Prop>) -> Prop {
        let mut it = items.into_iter();
        match it.next() {
            None => Prop::Bot,
            Some(first) => it.fold(first, Prop::or),
        }
    }

    /// Conjunction of `V = v` atoms from an assignment.
    pub fn from_assignment(assign: &Intervention) -> Prop {
        Prop::conj(assign.iter().map(|(v, x)| Prop::atom(v, x)))
    }

    pub fn eval(&self, lookup: &mut impl FnMut(&str, &str) -> bool) -> bool {
        match self {
            Prop::Top => true,
            Prop::Bot => false,
            Prop::Atom(a) => lookup(&a.var, &a.value),
            Prop::Not(p) => !p.eval(lookup),
            Prop::And(a, b) => a.eval(lookup) && b.eval(lookup),
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Prop::Top | Prop::Bot => {}
            Prop::Atom(a) => f(a),
            Prop::Not(p) => p.for_each_atom(f),
            Prop::And(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }
}

/// Full base formulas: boolean combinations of conditionals `[α]β`.
/// A bare proposition `β` is represented as `[⊤]β`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Cond(Intervention, Prop),
    Not(Box<Event>),
    And(Box<Event>, Box<Event>),
}

impl Event {
    /// `[⊤]β`.
    pub fn prop(p: Prop) -> Event {
        Event::Cond(Intervention::top(), p)
    }

    pub fn cond(alpha: Intervention, p: Prop) -> Event {
        Event::Cond(alpha, p)
    }

    pub fn atom(var: impl Into<String>, value: impl Into<String>) -> Event {
        Event::prop(Prop::atom(var, value))
    }

    pub fn top() -> Event {
        Event::prop(Prop::Top)
    }

    pub fn bot() -> Event {
        Event::prop(Prop::Bot)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Event {
        Event::Not(Box::new(self))
    }

    pub fn and(self, other: Event) -> Event {
        Event::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Event) -> Event {
        self.not().and(other.not()).not()
    }

    /// Left-nested conjunction; `[⊤]⊤` when empty.
    pub fn conj(items: impl IntoIterator<Item = Event>) -> Event {
        let mut it = items.into_iter();
        match it.next() {
            None => Event::top(),
            Some(first) => it.fold(first, Event::and),
        }
    }

    /// Left-nested disjunction; `[⊤]⊥` when empty.
    pub fn disj(items: impl IntoIterator<Item = Event>) -> Event {
        let mut it = items.into_iter();
        match it.next() {
            None => Event::bot(),
            Some(first) => it.fold(first, Event::or),
        }
    }

    /// Conjunction with conditionals under identical interventions merged,
    /// so that `[α]β ∧ [α]γ` becomes `[α](β ∧ γ)`.
    pub fn and_merged(self, other: Event) -> Event {
        match (self, other) {
            (Event::Cond(a, b), Event::Cond(a2, c)) if a == a2 => Event::Cond(a, b.and(c)),
            (x, y) => x.and(y),
        }
    }

    /// 1 for `[⊤]β`, 2 for `[α]β`, 3 for anything else.
    pub fn level(&self) -> u8 {
        match self {
            Event::Cond(a, _) if a.is_top() => 1,
            Event::Cond(..) => 2,
            _ => 3,
        }
    }

    pub fn for_each_cond<'a>(&'a self, f: &mut impl FnMut(&'a Intervention, &'a Prop)) {
        match self {
            Event::Cond(a, p) => f(a, p),
            Event::Not(e) => e.for_each_cond(f),
            Event::And(a, b) => {
                a.for_each_cond(f);
                b.for_each_cond(f);
            }
        }
    }

    /// Every atom mentioned, in interventions or consequents.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.for_each_cond(&mut |a, p| {
            out.extend(a.atoms());
            p.for_each_atom(&mut |atom| {
                out.insert(atom.clone());
            });
        });
        out
    }

    /// Interventions of all conditionals.
    pub fn interventions(&self) -> BTreeSet<Intervention> {
        let mut out = BTreeSet::new();
        self.for_each_cond(&mut |a, _| {
            out.insert(a.clone());
        });
        out
    }

    /// Boolean evaluation given a truth assignment to conditionals.
    pub fn eval_with(&self, cond: &mut impl FnMut(&Intervention, &Prop) -> bool) -> bool {
        match self {
            Event::Cond(a, p) => cond(a, p),
            Event::Not(e) => !e.eval_with(cond),
            Event::And(a, b) => a.eval_with(cond) && b.eval_with(cond),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        for atom in self.atoms() {
            sig.resolve(&atom.var, &atom.value)?;
        }
        Ok(())
    }
}

/// Polynomial terms over probabilities, with rational literals and
/// conditional probabilities as sugar that [`desugar`](super::desugar)
/// removes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Prob(Event),
    CondProb(Event, Event),
    Const(Rat),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
}

impl Term {
    pub fn p(e: Event) -> Term {
        Term::Prob(e)
    }

    /// `P(β | γ)`.
    pub fn given(e: Event, g: Event) -> Term {
        Term::CondProb(e, g)
    }

    pub fn constant(q: Rat) -> Term {
        Term::Const(q)
    }

    /// `P(⊥)`, the primitive zero.
    pub fn zero() -> Term {
        Term::Prob(Event::bot())
    }

    /// `P(⊤)`, the primitive one.
    pub fn one() -> Term {
        Term::Prob(Event::top())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Term) -> Term {
        Term::Add(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }

    /// `a + (-b)`.
    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Term) -> Term {
        self.add(other.neg())
    }

    /// Left-nested sum; `P(⊥)` when empty.
    pub fn sum(items: impl IntoIterator<Item = Term>) -> Term {
        let mut it = items.into_iter();
        match it.next() {
            None => Term::zero(),
            Some(first) => it.fold(first, Term::add),
        }
    }

    /// Left-nested product; `P(⊤)` when empty.
    pub fn product(items: impl IntoIterator<Item = Term>) -> Term {
        let mut it = items.into_iter();
        match it.next() {
            None => Term::one(),
            Some(first) => it.fold(first, Term::mul),
        }
    }

    pub fn for_each_event<'a>(&'a self, f: &mut impl FnMut(&'a Event)) {
        match self {
            Term::Prob(e) => f(e),
            Term::CondProb(e, g) => {
                f(e);
                f(g);
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.for_each_event(f);
                b.for_each_event(f);
            }
            Term::Neg(a) => a.for_each_event(f),
        }
    }

    /// Polynomial degree counting each probability leaf as one unknown.
    pub fn degree(&self) -> u32 {
        match self {
            Term::Prob(_) => 1,
            Term::CondProb(..) | Term::Const(_) => 0,
            Term::Add(a, b) => a.degree().max(b.degree()),
            Term::Mul(a, b) => a.degree() + b.degree(),
            Term::Neg(a) => a.degree(),
        }
    }

    /// Evaluates with exact rationals, given a probability for each leaf.
    /// Conditional probabilities with a zero denominator evaluate to zero.
    pub fn eval(&self, prob: &mut impl FnMut(&Event) -> Rat) -> Rat {
        use num_traits::Zero;
        match self {
            Term::Prob(e) => prob(e),
            Term::CondProb(e, g) => {
                let den = prob(g);
                if den.is_zero() {
                    Rat::zero()
                } else {
                    prob(&e.clone().and_merged(g.clone())) / den
                }
            }
            Term::Const(q) => q.clone(),
            Term::Add(a, b) => a.eval(prob) + b.eval(prob),
            Term::Mul(a, b) => a.eval(prob) * b.eval(prob),
            Term::Neg(a) => -a.eval(prob),
        }
    }
}

/// Formulas of the probabilistic languages: boolean combinations of term
/// inequalities. `Gt`, `Equiv`, `Or` and `Implies` are sugar.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Geq(Term, Term),
    Gt(Term, Term),
    Equiv(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn geq(a: Term, b: Term) -> Formula {
        Formula::Geq(a, b)
    }

    pub fn gt(a: Term, b: Term) -> Formula {
        Formula::Gt(a, b)
    }

    pub fn equiv(a: Term, b: Term) -> Formula {
        Formula::Equiv(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    /// `P(⊤) >= P(⊤)`, a fixed true formula.
    pub fn truth() -> Formula {
        Formula::Geq(Term::one(), Term::one())
    }

    /// Left-nested conjunction; [`Formula::truth`] when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::truth(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; `¬truth` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::truth().not(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn for_each_term<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Formula::Geq(a, b) | Formula::Gt(a, b) | Formula::Equiv(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(x) => x.for_each_term(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn for_each_event<'a>(&'a self, f: &mut impl FnMut(&'a Event)) {
        self.for_each_term(&mut |t| t.for_each_event(f));
    }

    /// Distinct probability arguments, in syntactic order of the set.
    pub fn events(&self) -> BTreeSet<Event> {
        let mut out = BTreeSet::new();
        self.for_each_event(&mut |e| {
            out.insert(e.clone());
        });
        out
    }

    /// Every atom mentioned anywhere in the formula.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.for_each_event(&mut |e| out.extend(e.atoms()));
        out
    }

    /// The least level whose base language contains every probability
    /// argument; formulas without probabilities are level 1. Conditional
    /// probabilities count through the conjunction they desugar to.
    pub fn level(&self) -> u8 {
        let mut lvl = 1;
        self.for_each_term(&mut |t| lvl = lvl.max(term_level(t)));
        lvl
    }

    /// Highest polynomial degree of any compared term.
    pub fn degree(&self) -> u32 {
        let mut d = 0;
        self.for_each_term(&mut |t| d = d.max(t.degree()));
        d
    }

    /// Checks every atom against the signature.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        for atom in self.atoms() {
            sig.resolve(&atom.var, &atom.value)?;
        }
        Ok(())
    }

    /// Boolean evaluation given exact values for every probability leaf.
    pub fn eval(&self, prob: &mut impl FnMut(&Event) -> Rat) -> bool {
        match self {
            Formula::Geq(a, b) => a.eval(prob) >= b.eval(prob),
            Formula::Gt(a, b) => a.eval(prob) > b.eval(prob),
            Formula::Equiv(a, b) => a.eval(prob) == b.eval(prob),
            Formula::Not(x) => !x.eval(prob),
            Formula::And(a, b) => a.eval(prob) && b.eval(prob),
            Formula::Or(a, b) => a.eval(prob) || b.eval(prob),
            Formula::Implies(a, b) => !a.eval(prob) || b.eval(prob),
        }
    }

    /// Size measure: number of probability leaves.
    pub fn leaf_count(&self) -> usize {
        let mut n = 0;
        self.for_each_event(&mut |_| n += 1);
        n
    }

    /// Variables mentioned, sorted by name.
    pub fn variables(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.atoms().into_iter().map(|a| a.var).collect();
        set.into_iter().collect()
    }
}

fn term_level(t: &Term) -> u8 {
    let mut lvl = 1;
    let mut visit = |t: &Term| match t {
        Term::Prob(e) => lvl = lvl.max(e.level()),
        Term::CondProb(e, g) => lvl = lvl.max(e.clone().and_merged(g.clone()).level()).max(g.level()),
        _ => {}
    };
    walk_terms(t, &mut visit);
    lvl
}

fn walk_terms(t: &Term, f: &mut impl FnMut(&Term)) {
    f(t);
    match t {
        Term::Add(a, b) | Term::Mul(a, b) => {
            walk_terms(a, f);
            walk_terms(b, f);
        }
        Term::Neg(a) => walk_terms(a, f),
        _ => {}
    }
}

impl core::fmt::Display for Atom {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}={}", self.var, self.value)
    }
}

impl From<Atom> for Prop {
    fn from(a: Atom) -> Prop {
        Prop::Atom(a)
    }
}
