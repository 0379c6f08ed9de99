//! Strategies and small reference implementations shared by the property
//! tests. Models are solved here by repeated substitution so that the
//! library's own solver is never its own oracle.

#![allow(dead_code)]

use causalog_core::formula::{Atom, Event, Formula, Intervention, Prop, Term};
use causalog_core::scm::{ExoSpace, Mechanism, Scm};
use causalog_core::signature::Signature;
use causalog_core::Rat;
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VARS: [&str; 3] = ["X", "Y", "Z"];

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// `X`, `Y`, `Z`, each over `{0, 1, 2}`.
pub fn sig3() -> Signature {
    Signature::uniform(&VARS, 3)
}

pub fn atom() -> impl Strategy<Value = Atom> {
    (0..3usize, 0..3usize).prop_map(|(v, x)| Atom::new(VARS[v], x.to_string()))
}

pub fn prop() -> BoxedStrategy<Prop> {
    let leaf = prop_oneof![6 => atom().prop_map(Prop::Atom), 1 => Just(Prop::Top), 1 => Just(Prop::Bot)];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|p| Prop::Not(Box::new(p))),
            (inner.clone(), inner).prop_map(|(a, b)| Prop::And(Box::new(a), Box::new(b))),
        ]
    })
    .boxed()
}

pub fn intervention() -> impl Strategy<Value = Intervention> {
    proptest::collection::vec(proptest::option::weighted(0.4, 0..3usize), 3).prop_map(|vals| {
        Intervention::new(vals.iter().enumerate().filter_map(|(v, x)| x.map(|x| (VARS[v], x.to_string())))).unwrap()
    })
}

/// Base formulas of the given level's language.
pub fn event(level: u8) -> BoxedStrategy<Event> {
    match level {
        1 => prop().prop_map(Event::prop).boxed(),
        2 => (intervention(), prop()).prop_map(|(a, p)| Event::cond(a, p)).boxed(),
        _ => event(2)
            .prop_recursive(2, 6, 2, |inner| {
                prop_oneof![
                    inner.clone().prop_map(|e| Event::Not(Box::new(e))),
                    (inner.clone(), inner).prop_map(|(a, b)| Event::And(Box::new(a), Box::new(b))),
                ]
            })
            .boxed(),
    }
}

pub fn constant() -> impl Strategy<Value = Rat> {
    (-4i64..=4, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Terms whose leaves are probabilities, conditional probabilities when
/// `cond` is set, and literals.
pub fn term(level: u8, cond: bool) -> BoxedStrategy<Term> {
    let p = event(level).prop_map(Term::Prob);
    let leaf = if cond {
        prop_oneof![
            4 => p,
            1 => (event(level), event(level)).prop_map(|(a, b)| Term::CondProb(a, b)),
            1 => constant().prop_map(Term::Const),
        ]
        .boxed()
    } else {
        prop_oneof![4 => p, 1 => constant().prop_map(Term::Const)].boxed()
    };
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
            inner.prop_map(|a| Term::Neg(Box::new(a))),
        ]
    })
    .boxed()
}

/// Literal-free terms: the language the axiom schemata range over.
pub fn plain_term(level: u8) -> BoxedStrategy<Term> {
    event(level)
        .prop_map(Term::Prob)
        .prop_recursive(3, 8, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
                inner.prop_map(|a| Term::Neg(Box::new(a))),
            ]
        })
        .boxed()
}

pub fn formula(level: u8, cond: bool) -> BoxedStrategy<Formula> {
    let t = || term(level, cond);
    let leaf = prop_oneof![
        (t(), t()).prop_map(|(a, b)| Formula::Geq(a, b)),
        (t(), t()).prop_map(|(a, b)| Formula::Gt(a, b)),
        (t(), t()).prop_map(|(a, b)| Formula::Equiv(a, b)),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
        ]
    })
    .boxed()
}

/// Exogenous weights with denominators up to `8`, or powers of two only.
fn weights(rng: &mut ChaCha8Rng, n: usize, dyadic: bool) -> Vec<Rat> {
    let den: i64 = if dyadic { *[1, 2, 4, 8].choose(rng).unwrap() } else { rng.random_range(1..=8) };
    let den = if dyadic { den.max(n.next_power_of_two() as i64) } else { den.max(n as i64) };
    // A random composition of `den` into `n` parts; zero parts are allowed.
    let mut cuts: Vec<i64> = (0..n - 1).map(|_| rng.random_range(0..=den)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.into_iter().chain([den]) {
        out.push(rat(c - prev, den));
        prev = c;
    }
    if out.iter().all(|w| w.is_zero()) {
        out[0] = rat(1, 1);
    }
    out
}

pub struct ModelSpec {
    pub domain_sizes: Vec<usize>,
    pub max_exo: usize,
    pub dyadic: bool,
    /// Let every variable read every other one, so the model may be cyclic.
    pub cyclic: bool,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec { domain_sizes: vec![3, 3, 3], max_exo: 4, dyadic: false, cyclic: false }
    }
}

/// A random model over the first `domain_sizes.len()` of `X, Y, Z`. Unless
/// `cyclic` is set, parents are drawn from the variables before it in a
/// random order, so the model is recursive.
pub fn random_model(seed: u64, spec: &ModelSpec) -> Scm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.domain_sizes.len();
    let sig = Signature::new(
        VARS[..n].iter().zip(&spec.domain_sizes).map(|(v, &k)| (*v, (0..k).map(|x| x.to_string()).collect::<Vec<_>>())),
    )
    .unwrap();
    let exo_n = rng.random_range(1..=spec.max_exo);
    let exo = ExoSpace::new(weights(&mut rng, exo_n, spec.dyadic).into_iter().enumerate().map(|(i, w)| (format!("u{i}"), w))).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut mechs = vec![None; n];
    for (pos, &v) in order.iter().enumerate() {
        let pool: Vec<usize> = if spec.cyclic { (0..n).filter(|&w| w != v).collect() } else { order[..pos].to_vec() };
        let parents: Vec<usize> = pool.into_iter().filter(|_| rng.random_bool(0.6)).collect();
        let rows: usize = parents.iter().map(|&p| spec.domain_sizes[p]).product();
        let table = (0..rows * exo_n).map(|_| rng.random_range(0..spec.domain_sizes[v])).collect();
        mechs[v] = Some(Mechanism { parents, table });
    }
    Scm::new(sig, exo, mechs.into_iter().map(Option::unwrap).collect()).unwrap()
}

fn lookup(m: &Scm, v: usize, vals: &[usize], u: usize) -> usize {
    let sig = m.signature();
    let mech = m.mechanism(v);
    let idx = mech.parents.iter().fold(0, |acc, &p| acc * sig.domain(p).len() + vals[p]);
    mech.table[idx * m.exo().len() + u]
}

/// Values at point `u` under `alpha` by `n + 1` rounds of simultaneous
/// substitution, which reach the unique solution of a recursive model.
pub fn solve(m: &Scm, alpha: &Intervention, u: usize) -> Vec<usize> {
    let sig = m.signature();
    let n = sig.len();
    let fixed: Vec<Option<usize>> = (0..n).map(|v| alpha.get(sig.name(v)).map(|x| sig.value_index(v, x).unwrap())).collect();
    let mut vals: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    for _ in 0..=n {
        vals = (0..n).map(|v| fixed[v].unwrap_or_else(|| lookup(m, v, &vals, u))).collect();
    }
    vals
}

pub fn prop_holds(sig: &Signature, vals: &[usize], p: &Prop) -> bool {
    match p {
        Prop::Top => true,
        Prop::Bot => false,
        Prop::Atom(a) => {
            let v = sig.index_of(&a.var).unwrap();
            sig.domain(v)[vals[v]] == a.value
        }
        Prop::Not(x) => !prop_holds(sig, vals, x),
        Prop::And(a, b) => prop_holds(sig, vals, a) && prop_holds(sig, vals, b),
    }
}

pub fn event_holds(m: &Scm, u: usize, e: &Event) -> bool {
    match e {
        Event::Cond(alpha, p) => prop_holds(m.signature(), &solve(m, alpha, u), p),
        Event::Not(x) => !event_holds(m, u, x),
        Event::And(a, b) => event_holds(m, u, a) && event_holds(m, u, b),
    }
}

pub fn prob(m: &Scm, e: &Event) -> Rat {
    (0..m.exo().len()).filter(|&u| event_holds(m, u, e)).map(|u| m.exo().weight(u).clone()).sum()
}

/// Value of a term with conditional probabilities read as quotients, or
/// `None` when some condition has probability zero.
pub fn term_value(m: &Scm, t: &Term) -> Option<Rat> {
    Some(match t {
        Term::Prob(e) => prob(m, e),
        Term::CondProb(e, g) => {
            let pg = prob(m, g);
            if pg.is_zero() {
                return None;
            }
            prob(m, &e.clone().and(g.clone())) / pg
        }
        Term::Const(q) => q.clone(),
        Term::Add(a, b) => term_value(m, a)? + term_value(m, b)?,
        Term::Mul(a, b) => term_value(m, a)? * term_value(m, b)?,
        Term::Neg(a) => -term_value(m, a)?,
    })
}

/// Truth of a formula, or `None` when a conditional probability is
/// undefined.
pub fn formula_value(m: &Scm, f: &Formula) -> Option<bool> {
    Some(match f {
        Formula::Geq(a, b) => term_value(m, a)? >= term_value(m, b)?,
        Formula::Gt(a, b) => term_value(m, a)? > term_value(m, b)?,
        Formula::Equiv(a, b) => term_value(m, a)? == term_value(m, b)?,
        Formula::Not(x) => !formula_value(m, x)?,
        Formula::And(a, b) => formula_value(m, a)? && formula_value(m, b)?,
        Formula::Or(a, b) => formula_value(m, a)? || formula_value(m, b)?,
        Formula::Implies(a, b) => !formula_value(m, a)? || formula_value(m, b)?,
    })
}

/// Rewrites a base formula into a different but equivalent one: double
/// negations, swapped conjuncts, split conditionals and intervened atoms
/// replaced by their truth value.
pub fn equivalent_variant(e: &Event, rng: &mut ChaCha8Rng) -> Event {
    match e {
        Event::Cond(alpha, p) => {
            let p = prop_variant(alpha, p, rng);
            match p {
                Prop::And(a, b) if rng.random_bool(0.5) => Event::cond(alpha.clone(), *a).and(Event::cond(alpha.clone(), *b)),
                Prop::Not(a) if rng.random_bool(0.5) => Event::cond(alpha.clone(), *a).not(),
                p => Event::cond(alpha.clone(), p),
            }
        }
        Event::Not(x) if rng.random_bool(0.3) => equivalent_variant(x, rng).not().not().not(),
        Event::Not(x) => equivalent_variant(x, rng).not(),
        Event::And(a, b) if rng.random_bool(0.5) => equivalent_variant(b, rng).and(equivalent_variant(a, rng)),
        Event::And(a, b) => equivalent_variant(a, rng).and(equivalent_variant(b, rng)),
    }
}

fn prop_variant(alpha: &Intervention, p: &Prop, rng: &mut ChaCha8Rng) -> Prop {
    match p {
        Prop::Atom(a) => match alpha.get(&a.var) {
            Some(x) if rng.random_bool(0.7) => {
                if x == a.value {
                    Prop::Top
                } else {
                    Prop::Bot
                }
            }
            _ => p.clone(),
        },
        Prop::Not(x) => prop_variant(alpha, x, rng).not(),
        Prop::And(a, b) if rng.random_bool(0.5) => prop_variant(alpha, b, rng).and(prop_variant(alpha, a, rng)),
        Prop::And(a, b) => prop_variant(alpha, a, rng).and(prop_variant(alpha, b, rng)),
        Prop::Top if rng.random_bool(0.5) => Prop::Bot.not(),
        other => other.clone(),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
