//! Reference implementations and generators shared by the integration
//! tests. Nothing here calls into the evaluator, the desugarer or the
//! decision procedures of the library: models are solved by repeated
//! substitution and probabilities are summed point by point.

#![allow(dead_code)]

use std::cmp::Ordering;

use causalog_core::formula::{Event, Formula, Intervention, Prop, Term};
use causalog_core::scm::{ExoSpace, Mechanism, Scm};
use causalog_core::signature::Signature;
use causalog_core::Rat;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn lookup(m: &Scm, v: usize, vals: &[usize], u: usize) -> usize {
    let sig = m.signature();
    let mech = m.mechanism(v);
    let idx = mech.parents.iter().fold(0, |acc, &p| acc * sig.domain(p).len() + vals[p]);
    mech.table[idx * m.exo().len() + u]
}

/// Values of the endogenous variables at point `u` under `alpha`. In a
/// recursive model, `n` rounds of simultaneous substitution reach the
/// unique solution.
pub fn solve(m: &Scm, alpha: &Intervention, u: usize) -> Vec<usize> {
    let sig = m.signature();
    let n = sig.len();
    let fixed: Vec<Option<usize>> = (0..n)
        .map(|v| alpha.get(sig.name(v)).map(|x| sig.value_index(v, x).expect("intervened value in the domain")))
        .collect();
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
            let v = sig.index_of(&a.var).expect("variable of the signature");
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

/// Joint distribution of the endogenous variables under `alpha`.
pub fn distribution(m: &Scm, alpha: &Intervention) -> std::collections::BTreeMap<Vec<usize>, Rat> {
    let mut out = std::collections::BTreeMap::new();
    for u in 0..m.exo().len() {
        let w = m.exo().weight(u);
        if w.is_zero() {
            continue;
        }
        *out.entry(solve(m, alpha, u)).or_insert_with(Rat::zero) += w;
    }
    out
}

fn value(t: &Term, p: &mut dyn FnMut(&Event) -> Rat) -> Rat {
    match t {
        Term::Prob(e) => p(e),
        Term::Const(q) => q.clone(),
        Term::Add(a, b) => value(a, p) + value(b, p),
        Term::Mul(a, b) => value(a, p) * value(b, p),
        Term::Neg(a) => -value(a, p),
        Term::CondProb(..) => panic!("the reference evaluator takes conditional probabilities only as a whole side"),
    }
}

/// A side as a fraction; `P(e | g)` is `P(e ∧ g) / P(g)`.
fn side(t: &Term, p: &mut dyn FnMut(&Event) -> Rat) -> (Rat, Rat, Option<Event>) {
    match t {
        Term::CondProb(e, g) => (p(&e.clone().and(g.clone())), p(g), Some(g.clone())),
        _ => (value(t, p), Rat::one(), None),
    }
}

/// Compares two sides by cross-multiplying their denominators. Two
/// conditionals on the same event are compared by their numerators.
fn compare(a: &Term, b: &Term, p: &mut dyn FnMut(&Event) -> Rat) -> Ordering {
    let (na, da, ga) = side(a, p);
    let (nb, db, gb) = side(b, p);
    if ga.is_some() && ga == gb {
        return na.cmp(&nb);
    }
    (na * db).cmp(&(nb * da))
}

pub fn holds_with(f: &Formula, p: &mut dyn FnMut(&Event) -> Rat) -> bool {
    match f {
        Formula::Geq(a, b) => compare(a, b, p) != Ordering::Less,
        Formula::Gt(a, b) => compare(a, b, p) == Ordering::Greater,
        Formula::Equiv(a, b) => compare(a, b, p) == Ordering::Equal,
        Formula::Not(x) => !holds_with(x, p),
        Formula::And(a, b) => holds_with(a, p) && holds_with(b, p),
        Formula::Or(a, b) => holds_with(a, p) || holds_with(b, p),
        Formula::Implies(a, b) => !holds_with(a, p) || holds_with(b, p),
    }
}

pub fn holds(m: &Scm, f: &Formula) -> bool {
    holds_with(f, &mut |e| prob(m, e))
}

/// The events whose probabilities [`holds_with`] asks for.
pub fn queried_events(f: &Formula) -> Vec<Event> {
    fn term(t: &Term, out: &mut Vec<Event>) {
        match t {
            Term::Prob(e) => out.push(e.clone()),
            Term::CondProb(e, g) => {
                out.push(e.clone().and(g.clone()));
                out.push(g.clone());
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                term(a, out);
                term(b, out);
            }
            Term::Neg(a) => term(a, out),
        }
    }
    fn formula(f: &Formula, out: &mut Vec<Event>) {
        match f {
            Formula::Geq(a, b) | Formula::Gt(a, b) | Formula::Equiv(a, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Not(x) => formula(x, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                formula(a, out);
                formula(b, out);
            }
        }
    }
    let mut out = Vec::new();
    formula(f, &mut out);
    out.sort();
    out.dedup();
    out
}

/// `k` positive integers summing to `total`.
pub fn composition(rng: &mut Gen, total: i64, k: usize) -> Vec<i64> {
    assert!(k >= 1 && total >= k as i64);
    let mut cuts: Vec<i64> = (1..total).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<i64> = cuts.into_iter().take(k - 1).collect();
    cuts.push(0);
    cuts.push(total);
    cuts.sort();
    cuts.windows(2).map(|w| w[1] - w[0]).collect()
}

const NAMES: [&str; 3] = ["X", "Y", "Z"];

/// A random recursive model with at most three variables of at most three
/// values. Dyadic models have weights with a power-of-two denominator.
pub fn random_model(rng: &mut Gen, dyadic: bool) -> Scm {
    let n = rng.random_range(1..=3);
    let sig = Signature::new((0..n).map(|i| (NAMES[i], (0..rng.random_range(2..=3)).map(|x| x.to_string()).collect::<Vec<_>>())))
        .expect("distinct names");
    let points = rng.random_range(1..=4usize);
    let total = if dyadic {
        1i64 << rng.random_range(2..=4)
    } else {
        *[3i64, 5, 6, 7, 9, 10, 12].iter().filter(|&&d| d >= points as i64).collect::<Vec<_>>()[rng.random_range(0..4)]
    };
    let weights = composition(rng, total, points);
    let exo = ExoSpace::new(weights.iter().enumerate().map(|(i, &w)| (format!("u{i}"), rat(w, total)))).expect("weights sum to one");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut mechs = Vec::new();
    for v in 0..n {
        let pos = order.iter().position(|&x| x == v).expect("permutation");
        let parents: Vec<usize> = order[..pos].iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        let rows: usize = parents.iter().map(|&p| sig.domain(p).len()).product();
        let k = sig.domain(v).len();
        let table = (0..rows * points).map(|_| rng.random_range(0..k)).collect();
        mechs.push(Mechanism { parents, table });
    }
    Scm::new(sig, exo, mechs).expect("recursive by construction")
}

pub fn random_atom(rng: &mut Gen, sig: &Signature) -> Prop {
    let v = rng.random_range(0..sig.len());
    let dom = sig.domain(v);
    Prop::atom(sig.name(v), dom[rng.random_range(0..dom.len())].clone())
}

pub fn random_prop(rng: &mut Gen, sig: &Signature, depth: u32) -> Prop {
    if depth == 0 || rng.random_bool(0.4) {
        return match rng.random_range(0..12) {
            0 => Prop::Top,
            1 => Prop::Bot,
            _ => random_atom(rng, sig),
        };
    }
    match rng.random_range(0..3) {
        0 => random_prop(rng, sig, depth - 1).not(),
        1 => random_prop(rng, sig, depth - 1).and(random_prop(rng, sig, depth - 1)),
        _ => random_prop(rng, sig, depth - 1).or(random_prop(rng, sig, depth - 1)),
    }
}

/// A random partial assignment of at most `max` variables.
pub fn random_intervention(rng: &mut Gen, sig: &Signature, max: usize) -> Intervention {
    let mut vars: Vec<usize> = (0..sig.len()).collect();
    vars.shuffle(rng);
    let k = rng.random_range(0..=max.min(sig.len()));
    Intervention::new(vars[..k].iter().map(|&v| {
        let dom = sig.domain(v);
        (sig.name(v).to_string(), dom[rng.random_range(0..dom.len())].clone())
    }))
    .expect("distinct variables")
}

/// A random base formula of the given level.
pub fn random_event(rng: &mut Gen, sig: &Signature, level: u8) -> Event {
    match level {
        1 => Event::prop(random_prop(rng, sig, 2)),
        2 => Event::cond(random_intervention(rng, sig, 2), random_prop(rng, sig, 2)),
        _ => {
            if rng.random_bool(0.5) {
                random_event(rng, sig, 2)
            } else if rng.random_bool(0.3) {
                random_event(rng, sig, 2).not()
            } else {
                random_event(rng, sig, 2).and(random_event(rng, sig, 2))
            }
        }
    }
}

pub const CONSTANTS: [(i64, i64); 8] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1), (-1, 2)];

pub fn random_const(rng: &mut Gen) -> Term {
    let (n, d) = CONSTANTS[rng.random_range(0..CONSTANTS.len())];
    Term::constant(rat(n, d))
}

/// A random polynomial term of degree at most `degree` without
/// conditional probabilities.
pub fn random_term(rng: &mut Gen, sig: &Signature, level: u8, degree: u32) -> Term {
    if degree == 0 {
        return random_const(rng);
    }
    match rng.random_range(0..6) {
        0 => random_const(rng),
        1 | 2 => Term::p(random_event(rng, sig, level)),
        3 => random_term(rng, sig, level, degree).add(random_term(rng, sig, level, degree)),
        4 => random_term(rng, sig, level, degree).neg(),
        _ => {
            let a = rng.random_range(0..degree);
            random_term(rng, sig, level, a.max(1).min(degree)).mul(random_term(rng, sig, level, degree - a.max(1).min(degree)))
        }
    }
}

/// A side of a comparison: a polynomial, or occasionally a single
/// conditional probability.
pub fn random_side(rng: &mut Gen, sig: &Signature, level: u8, degree: u32) -> Term {
    if rng.random_bool(0.15) {
        Term::given(Event::prop(random_prop(rng, sig, 1)), Event::prop(random_prop(rng, sig, 1)))
    } else {
        random_term(rng, sig, level, degree)
    }
}

pub fn random_formula(rng: &mut Gen, sig: &Signature, level: u8, degree: u32, depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        let a = random_side(rng, sig, level, degree);
        let b = random_side(rng, sig, level, degree);
        return match rng.random_range(0..3) {
            0 => Formula::geq(a, b),
            1 => Formula::gt(a, b),
            _ => Formula::equiv(a, b),
        };
    }
    let a = random_formula(rng, sig, level, degree, depth - 1);
    match rng.random_range(0..4) {
        0 => a.not(),
        1 => a.and(random_formula(rng, sig, level, degree, depth - 1)),
        2 => a.or(random_formula(rng, sig, level, degree, depth - 1)),
        _ => a.implies(random_formula(rng, sig, level, degree, depth - 1)),
    }
}
