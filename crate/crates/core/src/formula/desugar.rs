//! Elimination of rational literals, conditional probabilities and the
//! derived connectives.
//!
//! Every term is first brought to a fraction `n / (d1 · d2 · ...)` whose
//! numerator and denominator factors are sugar-free. A comparison
//! `n1/D1 ≥ n2/D2` then becomes `D2·n1 ≥ D1·n2` after cancelling the
//! factors both sides share. Denominators are probabilities or sums of
//! `P(⊤)`, so they are nonnegative and clearing them preserves the order
//! whenever the conditional probabilities involved are defined.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ast::{Formula, Term};

/// Rewrites `f` into `Geq`/`Not`/`And` over literal-free polynomial terms.
/// Idempotent.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Geq(a, b) => compare(a, b),
        Formula::Gt(a, b) => compare(a, b).and(compare(b, a).not()),
        Formula::Equiv(a, b) => compare(a, b).and(compare(b, a)),
        Formula::Not(x) => desugar(x).not(),
        Formula::And(a, b) => desugar(a).and(desugar(b)),
        Formula::Or(a, b) => desugar(a).not().and(desugar(b).not()).not(),
        Formula::Implies(a, b) => desugar(a).and(desugar(b).not()).not(),
    }
}

/// True when `f` uses only the primitive connectives and terms.
pub fn is_desugared(f: &Formula) -> bool {
    fn term_ok(t: &Term) -> bool {
        match t {
            Term::Prob(_) => true,
            Term::CondProb(..) | Term::Const(_) => false,
            Term::Add(a, b) | Term::Mul(a, b) => term_ok(a) && term_ok(b),
            Term::Neg(a) => term_ok(a),
        }
    }
    match f {
        Formula::Geq(a, b) => term_ok(a) && term_ok(b),
        Formula::Not(x) => is_desugared(x),
        Formula::And(a, b) => is_desugared(a) && is_desugared(b),
        _ => false,
    }
}

/// `num / ∏ den`; a missing numerator stands for one.
struct Frac {
    num: Option<Term>,
    den: Vec<Term>,
}

fn compare(a: &Term, b: &Term) -> Formula {
    let fa = frac(a);
    let fb = frac(b);
    let (da, db) = cancel_common(fa.den, fb.den);
    let lhs = scale(&db, fa.num);
    let rhs = scale(&da, fb.num);
    Formula::Geq(lhs, rhs)
}

/// `∏ factors · num`, dropping a unit numerator.
fn scale(factors: &[Term], num: Option<Term>) -> Term {
    let mut items: Vec<Term> = factors.to_vec();
    if let Some(n) = num {
        items.push(n);
    }
    Term::product(items)
}

fn cancel_common(mut a: Vec<Term>, mut b: Vec<Term>) -> (Vec<Term>, Vec<Term>) {
    let mut i = 0;
    while i < a.len() {
        if let Some(j) = b.iter().position(|t| *t == a[i]) {
            a.remove(i);
            b.remove(j);
        } else {
            i += 1;
        }
    }
    (a, b)
}

fn mul_opt(a: Option<Term>, b: Option<Term>) -> Option<Term> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.mul(y)),
    }
}

/// Numerator scaled by the factors of the common multiple missing from
/// `den`.
fn lift(num: Option<Term>, den: &[Term], lcm: &[Term]) -> Option<Term> {
    let (missing, _) = cancel_common(lcm.to_vec(), den.to_vec());
    if missing.is_empty() {
        num
    } else {
        mul_opt(Some(Term::product(missing)), num)
    }
}

fn lcm(a: &[Term], b: &[Term]) -> Vec<Term> {
    let (extra, _) = cancel_common(b.to_vec(), a.to_vec());
    let mut out = a.to_vec();
    out.extend(extra);
    out.sort();
    out
}

fn frac(t: &Term) -> Frac {
    match t {
        Term::Prob(e) => Frac { num: Some(Term::Prob(e.clone())), den: Vec::new() },
        Term::Const(q) => {
            let num = int_term(q.numer());
            let den = if q.denom().is_one() {
                Vec::new()
            } else {
                alloc::vec![int_term(q.denom()).expect("denominator is at least two")]
            };
            Frac { num, den }
        }
        Term::CondProb(e, g) => Frac {
            num: Some(Term::Prob(e.clone().and_merged(g.clone()))),
            den: alloc::vec![Term::Prob(g.clone())],
        },
        Term::Add(a, b) => {
            let fa = frac(a);
            let fb = frac(b);
            let l = lcm(&fa.den, &fb.den);
            let na = lift(fa.num, &fa.den, &l).unwrap_or_else(Term::one);
            let nb = lift(fb.num, &fb.den, &l).unwrap_or_else(Term::one);
            Frac { num: Some(na.add(nb)), den: l }
        }
        Term::Mul(a, b) => {
            let fa = frac(a);
            let fb = frac(b);
            let mut den = fa.den;
            den.extend(fb.den);
            den.sort();
            Frac { num: mul_opt(fa.num, fb.num), den }
        }
        Term::Neg(a) => {
            let fa = frac(a);
            Frac { num: Some(fa.num.unwrap_or_else(Term::one).neg()), den: fa.den }
        }
    }
}

/// `n` as a sum of `P(⊤)`; `None` for one, `P(⊥)` for zero, negated sums
/// for negative values.
fn int_term(n: &BigInt) -> Option<Term> {
    if n.is_zero() {
        return Some(Term::zero());
    }
    if n.is_one() {
        return None;
    }
    if n.is_negative() {
        return Some(int_term(&-n).unwrap_or_else(Term::one).neg());
    }
    let count: usize = n.try_into().expect("rational literal too large to expand");
    Some(Term::sum(core::iter::repeat_n(Term::one(), count)))
}
