//! Printing. Output re-parses to the identical AST.

use core::fmt::{self, Display, Formatter};

use super::ast::{Event, Formula, Intervention, Prop, Term};
use crate::num::fmt_rat;

impl Display for Intervention {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, x)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={x}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Ctx {
    Full,
    AndLeft,
    Atomic,
}

fn prop(p: &Prop, ctx: Ctx, f: &mut Formatter<'_>) -> fmt::Result {
    match p {
        Prop::Top => f.write_str("top"),
        Prop::Bot => f.write_str("bot"),
        Prop::Atom(a) => write!(f, "{}={}", a.var, a.value),
        Prop::Not(inner) => match &**inner {
            Prop::Atom(a) => write!(f, "{}!={}", a.var, a.value),
            other => {
                f.write_str("~")?;
                prop(other, Ctx::Atomic, f)
            }
        },
        Prop::And(a, b) => {
            let paren = ctx == Ctx::Atomic;
            if paren {
                f.write_str("(")?;
            }
            prop(a, Ctx::AndLeft, f)?;
            f.write_str(" & ")?;
            prop(b, Ctx::Atomic, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl Display for Prop {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        prop(self, Ctx::Full, f)
    }
}

fn event(e: &Event, ctx: Ctx, whole: bool, f: &mut Formatter<'_>) -> fmt::Result {
    match e {
        Event::Cond(a, p) if whole && a.is_top() => prop(p, Ctx::Full, f),
        Event::Cond(a, p) => {
            write!(f, "{a}")?;
            prop(p, Ctx::Atomic, f)
        }
        Event::Not(x) => {
            f.write_str("~")?;
            event(x, Ctx::Atomic, false, f)
        }
        Event::And(a, b) => {
            let paren = ctx == Ctx::Atomic;
            if paren {
                f.write_str("(")?;
            }
            event(a, Ctx::AndLeft, false, f)?;
            f.write_str(" & ")?;
            event(b, Ctx::Atomic, false, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

/// Shows an event as it appears directly inside `P(..)`: a bare
/// proposition for `[⊤]β`.
pub struct EventDisplay<'a>(pub &'a Event);

impl Display for EventDisplay<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        event(self.0, Ctx::Full, true, f)
    }
}

impl Display for Event {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        event(self, Ctx::Full, true, f)
    }
}

// Term precedence: 0 sum, 1 product, 2 factor.
fn term(t: &Term, prec: u8, f: &mut Formatter<'_>) -> fmt::Result {
    match t {
        Term::Prob(e) => write!(f, "P({})", EventDisplay(e)),
        Term::CondProb(e, g) => write!(f, "P({} | {})", EventDisplay(e), EventDisplay(g)),
        Term::Const(q) => f.write_str(&fmt_rat(q)),
        Term::Add(a, b) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            term(a, 0, f)?;
            match &**b {
                Term::Neg(inner) => {
                    f.write_str(" - ")?;
                    term(inner, 1, f)?;
                }
                other => {
                    f.write_str(" + ")?;
                    term(other, 1, f)?;
                }
            }
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::Mul(a, b) => {
            if prec > 1 {
                f.write_str("(")?;
            }
            term(a, 1, f)?;
            f.write_str(" * ")?;
            term(b, 2, f)?;
            if prec > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::Neg(inner) => {
            f.write_str("-")?;
            match &**inner {
                Term::Const(q) => write!(f, "({})", fmt_rat(q)),
                other => term(other, 2, f),
            }
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        term(self, 0, f)
    }
}

// Formula precedence: 0 implication, 1 disjunction, 2 conjunction, 3 unary.
fn formula(x: &Formula, prec: u8, f: &mut Formatter<'_>) -> fmt::Result {
    let wrap = |own: u8, f: &mut Formatter<'_>, body: &dyn Fn(&mut Formatter<'_>) -> fmt::Result| {
        if prec > own {
            f.write_str("(")?;
            body(f)?;
            f.write_str(")")
        } else {
            body(f)
        }
    };
    match x {
        Formula::Geq(a, b) => write!(f, "{a} >= {b}"),
        Formula::Gt(a, b) => write!(f, "{a} > {b}"),
        Formula::Equiv(a, b) => write!(f, "{a} == {b}"),
        Formula::Not(inner) => {
            f.write_str("~")?;
            match &**inner {
                Formula::Geq(..) | Formula::Gt(..) | Formula::Equiv(..) => {
                    f.write_str("(")?;
                    formula(inner, 0, f)?;
                    f.write_str(")")
                }
                other => formula(other, 3, f),
            }
        }
        Formula::And(a, b) => wrap(2, f, &|f| {
            formula(a, 2, f)?;
            f.write_str(" & ")?;
            formula(b, 3, f)
        }),
        Formula::Or(a, b) => wrap(1, f, &|f| {
            formula(a, 1, f)?;
            f.write_str(" | ")?;
            formula(b, 2, f)
        }),
        Formula::Implies(a, b) => wrap(0, f, &|f| {
            formula(a, 1, f)?;
            f.write_str(" -> ")?;
            formula(b, 0, f)
        }),
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        formula(self, 0, f)
    }
}
