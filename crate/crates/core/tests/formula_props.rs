mod common;

use std::collections::BTreeMap;

use causalog_core::formula::{desugar, is_desugared, parse_event, parse_formula, parse_term, Event, Formula, Term};
use common::{event, formula, intervention, term};
use proptest::prelude::*;

fn subformulas<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    out.push(f);
    match f {
        Formula::Not(x) => subformulas(x, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            subformulas(a, out);
            subformulas(b, out);
        }
        _ => {}
    }
}

proptest! {
    #[test]
    fn formulas_print_and_parse_back(f in formula(3, true)) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text, None).unwrap(), f, "{}", text);
    }

    #[test]
    fn events_print_and_parse_back(e in event(3)) {
        let text = e.to_string();
        prop_assert_eq!(parse_event(&text, None).unwrap(), e, "{}", text);
    }

    #[test]
    fn terms_print_and_parse_back(t in term(2, true)) {
        let text = t.to_string();
        prop_assert_eq!(parse_term(&text, None).unwrap(), t, "{}", text);
    }

    #[test]
    fn interventions_survive_printing(alpha in intervention()) {
        let text = format!("{alpha}X=0");
        let Event::Cond(back, _) = parse_event(&text, None).unwrap() else {
            panic!("`{text}` is not a conditional");
        };
        let map: BTreeMap<&str, &str> = alpha.iter().collect();
        let recovered: BTreeMap<&str, &str> = back.iter().collect();
        prop_assert_eq!(recovered, map);
    }

    #[test]
    fn desugar_is_idempotent(f in formula(3, true)) {
        let d = desugar(&f);
        prop_assert!(is_desugared(&d), "{}", d);
        prop_assert_eq!(desugar(&d), d);
    }

    #[test]
    fn level_is_monotone(f in formula(3, true)) {
        let mut subs = Vec::new();
        subformulas(&f, &mut subs);
        for g in subs {
            prop_assert!(g.level() <= f.level(), "{} inside {}", g, f);
        }
        let mut events = Vec::new();
        f.for_each_event(&mut |e| events.push(e));
        for e in events {
            prop_assert!(e.level() <= f.level(), "{} inside {}", e, f);
        }
        prop_assert_eq!(desugar(&f).level(), f.level());
    }

    #[test]
    fn level_reflects_the_language(e1 in event(1), e2 in event(2)) {
        prop_assert_eq!(Formula::geq(Term::p(e1.clone()), Term::zero()).level(), 1);
        prop_assert!(Formula::geq(Term::p(e2), Term::p(e1)).level() <= 2);
    }
}
