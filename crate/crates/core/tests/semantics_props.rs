mod common;

use causalog_core::baselogic::{base_valid, Limits};
use causalog_core::formula::{Event, Formula, Intervention};
use causalog_core::scm::Scm;
use causalog_core::semantics::{model_check, prob};
use common::{equivalent_variant, event, formula, formula_value, random_model, rng, sig3, ModelSpec};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn model(seed: u64) -> Scm {
    random_model(seed, &ModelSpec::default())
}

/// Whether every conditional probability of `f` has a positive condition.
fn defined(m: &Scm, f: &Formula) -> bool {
    let mut ok = true;
    f.for_each_term(&mut |t| {
        ok &= common::term_value(m, t).is_some();
    });
    ok
}

proptest! {
    #[test]
    fn probabilities_match_the_reference(seed in any::<u64>(), e in event(3)) {
        let m = model(seed);
        let p = prob(&m, &e).unwrap();
        prop_assert_eq!(&p, &common::prob(&m, &e));
        prop_assert!(!p.is_negative() && p <= causalog_core::Rat::one());
    }

    #[test]
    fn additivity_splits_exactly(seed in any::<u64>(), e in event(3), z in event(3)) {
        let m = model(seed);
        let both = prob(&m, &e.clone().and(z.clone())).unwrap();
        let rest = prob(&m, &e.clone().and(z.not())).unwrap();
        prop_assert_eq!(both + rest, prob(&m, &e).unwrap());
    }

    #[test]
    fn truth_constants(seed in any::<u64>(), alpha in common::intervention()) {
        let m = model(seed);
        prop_assert!(prob(&m, &Event::bot()).unwrap().is_zero());
        prop_assert!(prob(&m, &Event::top()).unwrap().is_one());
        prop_assert!(prob(&m, &Event::cond(alpha, causalog_core::formula::Prop::Top)).unwrap().is_one());
    }

    #[test]
    fn equivalent_base_formulas_have_equal_probability(seed in any::<u64>(), e in event(3), other in event(3), pick in any::<bool>()) {
        let m = model(seed);
        let z = if pick { equivalent_variant(&e, &mut rng(seed)) } else { other };
        let sig = sig3();
        if base_valid(&e, &z, Some(&sig), &Limits::default()).unwrap().is_none() {
            prop_assert_eq!(prob(&m, &e).unwrap(), prob(&m, &z).unwrap(), "{} vs {}", e, z);
        } else {
            prop_assert!(!pick, "{} and its variant {} were told apart", e, z);
        }
    }

    #[test]
    fn model_check_matches_the_reference(seed in any::<u64>(), f in formula(3, true)) {
        let m = model(seed);
        prop_assume!(defined(&m, &f));
        prop_assert_eq!(model_check(&m, &f).unwrap(), formula_value(&m, &f).unwrap(), "{}", f);
    }

    #[test]
    fn interventions_leave_the_point_mass_alone(seed in any::<u64>(), alpha in common::intervention()) {
        let m = model(seed);
        let e = Event::cond(alpha.clone(), causalog_core::formula::Prop::conj(alpha.atoms().into_iter().map(causalog_core::formula::Prop::Atom)));
        prop_assert!(prob(&m, &e).unwrap().is_one());
        prop_assert_eq!(alpha == Intervention::top(), e.level() == 1);
    }
}
