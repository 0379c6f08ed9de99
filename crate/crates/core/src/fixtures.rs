//! Bundled models and graphs: the two pairs of models separating the
//! levels of the hierarchy, the front-door graph, and a checked derivation
//! of the front-door adjustment formula.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::axioms::{Justification, ProofLine, Ref, Schema};
use crate::formula::{desugar, Event, Formula, Intervention, Prop, Term};
use crate::graph::{docalc_formulas, Dag, DoSets};
use crate::num::{int, rat};
use crate::realsolve::{ConeTerm, Poly, PsatzCertificate};
use crate::scm::{ExoSpace, Scm};
use crate::signature::Signature;

fn coin() -> ExoSpace {
    ExoSpace::new([("u0", rat(1, 2)), ("u1", rat(1, 2))]).expect("weights sum to one")
}

/// `U ~ Bernoulli(1/2)`, `X := U`, `Y := X`.
pub fn prop2_m1() -> Scm {
    let sig = Signature::binary(&["X", "Y"]);
    Scm::from_fn(sig, coin(), vec![vec![], vec![0]], |v, p, u| if v == 0 { u } else { p[0] }).expect("valid tables")
}

/// `U ~ Bernoulli(1/2)`, `Y := U`, `X := Y`.
pub fn prop2_m2() -> Scm {
    let sig = Signature::binary(&["X", "Y"]);
    Scm::from_fn(sig, coin(), vec![vec![1], vec![]], |v, p, u| if v == 0 { p[0] } else { u }).expect("valid tables")
}

/// Exogenous `U_X ~ Bernoulli(1/2)` and `U_Y ~ Unif{0,1,2}`, with points
/// labelled `x{ux}y{uy}`.
fn prop3_exo() -> (ExoSpace, Vec<(usize, usize)>) {
    let mut points = Vec::new();
    let mut coords = Vec::new();
    for ux in 0..2 {
        for uy in 0..3 {
            points.push((alloc::format!("x{ux}y{uy}"), rat(1, 6)));
            coords.push((ux, uy));
        }
    }
    (ExoSpace::new(points).expect("weights sum to one"), coords)
}

fn prop3(y_of: fn(bool, usize) -> bool) -> Scm {
    let sig = Signature::binary(&["X", "Y"]);
    let (exo, coords) = prop3_exo();
    Scm::from_fn(sig, exo, vec![vec![], vec![0]], move |v, p, u| {
        let (ux, uy) = coords[u];
        if v == 0 {
            ux
        } else {
            y_of(p[0] == 1, uy) as usize
        }
    })
    .expect("valid tables")
}

/// `X := U_X`, `Y := (X ↔ U_Y = 0)`.
pub fn prop3_m1() -> Scm {
    prop3(|x, uy| x == (uy == 0))
}

/// `X := U_X`, `Y := (X → U_Y = 0) ∧ (U_Y = 2 → X)`.
pub fn prop3_m2() -> Scm {
    prop3(|x, uy| (!x || uy == 0) && (uy != 2 || x))
}

/// The front-door graph: `W -> X -> Z -> Y` and `W -> Y`, with `W`
/// latent in the derivation.
pub fn fig1_graph() -> Dag {
    Dag::new(&["W", "X", "Z", "Y"], &[("W", "X"), ("X", "Z"), ("Z", "Y"), ("W", "Y")]).expect("acyclic")
}

/// Names of the four bundled expressivity models.
pub fn expressivity_models() -> Vec<(alloc::string::String, Scm)> {
    vec![
        ("prop2_m1".to_string(), prop2_m1()),
        ("prop2_m2".to_string(), prop2_m2()),
        ("prop3_m1".to_string(), prop3_m1()),
        ("prop3_m2".to_string(), prop3_m2()),
    ]
}

/// Certificate that `{x ≥ 0, −x − 1 ≥ 0}` has no real solution: the sum of
/// the two generators is `−1`, and adding `1 = f^{2n}` (empty `F`) gives 0.
pub fn psatz_certificate() -> PsatzCertificate {
    let x = Poly::var(0);
    PsatzCertificate {
        unknowns: vec!["x".to_string()],
        f: vec![],
        g: vec![x.clone(), -x - Poly::one()],
        h: vec![],
        cone: vec![
            ConeTerm { coeff: int(1), generators: vec![0], square: Poly::one() },
            ConeTerm { coeff: int(1), generators: vec![1], square: Poly::one() },
        ],
        ideal: vec![],
        n: 1,
    }
}

/// Binary signature of the front-door graph.
pub fn front_door_signature() -> Signature {
    Signature::binary(&["W", "X", "Z", "Y"])
}

/// The do-calculus instances licensed by the front-door graph with `W`
/// latent, in the order (rule, X, Y, Z, W):
/// `(2, ∅, Z, X, ∅)`, `(2, X, Y, Z, ∅)`, `(2, ∅, Y, Z, X)`, `(3, Z, Y, X, ∅)`
/// and `(3, ∅, X, Z, ∅)`, each for every value of its variables.
pub fn front_door_assumptions() -> Vec<Formula> {
    let sig = front_door_signature();
    type Group<'a> = (u8, &'a [&'a str], &'a [&'a str], &'a [&'a str], &'a [&'a str]);
    let groups: [Group; 5] = [
        (2, &[], &["Z"], &["X"], &[]),
        (2, &["X"], &["Y"], &["Z"], &[]),
        (2, &[], &["Y"], &["Z"], &["X"]),
        (3, &["Z"], &["Y"], &["X"], &[]),
        (3, &[], &["X"], &["Z"], &[]),
    ];
    groups
        .iter()
        .flat_map(|&(rule, x, y, z, w)| docalc_formulas(&sig, rule, &DoSets::new(x, y, z, w)).expect("variables of the signature"))
        .collect()
}

fn v(var: &str, value: u8) -> Prop {
    Prop::atom(var, value.to_string())
}

fn p_do(alpha: &[(&str, u8)], target: Prop) -> Term {
    let alpha = Intervention::new(alpha.iter().map(|(n, x)| (*n, x.to_string()))).expect("distinct variables");
    Term::p(Event::cond(alpha, target))
}

fn p_obs(target: Prop) -> Term {
    Term::p(Event::prop(target))
}

/// `P([X=1]Y=1) ≡ Σ_z P(Z=z | X=1) · Σ_x P(Y=1 | X=x ∧ Z=z) · P(X=x)`.
pub fn front_door_conclusion() -> Formula {
    let outer = (0..2u8).rev().map(|z| {
        let inner = (0..2u8).rev().map(|x| {
            Term::given(Event::prop(v("Y", 1)), Event::prop(v("X", x).and(v("Z", z)))).mul(p_obs(v("X", x)))
        });
        Term::given(Event::prop(v("Z", z)), Event::prop(v("X", 1))).mul(Term::sum(inner))
    });
    Formula::equiv(p_do(&[("X", 1)], v("Y", 1)), Term::sum(outer))
}

/// A derivation of [`front_door_conclusion`] from
/// [`front_door_assumptions`]. Every line is of level at most 2, so the
/// proof checks in both `AX2` and `AX3`.
pub fn front_door_proof() -> Vec<ProofLine> {
    let assumptions = front_door_assumptions();
    let cite = |f: Formula| -> Ref {
        let d = desugar(&f);
        Ref::Assumption(assumptions.iter().position(|a| *a == d).expect("front-door premise") + 1)
    };
    let t = p_do(&[("X", 1)], v("Y", 1));
    let d = p_obs(v("X", 1));
    let a = |z: u8| p_do(&[("X", 1)], v("Z", z));
    let b = |z: u8| p_do(&[("X", 1)], v("Y", 1).and(v("Z", z)));
    let c = |z: u8| p_do(&[("X", 1), ("Z", z)], v("Y", 1));
    let e = |z: u8| p_do(&[("Z", z)], v("Y", 1));
    let n = |z: u8| p_obs(v("Z", z).and(v("X", 1)));
    let f = |z: u8, x: u8| p_do(&[("Z", z)], v("Y", 1).and(v("X", x)));
    let g = |z: u8, x: u8| p_do(&[("Z", z)], v("X", x));
    let h = |x: u8| p_obs(v("X", x));
    let k = |z: u8, x: u8| p_obs(v("Y", 1).and(v("X", x).and(v("Z", z))));
    let m = |z: u8, x: u8| p_obs(v("X", x).and(v("Z", z)));
    let cells: Vec<(u8, u8)> = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
    let all_m = Term::product(cells.iter().map(|&(z, x)| m(z, x)));
    let other_m = |z0: u8, x0: u8| Term::product(cells.iter().filter(|&&c| c != (z0, x0)).map(|&(z, x)| m(z, x)));
    let scale = d.clone().mul(all_m.clone());

    let mut lines = Vec::new();
    let mut push = |formula: Formula, justification: Justification| -> Ref {
        lines.push(ProofLine { formula, justification });
        Ref::Line(lines.len())
    };

    let l = push(
        Formula::equiv(b(1).add(p_do(&[("X", 1)], v("Y", 1).and(v("Z", 1).not()))), t.clone()),
        Justification::Axiom(Schema::Add2),
    );
    let split_z = |s: u8| Event::cond(Intervention::single("X", "1"), v("Y", 1).and(v("Z", s)));
    let mut l = push(
        Formula::equiv(b(1).add(b(0)), t.clone()),
        Justification::DistStep(l, Event::cond(Intervention::single("X", "1"), v("Y", 1).and(v("Z", 1).not())), split_z(0)),
    );

    // Each stage rewrites the right-hand side, which is `rhs · scale`
    // except where noted.
    let rhs = |parts: Vec<Term>, by: Term| Formula::equiv(t.clone().mul(scale.clone()), Term::sum(parts).mul(by));
    l = push(rhs(vec![b(1), b(0)], scale.clone()), Justification::PolyNorm(vec![l]));

    let mut cur = vec![b(1), b(0)];
    for (i, z) in [1u8, 0].into_iter().enumerate() {
        cur[i] = c(z).mul(a(z));
        let premise = cite(Formula::equiv(c(z), Term::given(Event::cond(Intervention::single("X", "1"), v("Y", 1)), Event::cond(Intervention::single("X", "1"), v("Z", z)))));
        l = push(rhs(cur.clone(), scale.clone()), Justification::Subst(l, premise));
    }
    for (i, z) in [1u8, 0].into_iter().enumerate() {
        cur[i] = e(z).mul(a(z));
        l = push(rhs(cur.clone(), scale.clone()), Justification::Subst(l, cite(Formula::equiv(c(z), e(z)))));
    }
    // Fold `d` into the sum so that `a_z · d` can be replaced by `n_z`.
    let mut cur: Vec<Term> = [1u8, 0].iter().map(|&z| e(z).mul(a(z)).mul(d.clone())).collect();
    l = push(rhs(cur.clone(), all_m.clone()), Justification::PolyNorm(vec![l]));
    for (i, z) in [1u8, 0].into_iter().enumerate() {
        cur[i] = e(z).mul(n(z));
        let premise = cite(Formula::equiv(a(z), Term::given(Event::prop(v("Z", z)), Event::prop(v("X", 1)))));
        l = push(rhs(cur.clone(), all_m.clone()), Justification::Subst(l, premise));
    }

    // `P([Z=z]Y=1)` split on `X`.
    let mut splits = Vec::new();
    for z in [1u8, 0] {
        let alpha = Intervention::single("Z", z.to_string());
        let s = push(Formula::equiv(f(z, 1).add(Term::p(Event::cond(alpha.clone(), v("Y", 1).and(v("X", 1).not())))), e(z)), Justification::Axiom(Schema::Add2));
        let s = push(
            Formula::equiv(f(z, 1).add(f(z, 0)), e(z)),
            Justification::DistStep(s, Event::cond(alpha.clone(), v("Y", 1).and(v("X", 1).not())), Event::cond(alpha, v("Y", 1).and(v("X", 0)))),
        );
        splits.push(s);
    }
    let rhs = |parts: Vec<Term>| Formula::equiv(t.clone().mul(scale.clone()), Term::sum(parts));
    let mut cur: Vec<Term> =
        [1u8, 0].iter().flat_map(|&z| [1u8, 0].map(|x| n(z).mul(f(z, x)).mul(all_m.clone()))).collect();
    let mut staged = [1u8, 0].iter().map(|&z| n(z).mul(e(z)).mul(all_m.clone())).collect::<Vec<_>>();
    for (i, split) in splits.iter().enumerate() {
        staged[i] = cur[2 * i].clone().add(cur[2 * i + 1].clone());
        l = push(rhs(staged.clone()), Justification::Subst(l, *split));
    }
    let index = |z: u8, x: u8| 2 * (1 - z as usize) + (1 - x as usize);
    for &(z, x) in &cells {
        cur[index(z, x)] = n(z).mul(g(z, x)).mul(k(z, x)).mul(other_m(z, x));
        let premise = cite(Formula::equiv(
            Term::given(Event::cond(Intervention::single("Z", z.to_string()), v("Y", 1)), Event::cond(Intervention::single("Z", z.to_string()), v("X", x))),
            Term::given(Event::prop(v("Y", 1)), Event::prop(v("X", x).and(v("Z", z)))),
        ));
        l = push(rhs(cur.clone()), Justification::Subst(l, premise));
    }
    for &(z, x) in &cells {
        cur[index(z, x)] = n(z).mul(h(x)).mul(k(z, x)).mul(other_m(z, x));
        l = push(rhs(cur.clone()), Justification::Subst(l, cite(Formula::equiv(g(z, x), h(x)))));
    }
    push(front_door_conclusion(), Justification::PolyNorm(vec![l]));
    lines
}
