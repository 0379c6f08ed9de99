//! Incomplete witness search for nonlinear systems over the unit box.
//!
//! Each start runs projected gradient descent on a squared-violation
//! penalty. The numeric point is then turned into a rational candidate two
//! ways: rounding every coordinate, or rounding just enough unknowns that
//! the rest of the system becomes linear and solving that part exactly.
//! Only exactly verified candidates are returned.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linear::{decide_linear, LinearVerdict};
use super::{Constraint, PolySystem, Rel};
use crate::num::{approximate, Rat};

/// Effort and seed for [`search_witness`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { starts: 8, iterations: 400, seed: 0 }
    }
}

const MARGIN: f64 = 1e-4;
const DENOMINATORS: [u64; 8] = [2, 4, 8, 12, 16, 64, 256, 4096];

fn penalty(s: &PolySystem, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let mut total = 0.0;
    let mut g = grad;
    for c in &s.constraints {
        let v = c.poly.eval_f64(x);
        let r = match c.rel {
            Rel::Eq => v,
            Rel::Geq => v.min(0.0),
            Rel::Gt => (v - MARGIN).min(0.0),
            Rel::Neq => {
                if v.abs() < MARGIN {
                    if v >= 0.0 {
                        v - MARGIN
                    } else {
                        v + MARGIN
                    }
                } else {
                    0.0
                }
            }
        };
        if r != 0.0 {
            total += r * r;
            if let Some(g) = g.as_deref_mut() {
                c.poly.grad_f64(x, g, 2.0 * r);
            }
        }
    }
    total
}

fn descend(s: &PolySystem, x: &mut [f64], iterations: usize) {
    let n = x.len();
    let mut step = 0.5;
    let mut grad = vec![0.0; n];
    let mut cur = penalty(s, x, None);
    let mut trial = vec![0.0; n];
    for _ in 0..iterations {
        if cur < 1e-20 {
            break;
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        penalty(s, x, Some(&mut grad));
        let mut improved = false;
        for _ in 0..30 {
            for i in 0..n {
                trial[i] = (x[i] - step * grad[i]).clamp(0.0, 1.0);
            }
            let p = penalty(s, &trial, None);
            if p < cur {
                x.copy_from_slice(&trial);
                cur = p;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
}

/// Unknowns to fix so that every remaining monomial has at most one
/// unfixed factor. Unknowns shared by many nonlinear monomials go first.
fn linearizing_set(s: &PolySystem) -> BTreeSet<u32> {
    let mut monos: Vec<Vec<u32>> = Vec::new();
    for c in &s.constraints {
        for (m, _) in c.poly.terms() {
            if m.degree() >= 2 {
                monos.push(m.vars().to_vec());
            }
        }
    }
    let mut freq: BTreeMap<u32, usize> = BTreeMap::new();
    for m in &monos {
        for &v in m {
            *freq.entry(v).or_default() += 1;
        }
    }
    let mut fixed = BTreeSet::new();
    for m in &monos {
        loop {
            let free: Vec<u32> = m.iter().copied().filter(|v| !fixed.contains(v)).collect();
            if free.len() <= 1 {
                break;
            }
            let pick = *free.iter().max_by_key(|v| (freq[v], core::cmp::Reverse(**v))).expect("nonempty");
            fixed.insert(pick);
        }
    }
    fixed
}

fn repair(s: &PolySystem, x: &[f64], fix: &BTreeSet<u32>) -> Option<Vec<Rat>> {
    for &den in &DENOMINATORS {
        let snapped: Vec<Rat> = x.iter().map(|&v| approximate(v, den)).collect();
        if s.holds_at(&snapped) {
            return Some(snapped);
        }
        if fix.is_empty() {
            continue;
        }
        let fixed: BTreeMap<u32, Rat> = fix.iter().map(|&v| (v, snapped[v as usize].clone())).collect();
        let mut reduced = PolySystem { unknowns: s.unknowns.clone(), constraints: Vec::new() };
        for c in &s.constraints {
            reduced.constraints.push(Constraint { poly: c.poly.partial_eval(&fixed), rel: c.rel });
        }
        for (&v, q) in &fixed {
            let p = super::Poly::var(v) - super::Poly::constant(q.clone());
            reduced.push(p, Rel::Eq);
        }
        if let Ok(LinearVerdict::Sat(w)) = decide_linear(&reduced) {
            if s.holds_at(&w) {
                return Some(w);
            }
        }
    }
    None
}

/// Looks for a rational point of `[0,1]^n` satisfying `s`. Never returns an
/// unverified point; `None` means the search was inconclusive.
pub fn search_witness(s: &PolySystem, cfg: &SearchConfig) -> Option<Vec<Rat>> {
    let n = s.unknowns.len();
    if s.is_linear() {
        if let Ok(LinearVerdict::Sat(w)) = decide_linear(s) {
            return Some(w);
        }
    }
    let fix = linearizing_set(s);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for start in 0..cfg.starts {
        let mut x: Vec<f64> = if start == 0 { vec![0.5; n] } else { (0..n).map(|_| rng.random_range(0.0..1.0)).collect() };
        descend(s, &mut x, cfg.iterations);
        if let Some(w) = repair(s, &x, &fix) {
            debug_assert!(s.holds_at(&w));
            return Some(w);
        }
    }
    None
}
