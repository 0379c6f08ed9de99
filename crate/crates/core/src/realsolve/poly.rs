//! Sparse multivariate polynomials with exact rational coefficients, and
//! normalization of probability terms into them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::formula::Term;
use crate::num::{fmt_rat, to_f64, Rat};

/// A sorted multiset of unknown ids. Ordered by degree, then
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(id: u32) -> Self {
        Monomial(alloc::vec![id])
    }

    pub fn from_vars(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        Monomial(ids)
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                v.push(self.0[i]);
                i += 1;
            } else {
                v.push(other.0[j]);
                j += 1;
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Monomial(v)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &v in &self.0 {
            if j < other.0.len() && other.0[j] == v {
                j += 1;
            } else if j < other.0.len() && other.0[j] < v {
                return None;
            } else {
                rest.push(v);
            }
        }
        (j == other.0.len()).then_some(Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in canonical form: no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(q: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), q);
        p
    }

    pub fn var(id: u32) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(id), Rat::one());
        p
    }

    /// Builds a polynomial from (monomial, coefficient) pairs, merging
    /// repeats.
    pub fn from_terms(items: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in items {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c·m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one())
    }

    /// The constant value if the polynomial has no unknowns.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.degree() {
            0 => Some(self.constant_term()),
            _ => None,
        }
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.0.iter().copied()).collect()
    }

    /// Linear part as (unknown, coefficient) pairs and the constant.
    /// Only meaningful when [`Poly::is_linear`] holds.
    pub fn linear_form(&self) -> (Vec<(u32, Rat)>, Rat) {
        let mut coeffs = Vec::new();
        for (m, c) in &self.terms {
            if m.degree() == 1 {
                coeffs.push((m.0[0], c.clone()));
            }
        }
        (coeffs, self.constant_term())
    }

    pub fn scale(&self, q: &Rat) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &v in &m.0 {
                t *= &point[v as usize];
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| m.0.iter().fold(to_f64(c), |acc, &v| acc * point[v as usize]))
            .sum()
    }

    /// Partial derivative by unknown `id`, evaluated numerically.
    pub fn grad_f64(&self, point: &[f64], out: &mut [f64], weight: f64) {
        for (m, c) in &self.terms {
            let c = to_f64(c) * weight;
            for (k, &v) in m.0.iter().enumerate() {
                if k > 0 && m.0[k - 1] == v {
                    continue;
                }
                let mult = m.0.iter().filter(|&&x| x == v).count() as f64;
                let mut t = c * mult;
                let mut skipped = false;
                for &w in &m.0 {
                    if w == v && !skipped {
                        skipped = true;
                        continue;
                    }
                    t *= point[w as usize];
                }
                out[v as usize] += t;
            }
        }
    }

    /// Substitutes `subs[i]` for unknown `i`.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for &v in &m.0 {
                t = &t * &subs[v as usize];
            }
            out = out + t;
        }
        out
    }

    /// Fixes some unknowns to constants, leaving the rest in place.
    pub fn partial_eval(&self, fixed: &BTreeMap<u32, Rat>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &v in &m.0 {
                match fixed.get(&v) {
                    Some(x) => coeff *= x,
                    None => rest.push(v),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Renders with the given unknown names.
    /// Largest monomial with its coefficient. The order is graded and
    /// multiplicative, so leading terms multiply.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// `self / d` when `d` divides `self` exactly. A single polynomial is a
    /// Gröbner basis of the ideal it generates, so `None` means `self` is
    /// not a multiple of `d`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(dm)?;
            let c = rc / dc;
            let t = Poly::from_terms([(m, c)]);
            r = r - &t * d;
            q = q + t;
        }
        Some(q)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl core::ops::Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl core::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl core::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl core::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

impl core::ops::Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl core::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl core::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl core::ops::Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        // Highest degree first reads naturally.
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let unit = a.is_one() && m.degree() > 0;
            if !unit {
                f.write_str(&fmt_rat(&a))?;
            }
            for (i, &v) in m.0.iter().enumerate() {
                if i > 0 || !unit {
                    f.write_str("*")?;
                }
                match self.names.get(v as usize) {
                    Some(n) => f.write_str(n)?,
                    None => write!(f, "x{v}")?,
                }
            }
        }
        Ok(())
    }
}

/// Assigns unknown ids to the probability leaves of terms. Conditional
/// probabilities are opaque leaves of their own.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    leaves: Vec<Term>,
    index: BTreeMap<Term, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Interner::default()
    }

    pub fn id(&mut self, leaf: &Term) -> u32 {
        if let Some(&i) = self.index.get(leaf) {
            return i;
        }
        let i = self.leaves.len() as u32;
        self.leaves.push(leaf.clone());
        self.index.insert(leaf.clone(), i);
        i
    }

    pub fn get(&self, leaf: &Term) -> Option<u32> {
        self.index.get(leaf).copied()
    }

    pub fn leaves(&self) -> &[Term] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Leaf names, rendered as terms.
    pub fn names(&self) -> Vec<String> {
        self.leaves.iter().map(|t| alloc::format!("{t}")).collect()
    }
}

/// Expanded canonical form of `t`. Two terms are equal in the polynomial
/// calculus exactly when their normal forms coincide.
pub fn normalize(t: &Term, interner: &mut Interner) -> Poly {
    match t {
        Term::Prob(_) | Term::CondProb(..) => Poly::var(interner.id(t)),
        Term::Const(q) => Poly::constant(q.clone()),
        Term::Add(a, b) => normalize(a, interner) + normalize(b, interner),
        Term::Mul(a, b) => normalize(a, interner) * normalize(b, interner),
        Term::Neg(a) => -normalize(a, interner),
    }
}
