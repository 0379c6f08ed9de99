//! Polynomial constraint systems over the reals: canonical normalization,
//! an exact linear tier, a verified numeric witness search, a sound
//! relaxation-based refuter, SMT-LIB export and import, and
//! Positivstellensatz certificate checking.

mod linear;
mod nra;
mod poly;
mod psatz;
mod relax;
mod search;

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

pub use linear::{decide_linear, LinearVerdict};
pub use nra::{export_nra, import_nra};
pub use poly::{normalize, Interner, Monomial, Poly, PolyDisplay};
pub use psatz::{ConeTerm, PsatzCertificate};
pub use relax::{refute_in_box, RelaxConfig, RelaxOutcome};
pub use search::{search_witness, SearchConfig};

use crate::num::Rat;

/// Relation of a constraint polynomial to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Geq,
    Gt,
    Neq,
}

impl Rel {
    pub fn holds(self, v: &Rat) -> bool {
        match self {
            Rel::Eq => v.is_zero(),
            Rel::Geq => !v.is_negative(),
            Rel::Gt => v.is_positive(),
            Rel::Neq => !v.is_zero(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Geq => ">=",
            Rel::Gt => ">",
            Rel::Neq => "!=",
        }
    }
}

/// `poly rel 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub poly: Poly,
    pub rel: Rel,
}

/// Constraints over named unknowns; unknown `i` is `unknowns[i]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolySystem {
    pub unknowns: Vec<String>,
    pub constraints: Vec<Constraint>,
}

/// Result of a possibly incomplete decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Vec<Rat>),
    Unsat,
    Unknown,
}

impl PolySystem {
    pub fn new() -> Self {
        PolySystem::default()
    }

    pub fn with_unknowns<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        PolySystem { unknowns: names.into_iter().map(String::from).collect(), constraints: Vec::new() }
    }

    /// Id of `name`, declaring it if new.
    pub fn unknown(&mut self, name: &str) -> u32 {
        match self.unknowns.iter().position(|n| n == name) {
            Some(i) => i as u32,
            None => {
                self.unknowns.push(String::from(name));
                (self.unknowns.len() - 1) as u32
            }
        }
    }

    pub fn push(&mut self, poly: Poly, rel: Rel) {
        self.constraints.push(Constraint { poly, rel });
    }

    pub fn degree(&self) -> usize {
        self.constraints.iter().map(|c| c.poly.degree()).max().unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// Exact check of every constraint at `point`.
    pub fn holds_at(&self, point: &[Rat]) -> bool {
        point.len() == self.unknowns.len() && self.constraints.iter().all(|c| c.rel.holds(&c.poly.eval(point)))
    }

    /// Index of the first constraint violated at `point`.
    pub fn first_violation(&self, point: &[Rat]) -> Option<usize> {
        self.constraints.iter().position(|c| !c.rel.holds(&c.poly.eval(point)))
    }
}

impl core::fmt::Display for PolySystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{} {} 0", c.poly.display(&self.unknowns), c.rel.symbol())?;
        }
        Ok(())
    }
}

/// Decides `s` with every tier: exact for linear systems; for nonlinear
/// ones, a verified witness search, then relaxation refutation over the
/// box `[lo, hi]^n`.
pub fn decide(s: &PolySystem, search: &SearchConfig, relax: &RelaxConfig) -> crate::Result<Verdict> {
    if s.is_linear() {
        return Ok(match decide_linear(s)? {
            LinearVerdict::Sat(x) => Verdict::Sat(x),
            LinearVerdict::Unsat => Verdict::Unsat,
        });
    }
    if let Some(x) = search_witness(s, search) {
        return Ok(Verdict::Sat(x));
    }
    Ok(match refute_in_box(s, relax)? {
        RelaxOutcome::Refuted => Verdict::Unsat,
        RelaxOutcome::Witness(x) => Verdict::Sat(x),
        RelaxOutcome::Inconclusive => Verdict::Unknown,
    })
}
