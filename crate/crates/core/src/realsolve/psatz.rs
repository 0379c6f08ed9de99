//! Positivstellensatz certificate checking.
//!
//! A certificate for the system `{f ≠ 0 : f ∈ F} ∪ {g ≥ 0 : g ∈ G} ∪
//! {h = 0 : h ∈ H}` consists of a cone element `g` (a nonnegative
//! combination of products of `G` members times squares), an ideal element
//! `Σ mᵢ·hᵢ`, and an exponent `n`, such that `g + Σ mᵢ·hᵢ + (∏F)^{2n}` is
//! identically zero. Such an identity rules out every real solution.

use alloc::vec::Vec;

use num_traits::Signed;

use super::{Poly, PolySystem, Rel};
use crate::num::Rat;
use crate::{Error, Result};

/// `coeff · ∏ G[generators] · square²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeTerm {
    pub coeff: Rat,
    pub generators: Vec<usize>,
    pub square: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsatzCertificate {
    pub unknowns: Vec<alloc::string::String>,
    pub f: Vec<Poly>,
    pub g: Vec<Poly>,
    pub h: Vec<Poly>,
    pub cone: Vec<ConeTerm>,
    /// One multiplier per member of `h`.
    pub ideal: Vec<Poly>,
    pub n: u32,
}

impl PsatzCertificate {
    /// The system whose infeasibility the certificate claims.
    pub fn system(&self) -> PolySystem {
        let mut s = PolySystem { unknowns: self.unknowns.clone(), constraints: Vec::new() };
        for p in &self.f {
            s.push(p.clone(), Rel::Neq);
        }
        for p in &self.g {
            s.push(p.clone(), Rel::Geq);
        }
        for p in &self.h {
            s.push(p.clone(), Rel::Eq);
        }
        s
    }

    fn check_structure(&self) -> Result<()> {
        for (k, t) in self.cone.iter().enumerate() {
            if t.coeff.is_negative() {
                return Err(Error::MalformedCertificate(alloc::format!("cone term {k} has a negative coefficient")));
            }
            if let Some(&i) = t.generators.iter().find(|&&i| i >= self.g.len()) {
                return Err(Error::MalformedCertificate(alloc::format!("cone term {k} cites missing generator {i}")));
            }
        }
        if self.ideal.len() != self.h.len() {
            return Err(Error::MalformedCertificate("the ideal part needs one multiplier per equation".into()));
        }
        Ok(())
    }

    /// `g + h + f^{2n}` in normal form.
    pub fn expansion(&self) -> Result<Poly> {
        self.check_structure()?;
        let mut total = Poly::zero();
        for t in &self.cone {
            let mut p = Poly::constant(t.coeff.clone());
            for &i in &t.generators {
                p = &p * &self.g[i];
            }
            p = &p * &(&t.square * &t.square);
            total = total + p;
        }
        for (m, h) in self.ideal.iter().zip(&self.h) {
            total = total + m * h;
        }
        let f = self.f.iter().fold(Poly::one(), |acc, p| &acc * p);
        Ok(total + f.pow(2 * self.n))
    }

    /// Whether the certificate is well formed and its identity holds.
    pub fn verify(&self) -> Result<bool> {
        Ok(self.expansion()?.is_zero())
    }
}
