//! Exact model checking and decision procedures for the probabilistic causal
//! languages of association, intervention and counterfactuals, interpreted
//! over finite structural causal models and bounded simulation programs.
//!
//! Everything here is `no_std` with `alloc`. Probabilities are exact
//! [`Rat`] values; floating point only appears inside the heuristic witness
//! search, and every answer it produces is re-verified exactly.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod axioms;
pub mod baselogic;
mod error;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod num;
pub mod realsolve;
pub mod sat;
pub mod scm;
pub mod semantics;
pub mod signature;
pub mod simprog;

pub use error::Error;
pub use num::Rat;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
