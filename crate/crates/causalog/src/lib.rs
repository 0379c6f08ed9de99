//! File formats and the command-line front end for `causalog-core`.
//!
//! The four text formats (models, graphs, proofs, simulation programs)
//! each have a `parse_*` and a `write_*` function that round-trip. The
//! [`cli`] module implements the `causalog` binary; [`exec::Parallel`]
//! spreads satisfiability branches over a thread pool.

pub mod cli;
pub mod error;
pub mod exec;
pub mod graph_file;
pub mod program_file;
pub mod proof_file;
pub mod scm_file;
pub mod text;

pub use error::{Error, Result};
