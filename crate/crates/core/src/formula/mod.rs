//! Syntax of the base languages and the probabilistic term languages:
//! abstract syntax, a text parser, a printer that the parser inverts,
//! desugaring into the primitive connectives, and level classification.

mod ast;
mod desugar;
mod parse;
mod print;

pub use ast::{Atom, Event, Formula, Intervention, Prop, Term};
pub use desugar::{desugar, is_desugared};
pub use parse::{parse, parse_event, parse_formula, parse_term, Parsed};
pub use print::EventDisplay;
