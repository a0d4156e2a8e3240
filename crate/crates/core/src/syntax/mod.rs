//! Formula and rule syntax: AST, text grammar, printing, structural measures
//! and derived-operator expansion.

mod derived;
mod formula;
mod parser;

pub use derived::{boxed, diamond, expand_derived, next_iter, DerivedOp, ExpandError};
pub use formula::{print_formula, reach, subformulas, EmptyPremises, Formula, Rule};
pub use parser::{parse_formula, parse_rule, ParseError};
