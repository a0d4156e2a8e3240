//! Non-transitive linear temporal logic.
//!
//! Time is a line of worlds where each world only sees a bounded window
//! ahead; `U` looks for its witness inside that window, and windows do not
//! compose. The crate covers parsing and printing ([`syntax`]), finite frames
//! and models ([`frames`]), evaluation ([`semantics`]), reduced normal forms
//! of rules ([`normalform`]), decision procedures with checkable certificates
//! ([`decide`]), bounded admissibility search ([`admissibility`]) and the
//! knowledge operators ([`knowledge`]).

pub mod admissibility;
pub mod decide;
pub mod frames;
pub mod io;
pub mod knowledge;
pub mod normalform;
pub mod semantics;
pub mod syntax;

pub use decide::{Countermodel, SearchCaps, Target, Verdict};
pub use frames::{FiniteLassoFrame, Frame, Model, MultiAgentModel, UniformWindowFrame, Valuation};
pub use syntax::{parse_formula, parse_rule, Formula, Rule};

/// Resource caps shared by the enumerating procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of Boolean atoms (letters times worlds) enumerated
    /// exhaustively. Never more than 63.
    pub max_atoms: usize,
    /// Default world cap for lasso searches.
    pub max_worlds: usize,
    /// Largest number of substitution tuples examined.
    pub max_tuples: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: 24,
            max_worlds: 4,
            max_tuples: 1_000_000,
        }
    }
}
