//! Formula and rule abstract syntax, printing and structural measures.

use std::collections::HashSet;
use std::fmt;

/// A temporal formula over propositional letters with `X` (next) and `U`
/// (until) as the only temporal primitives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Letter(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn letter(name: impl Into<String>) -> Self {
        Formula::Letter(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Self {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Self {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::Implies(Box::new(f), Box::new(g))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(f: Formula, g: Formula) -> Self {
        Formula::Until(Box::new(f), Box::new(g))
    }

    /// Left-nested conjunction of `parts`; `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction of `parts`; `false` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Disjunction of `parts` as a balanced tree, keeping nesting logarithmic
    /// for very wide disjunctions; `false` when empty.
    pub fn balanced_disjunction(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            n => {
                let right = parts.split_off(n / 2);
                Formula::or(
                    Formula::balanced_disjunction(parts),
                    Formula::balanced_disjunction(right),
                )
            }
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Letter(_) | Formula::True | Formula::False => vec![],
            Formula::Not(f) | Formula::Next(f) => vec![f],
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Until(f, g) => vec![f, g],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Formula::True | Formula::False)
    }

    /// True when the formula contains no `U` node.
    pub fn is_until_free(&self) -> bool {
        match self {
            Formula::Until(..) => false,
            _ => self.children().into_iter().all(Formula::is_until_free),
        }
    }

    /// Distinct letters in first-occurrence (left-to-right, pre-order) order.
    pub fn letters(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_letters(self, &mut out);
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Tree height; leaves have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Maximal nesting of `X`/`U` nodes along any branch.
    pub fn temporal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::temporal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::Next(_) | Formula::Until(..) => inner + 1,
            _ => inner,
        }
    }
}

fn collect_letters(f: &Formula, out: &mut Vec<String>) {
    if let Formula::Letter(name) = f {
        if !out.contains(name) {
            out.push(name.clone());
        }
    }
    for c in f.children() {
        collect_letters(c, out);
    }
}

/// All distinct subtrees of `f` in post-order; structurally equal subtrees
/// are reported once, at their first post-order position.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    collect_subformulas(f, &mut seen, &mut out);
    out
}

fn collect_subformulas<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>, out: &mut Vec<Formula>) {
    if seen.contains(f) {
        return;
    }
    for c in f.children() {
        collect_subformulas(c, seen, out);
    }
    seen.insert(f);
    out.push(f.clone());
}

/// Number of worlds past the evaluation point that the truth of `f` can depend
/// on in a frame whose windows have length `measure`.
pub fn reach(f: &Formula, measure: usize) -> usize {
    match f {
        Formula::Letter(_) | Formula::True | Formula::False => 0,
        Formula::Not(g) => reach(g, measure),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Implies(g, h) => {
            reach(g, measure).max(reach(h, measure))
        }
        Formula::Next(g) => 1 + reach(g, measure),
        Formula::Until(g, h) => measure + reach(g, measure).max(reach(h, measure)),
    }
}

// Binding strength, loosest first.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNTIL: u8 = 4;

fn binary_prec(f: &Formula) -> Option<u8> {
    match f {
        Formula::Implies(..) => Some(PREC_IMPLIES),
        Formula::Or(..) => Some(PREC_OR),
        Formula::And(..) => Some(PREC_AND),
        Formula::Until(..) => Some(PREC_UNTIL),
        _ => None,
    }
}

/// Prints a binary operand. A binary child is parenthesized unless it is the
/// same operator sitting on its associative side.
fn write_operand(out: &mut fmt::Formatter<'_>, parent: u8, child: &Formula, assoc_side: bool) -> fmt::Result {
    match binary_prec(child) {
        Some(p) if p == parent && assoc_side => write!(out, "{child}"),
        Some(_) => write!(out, "({child})"),
        None => write!(out, "{child}"),
    }
}

fn write_prefix_operand(out: &mut fmt::Formatter<'_>, child: &Formula) -> fmt::Result {
    if binary_prec(child).is_some() {
        write!(out, "({child})")
    } else {
        write!(out, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Letter(name) => write!(out, "{name}"),
            Formula::True => write!(out, "true"),
            Formula::False => write!(out, "false"),
            Formula::Not(f) => {
                write!(out, "!")?;
                write_prefix_operand(out, f)
            }
            Formula::Next(f) => {
                write!(out, "X ")?;
                write_prefix_operand(out, f)
            }
            Formula::And(f, g) => {
                write_operand(out, PREC_AND, f, true)?;
                write!(out, " & ")?;
                write_operand(out, PREC_AND, g, false)
            }
            Formula::Or(f, g) => {
                write_operand(out, PREC_OR, f, true)?;
                write!(out, " | ")?;
                write_operand(out, PREC_OR, g, false)
            }
            Formula::Until(f, g) => {
                write_operand(out, PREC_UNTIL, f, true)?;
                write!(out, " U ")?;
                write_operand(out, PREC_UNTIL, g, false)
            }
            Formula::Implies(f, g) => {
                write_operand(out, PREC_IMPLIES, f, false)?;
                write!(out, " -> ")?;
                write_operand(out, PREC_IMPLIES, g, true)
            }
        }
    }
}

/// Canonical text of `f`; parsing it yields `f` back.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

/// An inference rule `premises / conclusion`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    premises: Vec<Formula>,
    conclusion: Formula,
    letters: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a rule needs at least one premise")]
pub struct EmptyPremises;

impl Rule {
    pub fn new(premises: Vec<Formula>, conclusion: Formula) -> Result<Self, EmptyPremises> {
        if premises.is_empty() {
            return Err(EmptyPremises);
        }
        let mut letters = Vec::new();
        for f in premises.iter().chain(std::iter::once(&conclusion)) {
            collect_letters(f, &mut letters);
        }
        Ok(Rule {
            premises,
            conclusion,
            letters,
        })
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    /// Distinct letters of premises then conclusion, in first-occurrence order.
    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    /// Conjunction of all premises.
    pub fn premise_conjunction(&self) -> Formula {
        Formula::conjunction(self.premises.iter().cloned())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "{p}")?;
        }
        write!(out, " / {}", self.conclusion)
    }
}
