//! Derived temporal and knowledge operators, expanded into primitive formulas.
//!
//! `Box` and `Diamond` are defined through `U`, so they inherit the bounded
//! window semantics: `Box f = !(true U !f)`, `Diamond f = true U f`.
//!
//! The knowledge operators are intended for models read in the past
//! direction (`X` as "previous moment", `U` ranging over remembered past).
//! Nothing in the expansion depends on that reading.

use std::fmt;

use thiserror::Error;

use super::formula::Formula;

/// Operators that are macros over the primitive connectives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DerivedOp {
    Box,
    Diamond,
    /// `Box` applied `k ≥ 1` times.
    BoxIter(usize),
    /// `Diamond` applied `k ≥ 1` times.
    DiamondIter(usize),
    /// `X` applied `k ≥ 0` times.
    NextIter(usize),
    /// `f U (X^(m+1) !f & X^m f)`: `f` was acquired `m` steps away and held since.
    KPast,
    /// `Box !f & Diamond(!f & X KPast f)`.
    K1Past,
    /// `Box^k !f & Diamond^k(!f & X KPast f)`.
    K2Past(usize),
    /// `f U (f & X !f)`: `f` was discovered once and held since.
    KDiscovered,
    /// `!(true U !f)`: `f` always held within the window.
    KRigid,
    /// `f U trigger`: `f` held since `trigger`.
    KSince(Formula),
    /// The per-agent clause of consensus knowledge, `Diamond f & Box(!f -> X !f)`.
    /// Consensus itself quantifies this clause over every agent valuation.
    KConsensus,
}

impl DerivedOp {
    /// True when the expansion depends on the intransitivity measure `m`.
    pub fn needs_measure(&self) -> bool {
        matches!(self, DerivedOp::KPast | DerivedOp::K1Past | DerivedOp::K2Past(_))
    }

    /// True for the operators that read as knowledge.
    pub fn is_knowledge(&self) -> bool {
        matches!(
            self,
            DerivedOp::KPast
                | DerivedOp::K1Past
                | DerivedOp::K2Past(_)
                | DerivedOp::KDiscovered
                | DerivedOp::KRigid
                | DerivedOp::KSince(_)
                | DerivedOp::KConsensus
        )
    }

    pub fn arity(&self) -> usize {
        1
    }
}

impl fmt::Display for DerivedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivedOp::Box => write!(f, "box"),
            DerivedOp::Diamond => write!(f, "diamond"),
            DerivedOp::BoxIter(k) => write!(f, "box-iter({k})"),
            DerivedOp::DiamondIter(k) => write!(f, "diamond-iter({k})"),
            DerivedOp::NextIter(k) => write!(f, "next-iter({k})"),
            DerivedOp::KPast => write!(f, "k-past"),
            DerivedOp::K1Past => write!(f, "k1-past"),
            DerivedOp::K2Past(k) => write!(f, "k2-past({k})"),
            DerivedOp::KDiscovered => write!(f, "k-discovered"),
            DerivedOp::KRigid => write!(f, "k-rigid"),
            DerivedOp::KSince(t) => write!(f, "k-since({t})"),
            DerivedOp::KConsensus => write!(f, "k-consensus"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("operator {op} takes {expected} argument(s), got {got}")]
    Arity { op: String, expected: usize, got: usize },
    #[error("operator {0} needs the intransitivity measure m")]
    MissingMeasure(String),
    #[error("operator {0} needs a positive measure m")]
    ZeroMeasure(String),
    #[error("operator {0} needs a positive iteration count")]
    ZeroCount(String),
}

pub fn boxed(f: Formula) -> Formula {
    Formula::not(Formula::until(Formula::True, Formula::not(f)))
}

pub fn diamond(f: Formula) -> Formula {
    Formula::until(Formula::True, f)
}

pub fn next_iter(k: usize, f: Formula) -> Formula {
    (0..k).fold(f, |acc, _| Formula::next(acc))
}

fn k_past(m: usize, f: Formula) -> Formula {
    let acquired = Formula::and(
        next_iter(m + 1, Formula::not(f.clone())),
        next_iter(m, f.clone()),
    );
    Formula::until(f, acquired)
}

/// Expands `op` applied to `args`. `m` is required by the `KPast` family.
pub fn expand_derived(op: &DerivedOp, args: &[Formula], m: Option<usize>) -> Result<Formula, ExpandError> {
    if args.len() != op.arity() {
        return Err(ExpandError::Arity {
            op: op.to_string(),
            expected: op.arity(),
            got: args.len(),
        });
    }
    let measure = || -> Result<usize, ExpandError> {
        match m {
            None => Err(ExpandError::MissingMeasure(op.to_string())),
            Some(0) => Err(ExpandError::ZeroMeasure(op.to_string())),
            Some(m) => Ok(m),
        }
    };
    let positive = |k: usize| -> Result<usize, ExpandError> {
        if k == 0 {
            Err(ExpandError::ZeroCount(op.to_string()))
        } else {
            Ok(k)
        }
    };
    let f = args[0].clone();
    let expanded = match op {
        DerivedOp::Box => boxed(f),
        DerivedOp::Diamond => diamond(f),
        DerivedOp::BoxIter(k) => (0..positive(*k)?).fold(f, |acc, _| boxed(acc)),
        DerivedOp::DiamondIter(k) => (0..positive(*k)?).fold(f, |acc, _| diamond(acc)),
        DerivedOp::NextIter(k) => next_iter(*k, f),
        DerivedOp::KPast => k_past(measure()?, f),
        DerivedOp::K1Past => {
            let m = measure()?;
            let not_f = Formula::not(f.clone());
            Formula::and(
                boxed(not_f.clone()),
                diamond(Formula::and(not_f, Formula::next(k_past(m, f)))),
            )
        }
        DerivedOp::K2Past(k) => {
            let m = measure()?;
            let k = positive(*k)?;
            let not_f = Formula::not(f.clone());
            let always_not = (0..k).fold(not_f.clone(), |acc, _| boxed(acc));
            let earlier = (0..k).fold(
                Formula::and(not_f, Formula::next(k_past(m, f))),
                |acc, _| diamond(acc),
            );
            Formula::and(always_not, earlier)
        }
        DerivedOp::KDiscovered => Formula::until(
            f.clone(),
            Formula::and(f.clone(), Formula::next(Formula::not(f))),
        ),
        DerivedOp::KRigid => boxed(f),
        DerivedOp::KSince(trigger) => Formula::until(f, trigger.clone()),
        DerivedOp::KConsensus => Formula::and(
            diamond(f.clone()),
            boxed(Formula::implies(
                Formula::not(f.clone()),
                Formula::next(Formula::not(f)),
            )),
        ),
    };
    Ok(expanded)
}
