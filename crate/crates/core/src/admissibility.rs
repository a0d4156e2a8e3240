//! Admissibility of rules in the logic of uniform intransitivity `m`.
//!
//! A rule is admissible when every substitution instance whose premises are
//! theorems has a theorem conclusion. We only ever *refute* admissibility, by
//! finding such an instance in a bounded pool of substitutions; an exhausted
//! pool is reported as [`AdmissibilityReport::NoRefutationFound`], never as a
//! proof. Two cheap screens do establish admissibility outright.

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::decide::{decide_uniform_theorem, Verdict};
use crate::frames::FrameError;
use crate::syntax::{Formula, Rule};
use crate::Limits;

/// Images of a rule's letters.
pub type Substitution = BTreeMap<String, Formula>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("letter {0} has no image under the substitution")]
    Unmapped(String),
}

/// Simultaneous replacement of every letter of `f` by its image.
pub fn apply_substitution(f: &Formula, s: &Substitution) -> Result<Formula, SubstitutionError> {
    let go = |g: &Formula| apply_substitution(g, s);
    Ok(match f {
        Formula::Letter(x) => s.get(x).cloned().ok_or_else(|| SubstitutionError::Unmapped(x.clone()))?,
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Not(a) => Formula::not(go(a)?),
        Formula::Next(a) => Formula::next(go(a)?),
        Formula::And(a, b) => Formula::and(go(a)?, go(b)?),
        Formula::Or(a, b) => Formula::or(go(a)?, go(b)?),
        Formula::Implies(a, b) => Formula::implies(go(a)?, go(b)?),
        Formula::Until(a, b) => Formula::until(go(a)?, go(b)?),
    })
}

pub fn apply_to_rule(r: &Rule, s: &Substitution) -> Result<Rule, SubstitutionError> {
    let premises = r
        .premises()
        .iter()
        .map(|p| apply_substitution(p, s))
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = apply_substitution(r.conclusion(), s)?;
    Ok(Rule::new(premises, conclusion).expect("premises stay nonempty"))
}

/// Upper bound on the pool size at `depth` over `letters` letters.
pub fn pool_size_bound(letters: usize, depth: usize) -> u128 {
    let mut size: u128 = 2 + letters as u128;
    for _ in 0..depth {
        size = (2 + letters as u128)
            .saturating_add(size.saturating_mul(2))
            .saturating_add(size.saturating_mul(size).saturating_mul(2));
    }
    size
}

/// All formulas of tree depth at most `depth` built from `true`, `false`,
/// the given letters, `!`, `X`, `U` and `&`, structurally deduplicated.
/// Order: by depth of construction, then constants, letters, `!`, `X`, `U`, `&`.
pub fn substitution_pool(letters: &[&str], depth: usize) -> Vec<Formula> {
    let mut pool: Vec<Formula> = vec![Formula::True, Formula::False];
    pool.extend(letters.iter().map(|x| Formula::letter(*x)));
    for _ in 0..depth {
        let prev = pool.clone();
        let mut seen: HashSet<Formula> = prev.iter().cloned().collect();
        let mut push = |f: Formula, pool: &mut Vec<Formula>| {
            if seen.insert(f.clone()) {
                pool.push(f);
            }
        };
        for a in &prev {
            push(Formula::not(a.clone()), &mut pool);
        }
        for a in &prev {
            push(Formula::next(a.clone()), &mut pool);
        }
        for a in &prev {
            for b in &prev {
                push(Formula::until(a.clone(), b.clone()), &mut pool);
            }
        }
        for a in &prev {
            for b in &prev {
                push(Formula::and(a.clone(), b.clone()), &mut pool);
            }
        }
    }
    pool
}

/// Why a screen proved the rule admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScreenReason {
    /// The conclusion is a theorem, so every instance of it is.
    ConclusionTheorem,
    /// The negation of this premise is a theorem, so no instance of the
    /// premise is one.
    PremiseUnsatisfiable(usize),
}

impl std::fmt::Display for ScreenReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScreenReason::ConclusionTheorem => write!(f, "conclusion is a theorem"),
            ScreenReason::PremiseUnsatisfiable(i) => write!(f, "premise {} is unsatisfiable", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityReport {
    /// An instance with theorem premises and a refuted conclusion.
    Refuted {
        substitution: Substitution,
        premise_verdicts: Vec<Verdict>,
        conclusion_certificate: Verdict,
    },
    /// The bounded pool held no refuting instance. This is not a proof of
    /// admissibility.
    NoRefutationFound {
        depth: usize,
        signature: Vec<String>,
        pool_size: u128,
        tuples_checked: u128,
        /// Instances where a premise or the conclusion hit the atom cap.
        inconclusive: usize,
        note: Option<String>,
    },
    AdmissibleScreen(ScreenReason),
}

impl AdmissibilityReport {
    pub fn status(&self) -> &'static str {
        match self {
            AdmissibilityReport::Refuted { .. } => "refuted",
            AdmissibilityReport::NoRefutationFound { .. } => "no_refutation",
            AdmissibilityReport::AdmissibleScreen(_) => "admissible_screen",
        }
    }
}

enum Outcome {
    Refuted,
    Clean,
    Inconclusive,
}

fn instance_outcome(r: &Rule, s: &Substitution, m: usize, limits: &Limits) -> Outcome {
    let instance = apply_to_rule(r, s).expect("substitutions are total on rule letters");
    let mut inconclusive = false;
    for p in instance.premises() {
        match decide_uniform_theorem(p, m, limits).expect("m is positive") {
            Verdict::Theorem => {}
            Verdict::Inconclusive(_) => inconclusive = true,
            _ => return Outcome::Clean,
        }
    }
    if inconclusive {
        return Outcome::Inconclusive;
    }
    match decide_uniform_theorem(instance.conclusion(), m, limits).expect("m is positive") {
        Verdict::NonTheorem(_) => Outcome::Refuted,
        Verdict::Inconclusive(_) => Outcome::Inconclusive,
        _ => Outcome::Clean,
    }
}

fn tuple(r: &Rule, pool: &[Formula], mut index: u128) -> Substitution {
    // The first letter is the most significant digit.
    let base = pool.len() as u128;
    let mut images = vec![Formula::True; r.letters().len()];
    for slot in images.iter_mut().rev() {
        *slot = pool[(index % base) as usize].clone();
        index /= base;
    }
    r.letters().iter().cloned().zip(images).collect()
}

/// Searches substitutions from the pool over the single letter `p` at
/// `depth`, tuples in lexicographic pool order, for a refuting instance.
/// At most `limits.max_tuples` tuples are examined.
pub fn search_refuting_substitution(
    r: &Rule,
    m: usize,
    depth: usize,
    limits: &Limits,
) -> Result<AdmissibilityReport, FrameError> {
    search_with_signature(r, m, depth, &["p"], limits)
}

/// [`search_refuting_substitution`] over a chosen pool signature.
pub fn search_with_signature(
    r: &Rule,
    m: usize,
    depth: usize,
    signature: &[&str],
    limits: &Limits,
) -> Result<AdmissibilityReport, FrameError> {
    if m == 0 {
        return Err(FrameError::ZeroMeasure);
    }
    let signature_names: Vec<String> = signature.iter().map(|s| s.to_string()).collect();
    let bound = pool_size_bound(signature.len(), depth);
    let cap = limits.max_tuples as u128;
    if bound > cap {
        return Ok(AdmissibilityReport::NoRefutationFound {
            depth,
            signature: signature_names,
            pool_size: bound,
            tuples_checked: 0,
            inconclusive: 0,
            note: Some(format!("pool of up to {bound} formulas exceeds the tuple cap of {cap}")),
        });
    }
    let pool = substitution_pool(signature, depth);
    let pool_size = pool.len() as u128;
    let total = (0..r.letters().len()).try_fold(1u128, |acc, _| acc.checked_mul(pool_size));
    let (checked, note) = match total {
        Some(t) if t <= cap => (t, None),
        _ => (
            cap,
            Some(format!(
                "only the first {cap} of {} tuples were examined",
                total.map_or_else(|| "overflowing".to_string(), |t| t.to_string())
            )),
        ),
    };
    let inconclusive = AtomicUsize::new(0);
    let hit = (0..checked as u64).into_par_iter().find_first(|&i| {
        match instance_outcome(r, &tuple(r, &pool, i as u128), m, limits) {
            Outcome::Refuted => true,
            Outcome::Inconclusive => {
                inconclusive.fetch_add(1, Ordering::Relaxed);
                false
            }
            Outcome::Clean => false,
        }
    });
    Ok(match hit {
        Some(i) => refuted_report(r, tuple(r, &pool, i as u128), m, limits),
        None => AdmissibilityReport::NoRefutationFound {
            depth,
            signature: signature_names,
            pool_size,
            tuples_checked: checked,
            inconclusive: inconclusive.into_inner(),
            note,
        },
    })
}

fn refuted_report(r: &Rule, substitution: Substitution, m: usize, limits: &Limits) -> AdmissibilityReport {
    let instance = apply_to_rule(r, &substitution).expect("substitutions are total");
    let premise_verdicts = instance
        .premises()
        .iter()
        .map(|p| decide_uniform_theorem(p, m, limits).expect("m is positive"))
        .collect();
    let conclusion_certificate = decide_uniform_theorem(instance.conclusion(), m, limits).expect("m is positive");
    AdmissibilityReport::Refuted {
        substitution,
        premise_verdicts,
        conclusion_certificate,
    }
}

/// Screens that prove admissibility without search. `None` when neither
/// applies or a needed decision hit the caps.
pub fn admissibility_screen(r: &Rule, m: usize, limits: &Limits) -> Result<Option<ScreenReason>, FrameError> {
    if decide_uniform_theorem(r.conclusion(), m, limits)?.is_theorem() {
        return Ok(Some(ScreenReason::ConclusionTheorem));
    }
    for (i, p) in r.premises().iter().enumerate() {
        if decide_uniform_theorem(&Formula::not(p.clone()), m, limits)?.is_theorem() {
            return Ok(Some(ScreenReason::PremiseUnsatisfiable(i)));
        }
    }
    Ok(None)
}

/// Runs the screens, then defers to the bounded search at `depth`.
pub fn admissibility_consequences_check(
    r: &Rule,
    m: usize,
    depth: usize,
    limits: &Limits,
) -> Result<AdmissibilityReport, FrameError> {
    match admissibility_screen(r, m, limits)? {
        Some(reason) => Ok(AdmissibilityReport::AdmissibleScreen(reason)),
        None => search_refuting_substitution(r, m, depth, limits),
    }
}

/// Re-validates a refutation: every substituted premise is a theorem again
/// and the conclusion's countermodel checks.
pub fn check_refutation(r: &Rule, report: &AdmissibilityReport, m: usize, limits: &Limits) -> bool {
    let AdmissibilityReport::Refuted {
        substitution,
        conclusion_certificate,
        ..
    } = report
    else {
        return false;
    };
    let Ok(instance) = apply_to_rule(r, substitution) else {
        return false;
    };
    let premises_hold = instance
        .premises()
        .iter()
        .all(|p| matches!(decide_uniform_theorem(p, m, limits), Ok(Verdict::Theorem)));
    let targets_conclusion = matches!(
        conclusion_certificate.certificate().map(|c| &c.target),
        Some(crate::decide::Target::Formula(g)) if g == instance.conclusion()
    );
    premises_hold
        && targets_conclusion
        && matches!(crate::decide::check_certificate(conclusion_certificate), Ok(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_rule};

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn subst(pairs: &[(&str, &str)]) -> Substitution {
        pairs.iter().map(|(x, a)| (x.to_string(), f(a))).collect()
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(apply_substitution(&f("x"), &subst(&[("x", "p U q")])).unwrap(), f("p U q"));
        assert_eq!(apply_substitution(&f("X x"), &subst(&[("x", "true")])).unwrap(), f("X true"));
        assert_eq!(
            apply_substitution(&f("x & y"), &subst(&[("x", "p"), ("y", "!p")])).unwrap(),
            f("p & !p")
        );
        assert_eq!(
            apply_substitution(&f("x & y"), &subst(&[("x", "p")])),
            Err(SubstitutionError::Unmapped("y".into()))
        );
        // simultaneous, not sequential
        assert_eq!(
            apply_substitution(&f("x U y"), &subst(&[("x", "y"), ("y", "x")])).unwrap(),
            f("y U x")
        );
    }

    #[test]
    fn pool_sizes() {
        assert_eq!(substitution_pool(&["p"], 0).len(), 3);
        assert_eq!(substitution_pool(&["p"], 1).len(), 27);
        assert_eq!(substitution_pool(&["p"], 2).len(), 1515);
        assert_eq!(pool_size_bound(1, 2), 1515);
        let pool = substitution_pool(&["p"], 1);
        let distinct: HashSet<_> = pool.iter().collect();
        assert_eq!(distinct.len(), pool.len());
    }

    #[test]
    fn x_over_false_is_refuted_by_true() {
        let r = parse_rule("x / false").unwrap();
        let report = search_refuting_substitution(&r, 1, 0, &Limits::default()).unwrap();
        let AdmissibilityReport::Refuted { substitution, .. } = &report else {
            panic!("expected Refuted, got {report:?}")
        };
        assert_eq!(substitution, &subst(&[("x", "true")]));
        assert!(check_refutation(&r, &report, 1, &Limits::default()));
        assert_eq!(
            admissibility_consequences_check(&r, 1, 0, &Limits::default()).unwrap(),
            report
        );
    }

    #[test]
    fn identity_and_shift_rules_are_not_refuted() {
        for text in ["x / x", "X x / x"] {
            let r = parse_rule(text).unwrap();
            for depth in 0..=1 {
                let report = search_refuting_substitution(&r, 1, depth, &Limits::default()).unwrap();
                assert!(
                    matches!(report, AdmissibilityReport::NoRefutationFound { inconclusive: 0, .. }),
                    "{text} at depth {depth}: {report:?}"
                );
            }
        }
    }

    #[test]
    fn screens() {
        let limits = Limits::default();
        let r = parse_rule("p / q -> p U q").unwrap();
        assert_eq!(
            admissibility_consequences_check(&r, 1, 1, &limits).unwrap(),
            AdmissibilityReport::AdmissibleScreen(ScreenReason::ConclusionTheorem)
        );
        let r = parse_rule("x & !x / false").unwrap();
        assert_eq!(
            admissibility_consequences_check(&r, 1, 1, &limits).unwrap(),
            AdmissibilityReport::AdmissibleScreen(ScreenReason::PremiseUnsatisfiable(0))
        );
        assert_eq!(admissibility_screen(&parse_rule("x / false").unwrap(), 1, &limits).unwrap(), None);
    }

    #[test]
    fn tuple_cap_is_reported() {
        let limits = Limits {
            max_tuples: 100,
            ..Limits::default()
        };
        let r = parse_rule("x, y / x & y").unwrap();
        let report = search_refuting_substitution(&r, 1, 1, &limits).unwrap();
        let AdmissibilityReport::NoRefutationFound { tuples_checked, note, .. } = report else {
            panic!()
        };
        assert_eq!(tuples_checked, 100);
        assert!(note.unwrap().contains("729"));
        let report = search_refuting_substitution(&r, 1, 3, &limits).unwrap();
        assert!(matches!(report, AdmissibilityReport::NoRefutationFound { tuples_checked: 0, note: Some(_), .. }));
    }
}
