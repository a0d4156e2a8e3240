//! Decision procedures with self-checking certificates.
//!
//! * [`decide_uniform_theorem`] / [`decide_uniform_satisfiable`] are complete
//!   for the logic of uniform intransitivity `m`. The uniform infinite frame is
//!   shift invariant, and truth of `f` at `a` depends only on the valuation on
//!   `[a, a + reach(f, m)]`, so it suffices to check world 0 of the
//!   `reach + 1`-world window under every valuation.
//! * [`bounded_nt_refutation`] searches finite lasso frames for a countermodel.
//!   A refutation found there is sound for the general logic; running out of
//!   frames proves nothing and yields [`Verdict::Inconclusive`].

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::{enumerate_lasso_frames, Frame, FrameError, Model, UniformWindowFrame, MAX_WORLDS};
use crate::semantics::{
    eval_nt, first_frame_refutation, first_index, formula_valid_in_model, full_mask, unpack,
    valuation_from_index, EvalError, Program, Structure,
};
use crate::syntax::{reach, Formula, Rule};
use crate::Limits;

/// What a countermodel refutes or a witness satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Formula(Formula),
    Rule(Rule),
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Formula(g) => write!(f, "{g}"),
            Target::Rule(r) => write!(f, "{r}"),
        }
    }
}

/// A finite model together with the world where the claim is checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub world: usize,
    pub target: Target,
}

/// Search limits recorded with a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchCaps {
    /// Window enumeration for uniform intransitivity `measure`.
    Uniform {
        measure: usize,
        window: usize,
        atoms: usize,
        max_atoms: usize,
    },
    /// Lasso frame enumeration. Frames whose valuation space exceeds the
    /// atom cap are not searched and are counted in `skipped_frames`.
    Lasso {
        max_worlds: usize,
        max_reach: usize,
        skipped_frames: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Theorem,
    NonTheorem(Countermodel),
    Satisfiable(Countermodel),
    Unsatisfiable,
    Inconclusive(SearchCaps),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Theorem => "Theorem",
            Verdict::NonTheorem(_) => "NonTheorem",
            Verdict::Satisfiable(_) => "Satisfiable",
            Verdict::Unsatisfiable => "Unsatisfiable",
            Verdict::Inconclusive(_) => "Inconclusive",
        }
    }

    pub fn certificate(&self) -> Option<&Countermodel> {
        match self {
            Verdict::NonTheorem(c) | Verdict::Satisfiable(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_theorem(&self) -> bool {
        matches!(self, Verdict::Theorem)
    }
}

/// Caps of the lasso search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LassoCaps {
    pub max_worlds: usize,
    pub max_reach: usize,
}

/// The window searched by the uniform procedures for `f` at measure `m`.
pub fn uniform_search_caps(f: &Formula, m: usize, limits: &Limits) -> SearchCaps {
    let window = reach(f, m) + 1;
    SearchCaps::Uniform {
        measure: m,
        window,
        atoms: f.letters().len() * window,
        max_atoms: limits.max_atoms,
    }
}

fn uniform_search(f: &Formula, m: usize, limits: &Limits, wanted: bool) -> Result<Result<Option<Countermodel>, SearchCaps>, FrameError> {
    if m == 0 {
        return Err(FrameError::ZeroMeasure);
    }
    let caps = uniform_search_caps(f, m, limits);
    let SearchCaps::Uniform { window: worlds, atoms, .. } = caps else {
        unreachable!()
    };
    let letters = f.letters();
    if atoms > limits.max_atoms.min(63) || worlds > MAX_WORLDS {
        return Ok(Err(caps));
    }
    let frame = UniformWindowFrame::new(worlds, m)?;
    let mut program = Program::with_letters(&letters);
    let root = program.add(f);
    let structure = Structure::of(&frame.clone().into());
    let n = letters.len();
    let hit = first_index(atoms, |v, buf| {
        let mut masks = Vec::with_capacity(n);
        unpack(v, n, worlds, &mut masks);
        structure.eval(&program, &masks, buf);
        (buf[root] & 1 == 1) == wanted
    });
    Ok(Ok(hit.map(|v| Countermodel {
        model: Model::new(frame, valuation_from_index(&letters, v, worlds))
            .expect("enumerated valuations stay inside the window"),
        world: 0,
        target: Target::Formula(f.clone()),
    })))
}

/// Theoremhood of `f` in the logic of uniform intransitivity `m`.
pub fn decide_uniform_theorem(f: &Formula, m: usize, limits: &Limits) -> Result<Verdict, FrameError> {
    Ok(match uniform_search(f, m, limits, false)? {
        Err(caps) => Verdict::Inconclusive(caps),
        Ok(Some(cm)) => Verdict::NonTheorem(cm),
        Ok(None) => Verdict::Theorem,
    })
}

/// Satisfiability of `f` at world 0 of some uniform model with measure `m`.
pub fn decide_uniform_satisfiable(f: &Formula, m: usize, limits: &Limits) -> Result<Verdict, FrameError> {
    Ok(match uniform_search(f, m, limits, true)? {
        Err(caps) => Verdict::Inconclusive(caps),
        Ok(Some(cm)) => Verdict::Satisfiable(cm),
        Ok(None) => Verdict::Unsatisfiable,
    })
}

/// Searches lasso frames (by `W`, then `L`, then `d`, then valuation in binary
/// order) for a model refuting `target`: a formula false at some world, or a
/// rule whose premises hold everywhere while the conclusion fails somewhere.
pub fn bounded_nt_refutation(target: &Target, caps: LassoCaps, limits: &Limits) -> Verdict {
    let cap = limits.max_atoms.min(63);
    let letters = target_letters(target);
    let formula_program = match target {
        Target::Formula(f) => {
            let mut program = Program::with_letters(&letters);
            let root = program.add(f);
            Some((program, root))
        }
        Target::Rule(_) => None,
    };
    for lasso in enumerate_lasso_frames(caps.max_worlds, caps.max_reach) {
        let worlds = lasso.worlds();
        let atoms = letters.len() * worlds;
        if atoms > cap {
            continue;
        }
        let frame: Frame = lasso.into();
        let found = match (target, &formula_program) {
            (Target::Formula(_), Some((program, root))) => {
                let structure = Structure::of(&frame);
                let all = full_mask(worlds);
                let n = letters.len();
                first_index(atoms, |v, buf| {
                    let mut masks = Vec::with_capacity(n);
                    unpack(v, n, worlds, &mut masks);
                    structure.eval(program, &masks, buf);
                    buf[*root] != all
                })
                .map(|v| {
                    let valuation = valuation_from_index(&letters, v, worlds);
                    let mut masks = Vec::new();
                    let mut buf = Vec::new();
                    unpack(v, n, worlds, &mut masks);
                    structure.eval(program, &masks, &mut buf);
                    (valuation, (!buf[*root] & all).trailing_zeros() as usize)
                })
            }
            (Target::Rule(r), _) => first_frame_refutation(&frame, r, cap)
                .expect("lasso frames are total and the atom cap was checked"),
            _ => unreachable!(),
        };
        if let Some((valuation, world)) = found {
            return Verdict::NonTheorem(Countermodel {
                model: Model::new(frame, valuation).expect("enumerated valuations fit the frame"),
                world,
                target: target.clone(),
            });
        }
    }
    Verdict::Inconclusive(lasso_search_caps(target, caps, limits))
}

fn target_letters(target: &Target) -> Vec<String> {
    match target {
        Target::Formula(f) => f.letters(),
        Target::Rule(r) => r.letters().to_vec(),
    }
}

/// The lasso enumeration for `target`, counting the frames it must skip
/// because their valuation space exceeds the atom cap.
pub fn lasso_search_caps(target: &Target, caps: LassoCaps, limits: &Limits) -> SearchCaps {
    let n = target_letters(target).len();
    let cap = limits.max_atoms.min(63);
    SearchCaps::Lasso {
        max_worlds: caps.max_worlds,
        max_reach: caps.max_reach,
        skipped_frames: enumerate_lasso_frames(caps.max_worlds, caps.max_reach)
            .iter()
            .filter(|frame| n * frame.worlds() > cap)
            .count(),
    }
}

/// `(n·l) · l^(n·l) · (n·l)! + l^(n·l)`: the size bound on a finite refuting
/// frame for a normal-form rule with `n` letters and `l` disjuncts.
pub fn lemma_size_bound(n: u64, l: u64) -> BigUint {
    let nl = n * l;
    let power = BigUint::from(l).pow(nl as u32);
    let factorial = (1..=nl).fold(BigUint::from(1u32), |acc, k| acc * k);
    BigUint::from(nl) * &power * factorial + power
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("verdict {0} carries no certificate")]
    NoCertificate(&'static str),
    #[error("a satisfiability witness must target a formula")]
    RuleWitness,
    #[error("malformed certificate: {0}")]
    Malformed(#[from] EvalError),
}

/// Re-evaluates a verdict's certificate from scratch.
pub fn check_certificate(v: &Verdict) -> Result<bool, CertificateError> {
    match v {
        Verdict::NonTheorem(cm) => check_refutation(cm),
        Verdict::Satisfiable(cm) => match &cm.target {
            Target::Formula(f) => Ok(eval_nt(&cm.model, cm.world, f)?),
            Target::Rule(_) => Err(CertificateError::RuleWitness),
        },
        other => Err(CertificateError::NoCertificate(other.name())),
    }
}

fn check_refutation(cm: &Countermodel) -> Result<bool, CertificateError> {
    match &cm.target {
        Target::Formula(f) => Ok(!eval_nt(&cm.model, cm.world, f)?),
        Target::Rule(r) => {
            for p in r.premises() {
                if !formula_valid_in_model(&cm.model, p)? {
                    return Ok(false);
                }
            }
            Ok(!eval_nt(&cm.model, cm.world, r.conclusion())?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FiniteLassoFrame, Valuation};
    use crate::syntax::{parse_formula, parse_rule};

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    fn theorem(text: &str, m: usize) -> Verdict {
        decide_uniform_theorem(&f(text), m, &limits()).unwrap()
    }

    #[test]
    fn window_implies_box_is_a_theorem() {
        assert_eq!(theorem("p & X p & X X p -> G p", 2), Verdict::Theorem);
        assert_eq!(theorem("p -> F p", 1), Verdict::Theorem);
        assert_eq!(theorem("p -> F p", 3), Verdict::Theorem);
    }

    #[test]
    fn box_box_fails_with_expected_certificate() {
        let v = theorem("G p -> G G p", 1);
        let Verdict::NonTheorem(cm) = &v else {
            panic!("expected NonTheorem, got {v:?}")
        };
        assert_eq!(cm.world, 0);
        assert_eq!(cm.model.worlds(), 3);
        assert_eq!(cm.model.valuation(), &Valuation::new().with("p", [0, 1]));
        assert!(check_certificate(&v).unwrap());
    }

    #[test]
    fn ff_implies_f_fails_with_late_witness() {
        let v = theorem("F F p -> F p", 2);
        let Verdict::NonTheorem(cm) = &v else {
            panic!("expected NonTheorem")
        };
        assert_eq!(cm.model.valuation(), &Valuation::new().with("p", [3]));
        assert!(check_certificate(&v).unwrap());
    }

    #[test]
    fn satisfiability() {
        let sat = |text: &str, m| decide_uniform_satisfiable(&f(text), m, &limits()).unwrap();
        assert_eq!(sat("p & !p", 1), Verdict::Unsatisfiable);
        let v = sat("p & X !p", 1);
        let Verdict::Satisfiable(cm) = &v else {
            panic!("expected Satisfiable")
        };
        assert_eq!(cm.model.valuation(), &Valuation::new().with("p", [0]));
        assert!(check_certificate(&v).unwrap());
        // G p and F !p are complementary under the bounded reading.
        assert_eq!(sat("G p & F !p", 1), Verdict::Unsatisfiable);
    }

    #[test]
    fn caps_give_inconclusive() {
        let tight = Limits {
            max_atoms: 2,
            ..Limits::default()
        };
        let v = decide_uniform_theorem(&f("G p -> G G p"), 1, &tight).unwrap();
        assert!(matches!(v, Verdict::Inconclusive(SearchCaps::Uniform { window: 3, atoms: 3, .. })));
        assert!(decide_uniform_theorem(&f("p"), 0, &limits()).is_err());
    }

    #[test]
    fn lasso_refutation_of_box_box() {
        let target = Target::Formula(f("G p -> G G p"));
        let caps = LassoCaps {
            max_worlds: 4,
            max_reach: 3,
        };
        let v = bounded_nt_refutation(&target, caps, &limits());
        let Verdict::NonTheorem(cm) = &v else {
            panic!("expected NonTheorem")
        };
        assert_eq!(cm.model.worlds(), 3);
        assert!(check_certificate(&v).unwrap());

        let by_hand = Verdict::NonTheorem(Countermodel {
            model: Model::new(
                FiniteLassoFrame::new(3, 2, vec![1, 1, 1]).unwrap(),
                Valuation::new().with("p", [0, 1]),
            )
            .unwrap(),
            world: 0,
            target,
        });
        assert!(check_certificate(&by_hand).unwrap());
    }

    #[test]
    fn validities_are_inconclusive() {
        let caps = LassoCaps {
            max_worlds: 3,
            max_reach: 3,
        };
        let v = bounded_nt_refutation(&Target::Formula(f("p -> F p")), caps, &limits());
        assert_eq!(
            v,
            Verdict::Inconclusive(SearchCaps::Lasso {
                max_worlds: 3,
                max_reach: 3,
                skipped_frames: 0
            })
        );
    }

    #[test]
    fn rule_refutation() {
        let caps = LassoCaps {
            max_worlds: 2,
            max_reach: 1,
        };
        let v = bounded_nt_refutation(&Target::Rule(parse_rule("X x / x").unwrap()), caps, &limits());
        let Verdict::NonTheorem(cm) = &v else {
            panic!("expected NonTheorem")
        };
        assert_eq!(
            cm.model.frame(),
            &Frame::from(FiniteLassoFrame::new(2, 1, vec![1, 1]).unwrap())
        );
        assert_eq!(cm.model.valuation(), &Valuation::new().with("x", [1]));
        assert_eq!(cm.world, 0);
        assert!(check_certificate(&v).unwrap());
    }

    #[test]
    fn size_bound() {
        assert_eq!(lemma_size_bound(1, 1), BigUint::from(2u32));
        assert_eq!(lemma_size_bound(1, 2), BigUint::from(20u32));
        assert_eq!(lemma_size_bound(2, 2), BigUint::from(1552u32));
        // 6 * 3^6 * 720 + 729, beyond u32 range of intermediate terms is fine
        assert_eq!(lemma_size_bound(2, 3), BigUint::from(3_149_280u64 + 729));
    }

    #[test]
    fn bogus_certificates_are_rejected() {
        let model = Model::new(
            FiniteLassoFrame::new(2, 0, vec![1, 1]).unwrap(),
            Valuation::new().with("p", [0, 1]),
        )
        .unwrap();
        let bogus = Verdict::NonTheorem(Countermodel {
            model: model.clone(),
            world: 0,
            target: Target::Formula(f("G p")),
        });
        assert!(!check_certificate(&bogus).unwrap());
        assert!(matches!(
            check_certificate(&Verdict::Theorem),
            Err(CertificateError::NoCertificate("Theorem"))
        ));
        let overflow = Verdict::NonTheorem(Countermodel {
            model: Model::new(UniformWindowFrame::new(2, 1).unwrap(), Valuation::new()).unwrap(),
            world: 0,
            target: Target::Formula(f("G G p")),
        });
        assert!(matches!(
            check_certificate(&overflow),
            Err(CertificateError::Malformed(_))
        ));
    }
}
