mod common;

use ntltl::admissibility::{
    admissibility_screen, apply_substitution, check_refutation, search_refuting_substitution, AdmissibilityReport,
    Substitution,
};
use ntltl::decide::{check_certificate, decide_uniform_theorem, Verdict};
use ntltl::{parse_rule, Formula, Limits, Rule};
use proptest::prelude::*;

const LETTERS: &[&str] = &["x"];

fn rule() -> impl Strategy<Value = Rule> {
    (common::formula(LETTERS, 2), common::formula(LETTERS, 2)).prop_map(|(p, c)| Rule::new(vec![p], c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn screened_rules_are_never_refuted(r in rule(), m in 1usize..3) {
        let limits = Limits::default();
        if admissibility_screen(&r, m, &limits).unwrap().is_some() {
            for depth in 0..=1 {
                let report = search_refuting_substitution(&r, m, depth, &limits).unwrap();
                let no_refutation = matches!(report, AdmissibilityReport::NoRefutationFound { .. });
                prop_assert!(no_refutation, "{} at depth {}", r, depth);
            }
        }
    }

    #[test]
    fn refutations_recheck(r in rule(), m in 1usize..3) {
        let limits = Limits::default();
        let report = search_refuting_substitution(&r, m, 1, &limits).unwrap();
        if let AdmissibilityReport::Refuted { substitution, premise_verdicts, conclusion_certificate } = &report {
            prop_assert!(check_refutation(&r, &report, m, &limits));
            prop_assert!(premise_verdicts.iter().all(|v| *v == Verdict::Theorem));
            prop_assert!(check_certificate(conclusion_certificate).unwrap());
            let conclusion = apply_substitution(r.conclusion(), substitution).unwrap();
            prop_assert!(!decide_uniform_theorem(&conclusion, m, &limits).unwrap().is_theorem());
        }
    }

    #[test]
    fn theorem_preserving_rules_are_not_refuted(r in rule(), m in 1usize..3) {
        // A rule whose premise implies its conclusion as a theorem can never
        // have a theorem premise instance with a non-theorem conclusion.
        let limits = Limits::default();
        let implication = Formula::implies(r.premise_conjunction(), r.conclusion().clone());
        if decide_uniform_theorem(&implication, m, &limits).unwrap().is_theorem() {
            let report = search_refuting_substitution(&r, m, 1, &limits).unwrap();
            let no_refutation = matches!(report, AdmissibilityReport::NoRefutationFound { .. });
            prop_assert!(no_refutation);
        }
    }
}

#[test]
fn tampered_refutations_are_rejected() {
    let limits = Limits::default();
    let r = parse_rule("x / false").unwrap();
    let report = search_refuting_substitution(&r, 1, 0, &limits).unwrap();
    assert!(check_refutation(&r, &report, 1, &limits));
    let AdmissibilityReport::Refuted { premise_verdicts, conclusion_certificate, .. } = report else {
        panic!()
    };
    let mut s = Substitution::new();
    s.insert("x".into(), Formula::letter("p"));
    let tampered = AdmissibilityReport::Refuted { substitution: s, premise_verdicts, conclusion_certificate };
    assert!(!check_refutation(&r, &tampered, 1, &limits));
}
