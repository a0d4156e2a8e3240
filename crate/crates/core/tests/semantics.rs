mod common;

use ntltl::frames::{FiniteLassoFrame, Frame, Model, UniformWindowFrame, Valuation};
use ntltl::semantics::{eval_classic, eval_nt, truth_table, ClassicLassoModel, EvalError};
use ntltl::syntax::{boxed, diamond, next_iter, reach};
use ntltl::Formula;
use proptest::prelude::*;

const LETTERS: &[&str] = &["p", "q"];

/// Direct reading of the truth clauses, one world at a time.
fn oracle(model: &Model, a: usize, f: &Formula) -> bool {
    match f {
        Formula::Letter(x) => model.valuation().holds(x, a),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !oracle(model, a, g),
        Formula::And(g, h) => oracle(model, a, g) && oracle(model, a, h),
        Formula::Or(g, h) => oracle(model, a, g) || oracle(model, a, h),
        Formula::Implies(g, h) => !oracle(model, a, g) || oracle(model, a, h),
        Formula::Next(g) => oracle(model, model.frame().next(a).expect("inside the horizon"), g),
        Formula::Until(g, h) => {
            let window = model.frame().window(a);
            window
                .iter()
                .enumerate()
                .any(|(j, &b)| oracle(model, b, h) && window[..j].iter().all(|&c| oracle(model, c, g)))
        }
    }
}

fn in_horizon(model: &Model, a: usize, f: &Formula) -> bool {
    match model.frame() {
        Frame::Uniform(u) => a + reach(f, u.measure()) < u.worlds(),
        Frame::Lasso(_) => true,
    }
}

fn pair() -> impl Strategy<Value = (Formula, Formula)> {
    (common::formula(LETTERS, 3), common::formula(LETTERS, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agrees_with_clause_oracle_on_lassos(model in common::lasso_model(LETTERS, 6), f in common::formula(LETTERS, 4)) {
        for a in 0..model.worlds() {
            prop_assert_eq!(eval_nt(&model, a, &f).unwrap(), oracle(&model, a, &f), "world {}", a);
        }
    }

    #[test]
    fn agrees_with_clause_oracle_on_uniform_frames(model in common::uniform_model(LETTERS, 10, 3), f in common::formula(LETTERS, 3)) {
        let table = truth_table(&model, &f);
        for (a, cell) in table.iter().enumerate() {
            if in_horizon(&model, a, &f) {
                prop_assert_eq!(*cell, Some(oracle(&model, a, &f)));
                prop_assert_eq!(eval_nt(&model, a, &f).unwrap(), oracle(&model, a, &f));
            } else {
                prop_assert_eq!(*cell, None);
                let overflowed = matches!(eval_nt(&model, a, &f), Err(EvalError::WindowOverflow { .. }));
                prop_assert!(overflowed);
            }
        }
    }

    #[test]
    fn until_is_reflexive(model in common::lasso_model(LETTERS, 6), (p, q) in pair()) {
        let law = Formula::implies(q.clone(), Formula::until(p, q));
        for a in 0..model.worlds() {
            prop_assert!(eval_nt(&model, a, &law).unwrap());
        }
    }

    #[test]
    fn box_is_the_window_conjunction(model in common::uniform_model(LETTERS, 10, 3), f in common::formula(LETTERS, 2)) {
        let Frame::Uniform(u) = model.frame() else { unreachable!() };
        let window = Formula::conjunction((0..=u.measure()).map(|i| next_iter(i, f.clone())));
        let g = boxed(f.clone());
        for a in 0..model.worlds() {
            if in_horizon(&model, a, &g) {
                prop_assert_eq!(eval_nt(&model, a, &g).unwrap(), eval_nt(&model, a, &window).unwrap());
            }
        }
    }

    #[test]
    fn box_is_the_window_conjunction_on_lassos(model in common::lasso_model(LETTERS, 6), f in common::formula(LETTERS, 2)) {
        let Frame::Lasso(frame) = model.frame() else { unreachable!() };
        let g = boxed(f.clone());
        for a in 0..model.worlds() {
            let window = Formula::conjunction((0..=frame.reach()[a]).map(|i| next_iter(i, f.clone())));
            prop_assert_eq!(eval_nt(&model, a, &g).unwrap(), eval_nt(&model, a, &window).unwrap());
        }
    }

    #[test]
    fn truth_depends_only_on_the_horizon(
        model in common::uniform_model(LETTERS, 10, 3),
        f in common::formula(LETTERS, 3),
        noise in proptest::collection::vec(any::<u64>(), 2),
    ) {
        let Frame::Uniform(u) = model.frame() else { unreachable!() };
        let w = model.worlds();
        for a in 0..w {
            if !in_horizon(&model, a, &f) {
                continue;
            }
            let horizon = a + reach(&f, u.measure());
            // Keep worlds a..=horizon, scramble everything else.
            let keep: u64 = ((1u64 << (horizon + 1)) - 1) & !((1u64 << a) - 1);
            let all = (1u64 << w) - 1;
            let masks = LETTERS.iter().zip(&noise).map(|(x, n)| {
                let old = model.valuation().worlds_of(x).fold(0u64, |m, b| m | 1 << b);
                (*x, ((old & keep) | (n & !keep)) & all)
            });
            let other = Model::new(u.clone(), Valuation::from_masks(masks)).unwrap();
            prop_assert_eq!(eval_nt(&model, a, &f).unwrap(), eval_nt(&other, a, &f).unwrap());
        }
    }

    #[test]
    fn diamond_is_dual_to_box(model in common::lasso_model(LETTERS, 6), f in common::formula(LETTERS, 3)) {
        let lhs = diamond(f.clone());
        let rhs = Formula::not(boxed(Formula::not(f)));
        for a in 0..model.worlds() {
            prop_assert_eq!(eval_nt(&model, a, &lhs).unwrap(), eval_nt(&model, a, &rhs).unwrap());
        }
    }

    #[test]
    fn next_only_formulas_agree_with_classic(model in common::lasso_model(LETTERS, 6), f in common::next_only(LETTERS, 4)) {
        let Frame::Lasso(frame) = model.frame() else { unreachable!() };
        let classic = ClassicLassoModel::new(frame.worlds(), frame.loop_target(), model.valuation().clone()).unwrap();
        for a in 0..model.worlds() {
            prop_assert_eq!(eval_nt(&model, a, &f).unwrap(), eval_classic(&classic, a, &f).unwrap());
        }
    }

    #[test]
    fn full_windows_agree_with_classic(
        worlds in 1usize..7,
        loop_seed in any::<usize>(),
        masks in proptest::collection::vec(any::<u64>(), 2),
        f in common::formula(LETTERS, 4),
    ) {
        let loop_target = loop_seed % worlds;
        let all = (1u64 << worlds) - 1;
        let v = Valuation::from_masks(LETTERS.iter().copied().zip(masks.iter().map(|m| m & all)));
        let frame = FiniteLassoFrame::constant_reach(worlds, loop_target, (worlds - 1).max(1)).unwrap();
        let model = Model::new(frame, v.clone()).unwrap();
        let classic = ClassicLassoModel::new(worlds, loop_target, v).unwrap();
        for a in 0..worlds {
            prop_assert_eq!(eval_nt(&model, a, &f).unwrap(), eval_classic(&classic, a, &f).unwrap());
        }
    }
}

/// Classic reading of `U` by unrolling the lasso far enough.
fn classic_oracle(worlds: usize, loop_target: usize, v: &Valuation, a: usize, f: &Formula) -> bool {
    let next = |b: usize| if b + 1 < worlds { b + 1 } else { loop_target };
    match f {
        Formula::Letter(x) => v.holds(x, a),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !classic_oracle(worlds, loop_target, v, a, g),
        Formula::And(g, h) => classic_oracle(worlds, loop_target, v, a, g) && classic_oracle(worlds, loop_target, v, a, h),
        Formula::Or(g, h) => classic_oracle(worlds, loop_target, v, a, g) || classic_oracle(worlds, loop_target, v, a, h),
        Formula::Implies(g, h) => !classic_oracle(worlds, loop_target, v, a, g) || classic_oracle(worlds, loop_target, v, a, h),
        Formula::Next(g) => classic_oracle(worlds, loop_target, v, next(a), g),
        Formula::Until(g, h) => {
            let mut b = a;
            for _ in 0..=worlds {
                if classic_oracle(worlds, loop_target, v, b, h) {
                    return true;
                }
                if !classic_oracle(worlds, loop_target, v, b, g) {
                    return false;
                }
                b = next(b);
            }
            false
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn classic_evaluator_matches_unrolling(
        worlds in 1usize..7,
        loop_seed in any::<usize>(),
        masks in proptest::collection::vec(any::<u64>(), 2),
        f in common::formula(LETTERS, 4),
    ) {
        let loop_target = loop_seed % worlds;
        let all = (1u64 << worlds) - 1;
        let v = Valuation::from_masks(LETTERS.iter().copied().zip(masks.iter().map(|m| m & all)));
        let classic = ClassicLassoModel::new(worlds, loop_target, v.clone()).unwrap();
        for a in 0..worlds {
            prop_assert_eq!(eval_classic(&classic, a, &f).unwrap(), classic_oracle(worlds, loop_target, &v, a, &f));
        }
    }
}

#[test]
fn box_box_separates_the_window_from_its_closure() {
    let f = ntltl::parse_formula("G p -> G G p").unwrap();
    let model = Model::new(UniformWindowFrame::new(3, 1).unwrap(), Valuation::new().with("p", [0, 1])).unwrap();
    assert!(!eval_nt(&model, 0, &f).unwrap());
    assert!(!oracle(&model, 0, &f));
}
