#![allow(dead_code)]

use ntltl::frames::{FiniteLassoFrame, Model, UniformWindowFrame, Valuation};
use ntltl::Formula;
use proptest::prelude::*;

pub fn formula(letters: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        6 => proptest::sample::select(letters).prop_map(Formula::letter),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::until(a, b)),
        ]
    })
    .boxed()
}

/// Formulas without `U`.
pub fn next_only(letters: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let leaf = proptest::sample::select(letters).prop_map(Formula::letter);
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
    .boxed()
}

pub fn lasso_frame(max_worlds: usize) -> BoxedStrategy<FiniteLassoFrame> {
    (1..=max_worlds)
        .prop_flat_map(|w| (Just(w), 0..w, proptest::collection::vec(1..=w, w)))
        .prop_map(|(w, l, mut d)| {
            d.sort_unstable();
            FiniteLassoFrame::new(w, l, d).expect("sorted reach lengths form a lasso frame")
        })
        .boxed()
}

pub fn valuation(letters: &'static [&'static str], worlds: usize) -> BoxedStrategy<Valuation> {
    proptest::collection::vec(any::<u64>(), letters.len())
        .prop_map(move |masks| {
            let all = if worlds == 64 { u64::MAX } else { (1u64 << worlds) - 1 };
            Valuation::from_masks(letters.iter().copied().zip(masks.into_iter().map(|m| m & all)))
        })
        .boxed()
}

pub fn lasso_model(letters: &'static [&'static str], max_worlds: usize) -> BoxedStrategy<Model> {
    lasso_frame(max_worlds)
        .prop_flat_map(move |frame| {
            let w = frame.worlds();
            (Just(frame), valuation(letters, w))
        })
        .prop_map(|(frame, v)| Model::new(frame, v).unwrap())
        .boxed()
}

pub fn uniform_model(letters: &'static [&'static str], max_worlds: usize, max_m: usize) -> BoxedStrategy<Model> {
    (1..=max_worlds, 1..=max_m)
        .prop_flat_map(move |(w, m)| (Just(UniformWindowFrame::new(w, m).unwrap()), valuation(letters, w)))
        .prop_map(|(frame, v)| Model::new(frame, v).unwrap())
        .boxed()
}
