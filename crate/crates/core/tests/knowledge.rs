mod common;

use ntltl::frames::{Agent, MultiAgentModel};
use ntltl::knowledge::{eval_knowledge, voted_pipeline, KnowledgeQuery};
use ntltl::semantics::{eval_consensus_k, eval_nt, truth_table};
use ntltl::syntax::{boxed, diamond, DerivedOp};
use ntltl::Formula;
use proptest::prelude::*;

const LETTERS: &[&str] = &["p", "q"];

fn agents(frame: ntltl::FiniteLassoFrame, valuations: Vec<ntltl::Valuation>) -> MultiAgentModel {
    let agents = valuations
        .into_iter()
        .enumerate()
        .map(|(i, valuation)| Agent { name: format!("a{i}"), valuation })
        .collect();
    MultiAgentModel::new(frame, agents).unwrap()
}

fn multi_agent(max_agents: usize) -> impl Strategy<Value = MultiAgentModel> {
    common::lasso_frame(5).prop_flat_map(move |frame| {
        let w = frame.worlds();
        proptest::collection::vec(common::valuation(LETTERS, w), 1..=max_agents)
            .prop_map(move |vs| agents(frame.clone(), vs))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rigid_knowledge_is_box(model in common::lasso_model(LETTERS, 6), f in common::formula(LETTERS, 3)) {
        for a in 0..model.worlds() {
            let q = KnowledgeQuery::new(DerivedOp::KRigid, f.clone(), a);
            prop_assert_eq!(eval_knowledge(&model, &q, None).unwrap(), eval_nt(&model, a, &boxed(f.clone())).unwrap());
        }
    }

    #[test]
    fn discovered_knowledge_implies_diamond(model in common::lasso_model(LETTERS, 6), f in common::formula(LETTERS, 3)) {
        for a in 0..model.worlds() {
            let q = KnowledgeQuery::new(DerivedOp::KDiscovered, f.clone(), a);
            if eval_knowledge(&model, &q, None).unwrap() {
                prop_assert!(eval_nt(&model, a, &diamond(f.clone())).unwrap());
            }
        }
    }

    #[test]
    fn consensus_is_monotone_in_agents(mam in multi_agent(4), f in common::formula(LETTERS, 2), drop in any::<usize>()) {
        let n = mam.agents().len();
        if n < 2 {
            return Ok(());
        }
        let mut fewer: Vec<Agent> = mam.agents().to_vec();
        fewer.remove(drop % n);
        let sub = MultiAgentModel::new(mam.frame().clone(), fewer).unwrap();
        for a in 0..mam.frame().worlds() {
            if eval_consensus_k(&mam, a, &f).unwrap() {
                prop_assert!(eval_consensus_k(&sub, a, &f).unwrap());
            }
        }
    }

    #[test]
    fn unanimous_vote_is_single_agent_evaluation(model in common::lasso_model(LETTERS, 5), copies in 1usize..4, f in common::formula(LETTERS, 3)) {
        let ntltl::Frame::Lasso(frame) = model.frame().clone() else { unreachable!() };
        let mam = agents(frame, vec![model.valuation().clone(); copies]);
        prop_assert_eq!(voted_pipeline(&mam, &f), truth_table(&model, &f));
    }

    #[test]
    fn agent_selector_routes_to_that_valuation(mam in multi_agent(3), f in common::formula(LETTERS, 2), pick in any::<usize>()) {
        let agent = &mam.agents()[pick % mam.agents().len()];
        let model = mam.agent_model(&agent.name).unwrap();
        for a in 0..model.worlds() {
            let q = KnowledgeQuery::new(DerivedOp::KDiscovered, f.clone(), a).for_agent(agent.name.clone());
            let expected = eval_nt(&model, a, &Formula::until(f.clone(), Formula::and(f.clone(), Formula::next(Formula::not(f.clone()))))).unwrap();
            prop_assert_eq!(eval_knowledge(&mam, &q, None).unwrap(), expected);
        }
    }
}
