//! Knowledge readings over past-directed models.
//!
//! The frame is read backwards: world 0 is now, `X` is the previous moment and
//! `U` ranges over the remembered past. Nothing here depends on that reading;
//! the operators are macros over the primitive connectives, evaluated by
//! [`eval_nt`].

use thiserror::Error;

use crate::frames::{vote, Model, MultiAgentModel};
use crate::semantics::{eval_consensus_k, eval_nt, truth_table, EvalError};
use crate::syntax::{expand_derived, DerivedOp, ExpandError, Formula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeQuery {
    pub operator: DerivedOp,
    pub subject: Formula,
    pub world: usize,
    pub agent: Option<String>,
}

impl KnowledgeQuery {
    pub fn new(operator: DerivedOp, subject: Formula, world: usize) -> Self {
        KnowledgeQuery {
            operator,
            subject,
            world,
            agent: None,
        }
    }

    pub fn for_agent(mut self, agent: impl Into<String>) -> Self {
        self.agent = Some(agent.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnowledgeError {
    #[error("{0} is not a knowledge operator")]
    NotKnowledge(String),
    #[error("no agent named {0}")]
    UnknownAgent(String),
    #[error("agent selector {0} given for a single-valuation model")]
    AgentOnSingleModel(String),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A model with one valuation or one per agent.
#[derive(Debug, Clone, Copy)]
pub enum KnowledgeModel<'a> {
    Single(&'a Model),
    Agents(&'a MultiAgentModel),
}

impl<'a> From<&'a Model> for KnowledgeModel<'a> {
    fn from(m: &'a Model) -> Self {
        KnowledgeModel::Single(m)
    }
}

impl<'a> From<&'a MultiAgentModel> for KnowledgeModel<'a> {
    fn from(m: &'a MultiAgentModel) -> Self {
        KnowledgeModel::Agents(m)
    }
}

/// Evaluates a knowledge query. On a multi-agent model the consensus operator
/// quantifies over all agents; other operators use the selected agent's
/// valuation, or the voted valuation when no agent is selected.
pub fn eval_knowledge<'a>(
    model: impl Into<KnowledgeModel<'a>>,
    q: &KnowledgeQuery,
    m: Option<usize>,
) -> Result<bool, KnowledgeError> {
    if !q.operator.is_knowledge() {
        return Err(KnowledgeError::NotKnowledge(q.operator.to_string()));
    }
    let model = model.into();
    if q.operator == DerivedOp::KConsensus && q.agent.is_none() {
        if let KnowledgeModel::Agents(mam) = model {
            return Ok(eval_consensus_k(mam, q.world, &q.subject)?);
        }
    }
    let formula = expand_derived(&q.operator, std::slice::from_ref(&q.subject), m)?;
    let chosen = match (model, &q.agent) {
        (KnowledgeModel::Single(single), None) => single.clone(),
        (KnowledgeModel::Single(_), Some(name)) => return Err(KnowledgeError::AgentOnSingleModel(name.clone())),
        (KnowledgeModel::Agents(mam), Some(name)) => mam
            .agent_model(name)
            .ok_or_else(|| KnowledgeError::UnknownAgent(name.clone()))?,
        (KnowledgeModel::Agents(mam), None) => vote(mam),
    };
    Ok(eval_nt(&chosen, q.world, &formula)?)
}

/// Truth of `f` at every world of the voted model; `None` past a uniform
/// frame's horizon.
pub fn voted_pipeline(mam: &MultiAgentModel, f: &Formula) -> Vec<Option<bool>> {
    truth_table(&vote(mam), f)
}
