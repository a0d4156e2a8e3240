//! Truth evaluation under the non-transitive clauses, rule validity, consensus
//! knowledge, and the classic LTL evaluator on ultimately periodic models.
//!
//! Formulas are compiled into a hash-consed DAG ([`Program`]) and evaluated
//! bottom-up into one `u64` world-set per node. Under the non-transitive
//! clauses `f U g` holds at `a` iff some `j <= d_a` has `g` at `path(a, j)`
//! and `f` at `path(a, j')` for every `j' < j`; order inside a window is path
//! order, which matters once a lasso window wraps.
//!
//! On a uniform frame `Next` is undefined at the last world. Evaluating `f` at
//! `a` is only allowed when `a + reach(f, m) <= W - 1`; within that horizon
//! every node the result depends on is defined.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::frames::{Frame, FrameError, Model, MultiAgentModel, Valuation, MAX_WORLDS};
use crate::syntax::{expand_derived, reach, DerivedOp, Formula, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("world {world} is not in a {worlds}-world frame")]
    WorldOutOfRange { world: usize, worlds: usize },
    #[error("formula needs worlds up to {needed}, but the uniform frame ends at {last}")]
    WindowOverflow { needed: usize, last: usize },
    #[error("enumeration over {needed} Boolean atoms exceeds the cap of {cap}")]
    ResourceCap { needed: usize, cap: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    Letter(usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Next(usize),
    Until(usize, usize),
}

/// Formulas compiled to a DAG in topological order; structurally equal
/// subformulas share one node.
#[derive(Debug, Clone, Default)]
pub(crate) struct Program {
    ops: Vec<Op>,
    letters: Vec<String>,
    interned: HashMap<Op, usize>,
    letter_ids: HashMap<String, usize>,
}

impl Program {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Program over a fixed letter order; further letters are appended.
    pub(crate) fn with_letters(letters: &[String]) -> Self {
        let mut p = Self::new();
        for l in letters {
            p.letter(l);
        }
        p
    }

    fn letter(&mut self, name: &str) -> usize {
        if let Some(&id) = self.letter_ids.get(name) {
            return id;
        }
        let id = self.letters.len();
        self.letters.push(name.to_string());
        self.letter_ids.insert(name.to_string(), id);
        id
    }

    fn intern(&mut self, op: Op) -> usize {
        if let Some(&id) = self.interned.get(&op) {
            return id;
        }
        let id = self.ops.len();
        self.ops.push(op);
        self.interned.insert(op, id);
        id
    }

    pub(crate) fn add(&mut self, f: &Formula) -> usize {
        let op = match f {
            Formula::Letter(name) => Op::Letter(self.letter(name)),
            Formula::True => Op::True,
            Formula::False => Op::False,
            Formula::Not(g) => Op::Not(self.add(g)),
            Formula::Next(g) => Op::Next(self.add(g)),
            Formula::And(g, h) => {
                let (g, h) = (self.add(g), self.add(h));
                Op::And(g, h)
            }
            Formula::Or(g, h) => {
                let (g, h) = (self.add(g), self.add(h));
                Op::Or(g, h)
            }
            Formula::Implies(g, h) => {
                let (g, h) = (self.add(g), self.add(h));
                Op::Implies(g, h)
            }
            Formula::Until(g, h) => {
                let (g, h) = (self.add(g), self.add(h));
                Op::Until(g, h)
            }
        };
        self.intern(op)
    }

    pub(crate) fn letters(&self) -> &[String] {
        &self.letters
    }

    pub(crate) fn letter_masks(&self, v: &Valuation) -> Vec<u64> {
        self.letters.iter().map(|l| v.mask(l)).collect()
    }
}

pub(crate) fn full_mask(worlds: usize) -> u64 {
    if worlds >= 64 {
        u64::MAX
    } else {
        (1u64 << worlds) - 1
    }
}

/// Transition data of a finite frame, precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Structure {
    worlds: usize,
    next: Vec<Option<usize>>,
    windows: Vec<Vec<usize>>,
}

impl Structure {
    pub(crate) fn of(frame: &Frame) -> Self {
        let worlds = frame.worlds();
        Structure {
            worlds,
            next: (0..worlds).map(|a| frame.next(a)).collect(),
            windows: (0..worlds).map(|a| frame.window(a)).collect(),
        }
    }

    /// Fills `out[i]` with the set of worlds where node `i` holds.
    pub(crate) fn eval(&self, program: &Program, letters: &[u64], out: &mut Vec<u64>) {
        let all = full_mask(self.worlds);
        out.clear();
        out.reserve(program.ops.len());
        for op in &program.ops {
            let mask = match *op {
                Op::Letter(i) => letters[i] & all,
                Op::True => all,
                Op::False => 0,
                Op::Not(g) => !out[g] & all,
                Op::And(g, h) => out[g] & out[h],
                Op::Or(g, h) => out[g] | out[h],
                Op::Implies(g, h) => (!out[g] | out[h]) & all,
                Op::Next(g) => {
                    let inner = out[g];
                    let mut m = 0;
                    for (a, next) in self.next.iter().enumerate() {
                        if let Some(b) = *next {
                            m |= (inner >> b & 1) << a;
                        }
                    }
                    m
                }
                Op::Until(g, h) => {
                    let (hold, goal) = (out[g], out[h]);
                    let mut m = 0;
                    for (a, window) in self.windows.iter().enumerate() {
                        for &w in window {
                            if goal >> w & 1 == 1 {
                                m |= 1 << a;
                                break;
                            }
                            if hold >> w & 1 == 0 {
                                break;
                            }
                        }
                    }
                    m
                }
            };
            out.push(mask);
        }
    }
}

/// Classic (transitive, unbounded) evaluation on the ultimately periodic model
/// with prefix `[0, L)` and loop `[L, W)`.
pub(crate) fn eval_classic_masks(
    program: &Program,
    worlds: usize,
    loop_target: usize,
    letters: &[u64],
    out: &mut Vec<u64>,
) {
    let all = full_mask(worlds);
    let next = |a: usize| if a + 1 < worlds { a + 1 } else { loop_target };
    out.clear();
    for op in &program.ops {
        let mask = match *op {
            Op::Letter(i) => letters[i] & all,
            Op::True => all,
            Op::False => 0,
            Op::Not(g) => !out[g] & all,
            Op::And(g, h) => out[g] & out[h],
            Op::Or(g, h) => out[g] | out[h],
            Op::Implies(g, h) => (!out[g] | out[h]) & all,
            Op::Next(g) => (0..worlds).fold(0, |m, a| m | (out[g] >> next(a) & 1) << a),
            Op::Until(g, h) => {
                let (hold, goal) = (out[g], out[h]);
                let bit = |m: u64, a: usize| m >> a & 1 == 1;
                // Least fixpoint on the loop, then one backward sweep of the prefix.
                let mut m = goal & all & !full_mask(loop_target);
                loop {
                    let mut changed = false;
                    for a in (loop_target..worlds).rev() {
                        if !bit(m, a) && bit(hold, a) && bit(m, next(a)) {
                            m |= 1 << a;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                for a in (0..loop_target).rev() {
                    if bit(goal, a) || (bit(hold, a) && bit(m, a + 1)) {
                        m |= 1 << a;
                    }
                }
                m
            }
        };
        out.push(mask);
    }
}

fn check_world(worlds: usize, a: usize) -> Result<(), EvalError> {
    if a < worlds {
        Ok(())
    } else {
        Err(EvalError::WorldOutOfRange { world: a, worlds })
    }
}

/// Rejects evaluation of `f` at `a` on a uniform frame when its horizon
/// `a + reach(f, m)` runs past the last world.
pub(crate) fn check_horizon(frame: &Frame, a: usize, f: &Formula) -> Result<(), EvalError> {
    check_world(frame.worlds(), a)?;
    if let Frame::Uniform(u) = frame {
        let needed = a + reach(f, u.measure());
        if needed > u.worlds() - 1 {
            return Err(EvalError::WindowOverflow {
                needed,
                last: u.worlds() - 1,
            });
        }
    }
    Ok(())
}

fn masks_of(model: &Model, formulas: &[&Formula]) -> (Vec<usize>, Vec<u64>) {
    let mut program = Program::new();
    let roots = formulas.iter().map(|f| program.add(f)).collect();
    let letters = program.letter_masks(model.valuation());
    let mut out = Vec::new();
    Structure::of(model.frame()).eval(&program, &letters, &mut out);
    (roots, out)
}

/// Truth of `f` at world `a` under the non-transitive clauses.
pub fn eval_nt(model: &Model, a: usize, f: &Formula) -> Result<bool, EvalError> {
    check_horizon(model.frame(), a, f)?;
    let (roots, masks) = masks_of(model, &[f]);
    Ok(masks[roots[0]] >> a & 1 == 1)
}

/// Truth of `f` at every world; `None` where a uniform frame is too short to
/// decide it.
pub fn truth_table(model: &Model, f: &Formula) -> Vec<Option<bool>> {
    let (roots, masks) = masks_of(model, &[f]);
    (0..model.worlds())
        .map(|a| {
            check_horizon(model.frame(), a, f)
                .ok()
                .map(|()| masks[roots[0]] >> a & 1 == 1)
        })
        .collect()
}

fn check_all_worlds(frame: &Frame, f: &Formula) -> Result<(), EvalError> {
    // The last world has the tightest horizon.
    check_horizon(frame, frame.worlds() - 1, f)
}

/// `f` holds at every world of `model`.
pub fn formula_valid_in_model(model: &Model, f: &Formula) -> Result<bool, EvalError> {
    check_all_worlds(model.frame(), f)?;
    let (roots, masks) = masks_of(model, &[f]);
    Ok(masks[roots[0]] == full_mask(model.worlds()))
}

/// World where `r` is refuted in `model`: every premise holds everywhere and
/// the conclusion fails at the returned (smallest) world.
pub fn rule_refutation_world(model: &Model, r: &Rule) -> Result<Option<usize>, EvalError> {
    for f in r.premises().iter().chain([r.conclusion()]) {
        check_all_worlds(model.frame(), f)?;
    }
    let formulas: Vec<&Formula> = r.premises().iter().chain([r.conclusion()]).collect();
    let (roots, masks) = masks_of(model, &formulas);
    let all = full_mask(model.worlds());
    let (conclusion, premises) = roots.split_last().unwrap();
    if premises.iter().all(|&p| masks[p] == all) && masks[*conclusion] != all {
        Ok(Some((!masks[*conclusion] & all).trailing_zeros() as usize))
    } else {
        Ok(None)
    }
}

/// Premises valid in `model` imply the conclusion is valid in `model`.
pub fn rule_valid_in_model(model: &Model, r: &Rule) -> Result<bool, EvalError> {
    Ok(rule_refutation_world(model, r)?.is_none())
}

/// Runs `pred` over valuation indices `0..2^bits` in parallel and returns the
/// smallest index it accepts.
pub(crate) fn first_index<F>(bits: usize, pred: F) -> Option<u64>
where
    F: Fn(u64, &mut Vec<u64>) -> bool + Sync,
{
    let total = 1u64 << bits;
    if total <= 1024 {
        let mut buf = Vec::new();
        return (0..total).find(|&v| pred(v, &mut buf));
    }
    (0..total as usize)
        .into_par_iter()
        .with_min_len(1024)
        .map_init(Vec::new, |buf, v| (v as u64, pred(v as u64, buf)))
        .find_first(|(_, hit)| *hit)
        .map(|(v, _)| v)
}

/// Splits valuation index `v` into per-letter world masks; letter `i` owns
/// bits `i*W .. (i+1)*W`.
pub(crate) fn unpack(v: u64, letters: usize, worlds: usize, out: &mut Vec<u64>) {
    out.clear();
    let all = full_mask(worlds);
    out.extend((0..letters).map(|i| (v >> (i * worlds)) & all));
}

pub(crate) fn valuation_from_index(letters: &[String], v: u64, worlds: usize) -> Valuation {
    let mut masks = Vec::new();
    unpack(v, letters.len(), worlds, &mut masks);
    Valuation::from_masks(letters.iter().map(String::as_str).zip(masks))
}

/// First valuation, in binary order, refuting `r` on `frame`, with the
/// refuting world.
pub fn first_frame_refutation(
    frame: &Frame,
    r: &Rule,
    max_atoms: usize,
) -> Result<Option<(Valuation, usize)>, EvalError> {
    for f in r.premises().iter().chain([r.conclusion()]) {
        check_all_worlds(frame, f)?;
    }
    let worlds = frame.worlds();
    let needed = r.letters().len() * worlds;
    if needed > max_atoms || needed > 63 {
        return Err(EvalError::ResourceCap {
            needed,
            cap: max_atoms.min(63),
        });
    }
    let mut program = Program::with_letters(r.letters());
    let premises: Vec<usize> = r.premises().iter().map(|f| program.add(f)).collect();
    let conclusion = program.add(r.conclusion());
    let structure = Structure::of(frame);
    let all = full_mask(worlds);
    let n = program.letters().len();
    let hit = first_index(needed, |v, buf| {
        let mut letters = Vec::with_capacity(n);
        unpack(v, n, worlds, &mut letters);
        structure.eval(&program, &letters, buf);
        premises.iter().all(|&p| buf[p] == all) && buf[conclusion] != all
    });
    Ok(hit.map(|v| {
        let mut letters = Vec::new();
        unpack(v, n, worlds, &mut letters);
        let mut buf = Vec::new();
        structure.eval(&program, &letters, &mut buf);
        let world = (!buf[conclusion] & all).trailing_zeros() as usize;
        (valuation_from_index(program.letters(), v, worlds), world)
    }))
}

/// `r` is valid in `frame`: no valuation of its letters refutes it. The
/// enumeration covers `2^(n*W)` valuations and is refused beyond `max_atoms`.
pub fn rule_valid_in_frame(frame: &Frame, r: &Rule, max_atoms: usize) -> Result<bool, EvalError> {
    Ok(first_frame_refutation(frame, r, max_atoms)?.is_none())
}

/// Consensus knowledge at `a`: for every agent valuation, `Diamond f` and
/// `Box(!f -> X !f)` hold at `a`.
pub fn eval_consensus_k(mam: &MultiAgentModel, a: usize, f: &Formula) -> Result<bool, EvalError> {
    let clause = expand_derived(&DerivedOp::KConsensus, std::slice::from_ref(f), None)
        .expect("consensus clause is unary and needs no measure");
    for model in mam.agent_models() {
        if !eval_nt(&model, a, &clause)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite presentation of the infinite classic model whose valuation repeats
/// `[L, W)` forever after the prefix `[0, L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicLassoModel {
    worlds: usize,
    loop_target: usize,
    valuation: Valuation,
}

impl ClassicLassoModel {
    pub fn new(worlds: usize, loop_target: usize, valuation: Valuation) -> Result<Self, FrameError> {
        // Reuse the lasso checks for world count, loop target and valuation range.
        let frame = crate::frames::FiniteLassoFrame::constant_reach(worlds, loop_target, 1)?;
        Model::new(frame, valuation.clone())?;
        Ok(ClassicLassoModel {
            worlds,
            loop_target,
            valuation,
        })
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn loop_target(&self) -> usize {
        self.loop_target
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }
}

/// Classic LTL truth of `f` at `a`, with unbounded `U` witnesses.
pub fn eval_classic(cm: &ClassicLassoModel, a: usize, f: &Formula) -> Result<bool, EvalError> {
    check_world(cm.worlds, a)?;
    let mut program = Program::new();
    let root = program.add(f);
    let letters = program.letter_masks(&cm.valuation);
    let mut out = Vec::new();
    eval_classic_masks(&program, cm.worlds, cm.loop_target, &letters, &mut out);
    Ok(out[root] >> a & 1 == 1)
}

const _: () = assert!(MAX_WORLDS <= 64);
