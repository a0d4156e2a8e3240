//! Reduced normal forms for inference rules.
//!
//! A rule in reduced normal form is `ε / x_1` where `ε` is a disjunction of
//! perfect conjunctions: each disjunct gives a sign to every atom of
//! `A = {x_i} ∪ {X x_i} ∪ {x_i U x_k : i ≠ k}`. A sign `t = 0` keeps the atom,
//! `t = 1` negates it.
//!
//! Construction for a rule `φ_1, ..., φ_l / ψ`:
//!
//! 1. `Φ = φ_1 & ... & φ_l`.
//! 2. One variable per distinct non-constant subformula of `Φ` and `ψ`, with
//!    `x_1` reserved for `ψ`, then post-order first occurrence.
//! 3. Each variable is tied to its top connective applied to the variables
//!    (or constants) of its immediate subformulas. `X α` reads the atom
//!    `X x_α`, `α U β` reads `x_α U x_β`.
//! 4. Every atom of `A` is an independent Boolean; the assignments satisfying
//!    `x_Φ` and all ties are collected, ordered by binary counting over `A`.
//!
//! Temporal operators over constants are folded using the reflexive Until
//! witness and the totality of `Next`: `X true = true`, `a U true = true`,
//! `a U false = false`, `false U b = b`, `a U a = a`. The constant `true` gets
//! a variable only when it is the left operand of an Until (the `F` shape).

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::frames::{Frame, Valuation};
use crate::semantics::{check_horizon, first_index, full_mask, unpack, EvalError, Program, Structure};
use crate::syntax::{subformulas, Formula, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("normal form needs {atoms} atoms, above the cap of {cap}")]
    ResourceCap { atoms: usize, cap: usize },
}

/// Largest atom set the bit-packed representation can hold.
pub const MAX_PACKED_ATOMS: usize = 64;

/// Signs of one disjunct, `true` meaning the atom occurs negated (`t = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTable {
    pub base: Vec<bool>,
    pub next: Vec<bool>,
    /// Ordered pairs `(i, k)`, `i ≠ k`, lexicographic.
    pub until: Vec<((usize, usize), bool)>,
}

/// A rule in reduced normal form over variables `x_1 .. x_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedNormalFormRule {
    variable_count: usize,
    sources: Vec<Formula>,
    /// One word per disjunct; bit `a` is the sign `t` of atom `a`.
    disjuncts: Vec<u64>,
}

fn atom_count(n: usize) -> usize {
    n * (n + 1)
}

fn base_atom(i: usize) -> usize {
    i
}

fn next_atom(n: usize, i: usize) -> usize {
    n + i
}

fn until_atom(n: usize, i: usize, k: usize) -> usize {
    debug_assert_ne!(i, k);
    2 * n + i * (n - 1) + if k < i { k } else { k - 1 }
}

fn until_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&k| k != i).map(move |k| (i, k)))
}

pub fn variable_name(i: usize) -> String {
    format!("x_{}", i + 1)
}

impl ReducedNormalFormRule {
    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    /// `|A| = n(n + 1)`.
    pub fn atom_count(&self) -> usize {
        atom_count(self.variable_count)
    }

    pub fn disjunct_count(&self) -> usize {
        self.disjuncts.len()
    }

    /// Subformula of the source rule abbreviated by each variable.
    pub fn sources(&self) -> &[Formula] {
        &self.sources
    }

    pub fn base_sign(&self, j: usize, i: usize) -> bool {
        self.disjuncts[j] >> base_atom(i) & 1 == 1
    }

    pub fn next_sign(&self, j: usize, i: usize) -> bool {
        self.disjuncts[j] >> next_atom(self.variable_count, i) & 1 == 1
    }

    pub fn until_sign(&self, j: usize, i: usize, k: usize) -> bool {
        self.disjuncts[j] >> until_atom(self.variable_count, i, k) & 1 == 1
    }

    pub fn disjunct(&self, j: usize) -> SignTable {
        let n = self.variable_count;
        SignTable {
            base: (0..n).map(|i| self.base_sign(j, i)).collect(),
            next: (0..n).map(|i| self.next_sign(j, i)).collect(),
            until: until_pairs(n)
                .map(|(i, k)| ((i, k), self.until_sign(j, i, k)))
                .collect(),
        }
    }

    /// The atoms of `A` in canonical order: base, next, until by `(i, k)`.
    pub fn atoms(&self) -> Vec<Formula> {
        let n = self.variable_count;
        let x = |i: usize| Formula::letter(variable_name(i));
        (0..n)
            .map(x)
            .chain((0..n).map(|i| Formula::next(x(i))))
            .chain(until_pairs(n).map(|(i, k)| Formula::until(x(i), x(k))))
            .collect()
    }

    /// `ε / x_1` as an ordinary rule over letters `x_1 .. x_n`.
    pub fn render(&self) -> Rule {
        let atoms = self.atoms();
        let disjuncts = self
            .disjuncts
            .iter()
            .map(|&signs| {
                Formula::conjunction(atoms.iter().enumerate().map(|(a, atom)| {
                    if signs >> a & 1 == 1 {
                        Formula::not(atom.clone())
                    } else {
                        atom.clone()
                    }
                }))
            })
            .collect();
        Rule::new(
            vec![Formula::balanced_disjunction(disjuncts)],
            Formula::letter(variable_name(0)),
        )
        .expect("one premise")
    }

    /// First valuation of `x_1 .. x_n` (binary order) refuting the normal form
    /// on `frame`, evaluated through the sign tables instead of the rendered
    /// formula. Agrees with evaluating [`render`](Self::render).
    pub fn first_frame_refutation(
        &self,
        frame: &Frame,
        max_atoms: usize,
    ) -> Result<Option<(Valuation, usize)>, EvalError> {
        let n = self.variable_count;
        let worlds = frame.worlds();
        let needed = n * worlds;
        if needed > max_atoms || needed > 63 {
            return Err(EvalError::ResourceCap {
                needed,
                cap: max_atoms.min(63),
            });
        }
        let atoms = self.atoms();
        for atom in &atoms {
            check_horizon(frame, worlds - 1, atom)?;
        }
        let names: Vec<String> = (0..n).map(variable_name).collect();
        let mut program = Program::with_letters(&names);
        let ids: Vec<usize> = atoms.iter().map(|a| program.add(a)).collect();
        let allowed: HashSet<u64> = self.disjuncts.iter().copied().collect();
        let structure = Structure::of(frame);
        let all = full_mask(worlds);
        let signature = |buf: &[u64], w: usize| {
            ids.iter()
                .enumerate()
                .fold(0u64, |acc, (a, &id)| acc | ((!buf[id] >> w) & 1) << a)
        };
        let hit = first_index(needed, |v, buf| {
            let mut letters = Vec::with_capacity(n);
            unpack(v, n, worlds, &mut letters);
            structure.eval(&program, &letters, buf);
            buf[ids[0]] != all && (0..worlds).all(|w| allowed.contains(&signature(buf, w)))
        });
        Ok(hit.map(|v| {
            let mut letters = Vec::new();
            unpack(v, n, worlds, &mut letters);
            let world = (!letters[0] & all).trailing_zeros() as usize;
            (
                Valuation::from_masks(names.iter().map(String::as_str).zip(letters)),
                world,
            )
        }))
    }

    pub fn valid_in_frame(&self, frame: &Frame, max_atoms: usize) -> Result<bool, EvalError> {
        Ok(self.first_frame_refutation(frame, max_atoms)?.is_none())
    }
}

impl fmt::Display for ReducedNormalFormRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The rule `x -> x / f` with `x` a letter not occurring in `f`.
pub fn formula_to_rule(f: &Formula) -> Rule {
    let used = f.letters();
    let fresh = std::iter::once("x".to_string())
        .chain((0..).map(|i| format!("x{i}")))
        .find(|name| !used.contains(name))
        .expect("unbounded supply of names");
    let x = Formula::letter(fresh);
    Rule::new(vec![Formula::implies(x.clone(), x)], f.clone()).expect("one premise")
}

/// How a variable's base value is computed from the atoms.
#[derive(Debug, Clone, Copy)]
enum Def {
    Free,
    Const(bool),
    Not(Val),
    And(Val, Val),
    Or(Val, Val),
    Implies(Val, Val),
    Atom(usize),
    Copy(Val),
}

/// A constant or the base value of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Const(bool),
    Var(usize),
}

struct Abstraction {
    n: usize,
    sources: Vec<Formula>,
    defs: Vec<Def>,
    /// Variables in dependency order.
    order: Vec<usize>,
    premise: Val,
}

impl Abstraction {
    fn build(rule: &Rule) -> Self {
        let premise = rule.premise_conjunction();
        let conclusion = rule.conclusion();
        let mut post_order = subformulas(&premise);
        for s in subformulas(conclusion) {
            if !post_order.contains(&s) {
                post_order.push(s);
            }
        }
        let top_needed = post_order.iter().any(|s| {
            matches!(s, Formula::Until(a, b) if **a == Formula::True && !b.is_constant())
        });
        let mut index: HashMap<Formula, usize> = HashMap::new();
        let mut sources = vec![conclusion.clone()];
        index.insert(conclusion.clone(), 0);
        for s in &post_order {
            let wanted = !s.is_constant() || (*s == Formula::True && top_needed);
            if wanted && !index.contains_key(s) {
                index.insert(s.clone(), sources.len());
                sources.push(s.clone());
            }
        }
        let val = |f: &Formula| match f {
            Formula::True if !top_needed => Val::Const(true),
            Formula::False => Val::Const(false),
            _ => Val::Var(index[f]),
        };
        let n = sources.len();
        let defs = sources
            .iter()
            .map(|s| match s {
                Formula::Letter(_) => Def::Free,
                Formula::True => Def::Const(true),
                Formula::False => Def::Const(false),
                Formula::Not(a) => Def::Not(val(a)),
                Formula::And(a, b) => Def::And(val(a), val(b)),
                Formula::Or(a, b) => Def::Or(val(a), val(b)),
                Formula::Implies(a, b) => Def::Implies(val(a), val(b)),
                Formula::Next(a) => match val(a) {
                    Val::Const(c) => Def::Const(c),
                    Val::Var(i) => Def::Atom(next_atom(n, i)),
                },
                Formula::Until(a, b) => match (val(a), val(b)) {
                    (_, Val::Const(c)) => Def::Const(c),
                    (Val::Const(false), v) => Def::Copy(v),
                    (Val::Var(i), Val::Var(k)) if i == k => Def::Copy(Val::Var(i)),
                    (Val::Var(i), Val::Var(k)) => Def::Atom(until_atom(n, i, k)),
                    (Val::Const(true), _) => unreachable!("true left of Until always has a variable"),
                },
            })
            .collect();
        let order = post_order
            .iter()
            .filter_map(|s| index.get(s).copied())
            .collect();
        let premise_val = val(&premise);
        Abstraction {
            n,
            sources,
            defs,
            order,
            premise: premise_val,
        }
    }
}

/// Builds the reduced normal form of `rule`. Refused when `|A| = n(n + 1)`
/// exceeds `max_atoms`.
pub fn to_reduced_normal_form(rule: &Rule, max_atoms: usize) -> Result<ReducedNormalFormRule, NormalFormError> {
    let abs = Abstraction::build(rule);
    let n = abs.n;
    let atoms = atom_count(n);
    let cap = max_atoms.min(MAX_PACKED_ATOMS);
    if atoms > cap {
        return Err(NormalFormError::ResourceCap { atoms, cap });
    }
    // Free atoms: base values of letters plus every next/until atom.
    let free: Vec<usize> = abs
        .defs
        .iter()
        .enumerate()
        .filter(|(_, d)| matches!(d, Def::Free))
        .map(|(i, _)| base_atom(i))
        .chain(n..atoms)
        .collect();
    let full = if atoms == 64 { u64::MAX } else { (1u64 << atoms) - 1 };
    let mut disjuncts = Vec::new();
    for pattern in 0u64..(1u64 << free.len()) {
        // `values` holds truth values, the complement of the signs.
        let mut values = 0u64;
        for (b, &atom) in free.iter().enumerate() {
            values |= (pattern >> b & 1) << atom;
        }
        let get = |values: u64, v: Val| match v {
            Val::Const(c) => c,
            Val::Var(i) => values >> base_atom(i) & 1 == 1,
        };
        for &var in &abs.order {
            let value = match abs.defs[var] {
                Def::Free => continue,
                Def::Const(c) => c,
                Def::Not(a) => !get(values, a),
                Def::And(a, b) => get(values, a) && get(values, b),
                Def::Or(a, b) => get(values, a) || get(values, b),
                Def::Implies(a, b) => !get(values, a) || get(values, b),
                Def::Atom(atom) => values >> atom & 1 == 1,
                Def::Copy(a) => get(values, a),
            };
            values |= (value as u64) << base_atom(var);
        }
        if get(values, abs.premise) {
            disjuncts.push(!values & full);
        }
    }
    disjuncts.sort_unstable();
    Ok(ReducedNormalFormRule {
        variable_count: n,
        sources: abs.sources,
        disjuncts,
    })
}

fn flatten_or<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Or(a, b) => {
            flatten_or(a, out);
            flatten_or(b, out);
        }
        _ => out.push(f),
    }
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        _ => out.push(f),
    }
}

/// `r` has the shape `ε / x_1`: one premise that is `false` or a disjunction of
/// perfect conjunctions over the atoms of the rule's letters, and a letter as
/// conclusion.
pub fn is_reduced_normal_form(r: &Rule) -> bool {
    let [premise] = r.premises() else {
        return false;
    };
    let Formula::Letter(head) = r.conclusion() else {
        return false;
    };
    if *premise == Formula::False {
        return true;
    }
    let mut vars: Vec<&str> = vec![head.as_str()];
    vars.extend(r.letters().iter().map(String::as_str).filter(|l| *l != head));
    let n = vars.len();
    let id = |f: &Formula| match f {
        Formula::Letter(l) => vars.iter().position(|v| v == l),
        _ => None,
    };
    let atom_of = |f: &Formula| -> Option<usize> {
        match f {
            Formula::Letter(_) => id(f).map(base_atom),
            Formula::Next(a) => id(a).map(|i| next_atom(n, i)),
            Formula::Until(a, b) => match (id(a), id(b)) {
                (Some(i), Some(k)) if i != k => Some(until_atom(n, i, k)),
                _ => None,
            },
            _ => None,
        }
    };
    let mut disjuncts = Vec::new();
    flatten_or(premise, &mut disjuncts);
    disjuncts.into_iter().all(|d| {
        let mut literals = Vec::new();
        flatten_and(d, &mut literals);
        if literals.len() != atom_count(n) {
            return false;
        }
        let mut seen = vec![false; atom_count(n)];
        literals.into_iter().all(|lit| {
            let atom = match lit {
                Formula::Not(inner) => atom_of(inner),
                other => atom_of(other),
            };
            match atom {
                Some(a) if !seen[a] => {
                    seen[a] = true;
                    true
                }
                _ => false,
            }
        })
    })
}
