//! Witness refinements for existential refinement formulas.
//!
//! The construction mirrors the elimination rules. For a satisfied conjunct a
//! fresh copy of the current state is made. Its a-arrows go only to
//! sub-witnesses of the members of the a-cover. A b-cover for another agent
//! keeps every b-successor, each replaced by a sub-witness, and adds
//! sub-witnesses for members nobody covered. Agents without a cover keep
//! their original arrows into the untouched copy of the input model.

use std::collections::{BTreeSet, HashMap};

use super::{default_budget, reduce_formula, ReduceError};
use crate::kripke::{generated, Model, PointedModel};
use crate::normal_forms::{to_disjunctive_with_budget, Conjunct, DisjunctiveForm, NormalFormError};
use crate::syntax::{Agent, Formula};

struct Builder<'a> {
    orig: &'a Model,
    out: Model,
    agent: Agent,
    memo: HashMap<(usize, DisjunctiveForm), Option<usize>>,
}

impl Builder<'_> {
    fn witness(&mut self, s: usize, d: &DisjunctiveForm) -> Option<usize> {
        let key = (s, d.clone());
        if let Some(w) = self.memo.get(&key) {
            return *w;
        }
        let w = d.conjuncts().iter().find_map(|c| self.witness_conjunct(s, c));
        self.memo.insert(key, w);
        w
    }

    fn witness_conjunct(&mut self, s: usize, c: &Conjunct) -> Option<usize> {
        if !c.literals.iter().all(|(p, pos)| self.orig.holds(p, s) == *pos) {
            return None;
        }
        let mut planned: Vec<(Agent, Vec<usize>)> = Vec::new();
        for (b, members) in &c.covers {
            let succ = self.orig.successors(b, s).to_vec();
            let mut targets = BTreeSet::new();
            if *b == self.agent {
                for m in members {
                    let w = succ.iter().find_map(|&u| self.witness(u, m))?;
                    targets.insert(w);
                }
            } else {
                let mut covered = vec![false; members.len()];
                for &u in &succ {
                    let (i, w) = members
                        .iter()
                        .enumerate()
                        .find_map(|(i, m)| self.witness(u, m).map(|w| (i, w)))?;
                    covered[i] = true;
                    targets.insert(w);
                }
                for (i, m) in members.iter().enumerate() {
                    if !covered[i] {
                        targets.insert(succ.iter().find_map(|&u| self.witness(u, m))?);
                    }
                }
            }
            planned.push((b.clone(), targets.into_iter().collect()));
        }
        let copy = self.out.add_state(&format!("{}'", self.orig.name(s)));
        for p in self.orig.props() {
            self.out.set_prop(p, copy, self.orig.holds(p, s));
        }
        let agents: Vec<Agent> = self.orig.agents().cloned().collect();
        for b in &agents {
            self.out.add_agent(b);
            if !c.covers.contains_key(b) {
                for &t in self.orig.successors(b, s) {
                    self.out.add_edge(b, copy, t);
                }
            }
        }
        for (b, targets) in planned {
            self.out.add_agent(&b);
            for t in targets {
                self.out.add_edge(&b, copy, t);
            }
        }
        Some(copy)
    }
}

/// An a-refinement of `pm` satisfying `psi`, if one exists.
///
/// Quantifiers inside `psi` are reduced first. The result is restricted to
/// the states reachable from its point.
pub fn synthesize_witness(pm: &PointedModel, a: &Agent, psi: &Formula) -> Result<Option<PointedModel>, ReduceError> {
    synthesize_witness_with_budget(pm, a, psi, default_budget())
}

pub fn synthesize_witness_with_budget(
    pm: &PointedModel,
    a: &Agent,
    psi: &Formula,
    budget: usize,
) -> Result<Option<PointedModel>, ReduceError> {
    let body = reduce_formula(psi, budget)?;
    let d = to_disjunctive_with_budget(&body, budget).map_err(|e| match e {
        NormalFormError::Budget(limit) => ReduceError::BudgetExceeded { limit },
        _ => ReduceError::Shape(body.clone()),
    })?;
    let mut b = Builder {
        orig: &pm.model,
        out: pm.model.clone(),
        agent: a.clone(),
        memo: HashMap::new(),
    };
    Ok(b.witness(pm.point, &d).map(|w| generated(&PointedModel::new(b.out, w))))
}

/// A refinement for all of `agents` satisfying `psi`, obtained by chaining
/// single-agent witnesses: first for `E_a1 E_a2 ... psi`'s outer quantifier,
/// then inward.
pub fn synthesize_group_witness(
    pm: &PointedModel,
    agents: &[Agent],
    psi: &Formula,
) -> Result<Option<PointedModel>, ReduceError> {
    synthesize_group_witness_with_budget(pm, agents, psi, default_budget())
}

pub fn synthesize_group_witness_with_budget(
    pm: &PointedModel,
    agents: &[Agent],
    psi: &Formula,
    budget: usize,
) -> Result<Option<PointedModel>, ReduceError> {
    let mut current = pm.clone();
    for (i, a) in agents.iter().enumerate() {
        let rest = agents[i + 1..]
            .iter()
            .rev()
            .fold(psi.clone(), |acc, b| Formula::some_ref(b.clone(), acc));
        match synthesize_witness_with_budget(&current, a, &rest, budget)? {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}
