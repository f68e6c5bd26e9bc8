//! Compilation of refinement quantifiers into plain modal logic.
//!
//! The innermost quantifier is eliminated first, so its body is always
//! refinement-free and can be put in disjunctive form. The quantifier is then
//! pushed through the disjunctive form:
//!
//! ```text
//! E_a (x | y)                 ~>  E_a x | E_a y
//! E_a (l & nabla_b1 X & ...)  ~>  l & E_a nabla_b1 X & ...
//! E_a nabla_a {x1, ..., xn}   ~>  <a>E_a x1 & ... & <a>E_a xn
//! E_a nabla_b {x1, ..., xn}   ~>  nabla_b {E_a x1, ..., E_a xn}
//! E_a l                       ~>  l
//! ```

mod witness;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::normal_forms::{simplify, to_disjunctive_with_budget, Conjunct, DisjunctiveForm, NormalFormError};
use crate::syntax::{Agent, Formula};

pub use witness::{
    synthesize_group_witness, synthesize_group_witness_with_budget, synthesize_witness, synthesize_witness_with_budget,
};

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Node budget for reduction: `RMLKIT_MAX_NODES` if set and valid, else
/// [`DEFAULT_BUDGET`].
pub fn default_budget() -> usize {
    std::env::var("RMLKIT_MAX_NODES")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("reduction exceeded the budget of {limit} nodes")]
    BudgetExceeded { limit: usize },
    #[error("expected an existential refinement quantifier over a refinement-free body, found {0}")]
    Shape(Formula),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    RProp,
    RK,
    RKmulti,
    RKconj,
    OrSplit,
    PropFactor,
    DNF,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One local rewrite: `before` and `after` are equivalent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub before: Formula,
    pub after: Formula,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
}

impl ReductionTrace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.steps
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "rule": s.rule.to_string(),
                        "before": s.before.to_string(),
                        "after": s.after.to_string(),
                    })
                })
                .collect(),
        )
    }
}

struct Reducer {
    budget: usize,
    trace: Option<Vec<Step>>,
}

impl Reducer {
    fn record(&mut self, rule: Rule, step: impl FnOnce() -> (Formula, Formula)) {
        if let Some(t) = self.trace.as_mut() {
            let (before, after) = step();
            t.push(Step { rule, before, after });
        }
    }

    fn check(&self, f: Formula) -> Result<Formula, ReduceError> {
        if f.size() > self.budget {
            return Err(ReduceError::BudgetExceeded { limit: self.budget });
        }
        Ok(f)
    }

    fn go(&mut self, f: &Formula) -> Result<Formula, ReduceError> {
        if f.is_refinement_free() {
            return Ok(f.clone());
        }
        match f {
            Formula::SomeRef(a, g) => {
                let body = self.go(g)?;
                self.exists(a, &body)
            }
            Formula::AllRef(a, g) => {
                let body = self.go(g)?;
                let negated = Formula::not(body.clone()).to_nnf();
                let d = self.disjunctive(&negated)?;
                self.record(Rule::DNF, || {
                    (
                        Formula::all_ref(a.clone(), body.clone()),
                        Formula::not(Formula::some_ref(a.clone(), d.to_formula())),
                    )
                });
                let inner = self.exists_df(a, &d);
                self.check(simplify(&Formula::not(inner)))
            }
            _ => {
                let mut err = None;
                let out = f.map_children(|c| match self.go(c) {
                    Ok(r) => r,
                    Err(e) => {
                        err.get_or_insert(e);
                        Formula::Top
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => self.check(simplify(&out)),
                }
            }
        }
    }

    fn disjunctive(&self, f: &Formula) -> Result<DisjunctiveForm, ReduceError> {
        to_disjunctive_with_budget(f, self.budget).map_err(|e| match e {
            NormalFormError::Budget(_) => ReduceError::BudgetExceeded { limit: self.budget },
            _ => ReduceError::Shape(f.clone()),
        })
    }

    /// `E_a body` for a refinement-free body.
    fn exists(&mut self, a: &Agent, body: &Formula) -> Result<Formula, ReduceError> {
        let d = self.disjunctive(body)?;
        self.record(Rule::DNF, || {
            (
                Formula::some_ref(a.clone(), body.clone()),
                Formula::some_ref(a.clone(), d.to_formula()),
            )
        });
        let out = self.exists_df(a, &d);
        self.check(simplify(&out))
    }

    fn exists_df(&mut self, a: &Agent, d: &DisjunctiveForm) -> Formula {
        if d.conjuncts().len() > 1 {
            self.record(Rule::OrSplit, || {
                (
                    Formula::some_ref(a.clone(), d.to_formula()),
                    Formula::disj(d.conjuncts().iter().map(|c| Formula::some_ref(a.clone(), c.to_formula()))),
                )
            });
        }
        if d.conjuncts().is_empty() {
            // E_a bottom is bottom.
            self.record(Rule::RProp, || (Formula::some_ref(a.clone(), Formula::Bottom), Formula::Bottom));
        }
        let parts: Vec<Formula> = d.conjuncts().iter().map(|c| self.exists_conjunct(a, c)).collect();
        Formula::disj(parts)
    }

    fn exists_conjunct(&mut self, a: &Agent, c: &Conjunct) -> Formula {
        let prop = c.propositional_part();
        if c.covers.is_empty() {
            self.record(Rule::RProp, || (Formula::some_ref(a.clone(), prop.clone()), prop.clone()));
            return prop;
        }
        let cover_of = |b: &Agent, members: &[DisjunctiveForm]| {
            Formula::cover(b.clone(), members.iter().map(DisjunctiveForm::to_formula))
        };
        let modal = || Formula::conj(c.covers.iter().map(|(b, ms)| cover_of(b, ms)));
        if !c.literals.is_empty() {
            self.record(Rule::PropFactor, || {
                (
                    Formula::some_ref(a.clone(), c.to_formula()),
                    Formula::and(prop.clone(), Formula::some_ref(a.clone(), modal())),
                )
            });
        }
        if c.covers.len() > 1 {
            self.record(Rule::RKconj, || {
                (
                    Formula::some_ref(a.clone(), modal()),
                    Formula::conj(c.covers.iter().map(|(b, ms)| Formula::some_ref(a.clone(), cover_of(b, ms)))),
                )
            });
        }
        let mut parts = Vec::new();
        if !c.literals.is_empty() {
            parts.push(prop.clone());
        }
        for (b, members) in &c.covers {
            let quantified = |m: &DisjunctiveForm| Formula::some_ref(a.clone(), m.to_formula());
            if b == a {
                self.record(Rule::RK, || {
                    (
                        Formula::some_ref(a.clone(), cover_of(b, members)),
                        Formula::conj(members.iter().map(|m| Formula::diamond(a.clone(), quantified(m)))),
                    )
                });
                for m in members {
                    let inner = self.exists_df(a, m);
                    parts.push(Formula::diamond(a.clone(), inner));
                }
            } else {
                self.record(Rule::RKmulti, || {
                    (
                        Formula::some_ref(a.clone(), cover_of(b, members)),
                        Formula::cover(b.clone(), members.iter().map(quantified)),
                    )
                });
                let inner: Vec<Formula> = members.iter().map(|m| self.exists_df(a, m)).collect();
                parts.push(Formula::cover(b.clone(), inner));
            }
        }
        Formula::conj(parts)
    }
}

/// Eliminates one existential quantifier whose body is refinement-free.
pub fn eliminate_innermost(f: &Formula) -> Result<Formula, ReduceError> {
    match f {
        Formula::SomeRef(a, body) if body.is_refinement_free() => {
            let mut r = Reducer {
                budget: default_budget(),
                trace: None,
            };
            r.exists(a, body)
        }
        _ => Err(ReduceError::Shape(f.clone())),
    }
}

/// An equivalent refinement-free formula, with the rewrite steps taken.
pub fn reduce(f: &Formula) -> Result<(Formula, ReductionTrace), ReduceError> {
    reduce_with_budget(f, default_budget())
}

pub fn reduce_with_budget(f: &Formula, budget: usize) -> Result<(Formula, ReductionTrace), ReduceError> {
    let mut r = Reducer {
        budget,
        trace: Some(Vec::new()),
    };
    let out = r.go(f)?;
    Ok((
        out,
        ReductionTrace {
            steps: r.trace.unwrap_or_default(),
        },
    ))
}

/// [`reduce`] without recording a trace.
pub fn reduce_formula(f: &Formula, budget: usize) -> Result<Formula, ReduceError> {
    let mut r = Reducer { budget, trace: None };
    r.go(f)
}
