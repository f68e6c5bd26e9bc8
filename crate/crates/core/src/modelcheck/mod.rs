//! Truth of formulas on finite pointed models.

mod enumerate;
pub mod small;

use std::collections::HashMap;

use thiserror::Error;

use crate::kripke::{Model, PointedModel};
use crate::reduction::{self, ReduceError};
use crate::syntax::Formula;

pub use enumerate::{enumerate_refinements, EnumerateError, RefinementStream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cannot evaluate refinement quantifier directly: {0}")]
    Quantifier(Formula),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

/// The set of states where `f` holds, as a membership vector.
///
/// Subformulas shared in memory are labelled once.
pub fn extension(m: &Model, f: &Formula) -> Result<Vec<bool>, EvalError> {
    let mut memo = HashMap::new();
    label(m, f, &mut memo)
}

fn label(m: &Model, f: &Formula, memo: &mut HashMap<*const Formula, Vec<bool>>) -> Result<Vec<bool>, EvalError> {
    let key = f as *const Formula;
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let n = m.len();
    let v = match f {
        Formula::Top => vec![true; n],
        Formula::Bottom => vec![false; n],
        Formula::Prop(p) => (0..n).map(|s| m.holds(p, s)).collect(),
        Formula::Not(g) => label(m, g, memo)?.into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => zip(label(m, l, memo)?, label(m, r, memo)?, |x, y| x && y),
        Formula::Or(l, r) => zip(label(m, l, memo)?, label(m, r, memo)?, |x, y| x || y),
        Formula::Implies(l, r) => zip(label(m, l, memo)?, label(m, r, memo)?, |x, y| !x || y),
        Formula::Iff(l, r) => zip(label(m, l, memo)?, label(m, r, memo)?, |x, y| x == y),
        Formula::Box(a, g) => {
            let inner = label(m, g, memo)?;
            (0..n).map(|s| m.successors(a, s).iter().all(|&t| inner[t])).collect()
        }
        Formula::Diamond(a, g) => {
            let inner = label(m, g, memo)?;
            (0..n).map(|s| m.successors(a, s).iter().any(|&t| inner[t])).collect()
        }
        Formula::Cover(a, members) => {
            let exts = members
                .iter()
                .map(|g| label(m, g, memo))
                .collect::<Result<Vec<_>, _>>()?;
            (0..n)
                .map(|s| {
                    let succ = m.successors(a, s);
                    succ.iter().all(|&t| exts.iter().any(|e| e[t]))
                        && exts.iter().all(|e| succ.iter().any(|&t| e[t]))
                })
                .collect()
        }
        Formula::AllRef(..) | Formula::SomeRef(..) => return Err(EvalError::Quantifier(f.clone())),
    };
    memo.insert(key, v.clone());
    Ok(v)
}

fn zip(l: Vec<bool>, r: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    l.into_iter().zip(r).map(|(x, y)| op(x, y)).collect()
}

/// Truth of a refinement-free formula at the point.
pub fn evaluate(pm: &PointedModel, f: &Formula) -> Result<bool, EvalError> {
    Ok(extension(&pm.model, f)?[pm.point])
}

/// Truth of any formula at the point, by reduction to plain modal logic.
pub fn evaluate_rml(pm: &PointedModel, f: &Formula) -> Result<bool, EvalError> {
    evaluate_rml_with_budget(pm, f, reduction::default_budget())
}

pub fn evaluate_rml_with_budget(pm: &PointedModel, f: &Formula, budget: usize) -> Result<bool, EvalError> {
    if f.is_refinement_free() {
        return evaluate(pm, f);
    }
    let (reduced, _) = reduction::reduce_with_budget(f, budget)?;
    evaluate(pm, &reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Agent, Prop};

    fn chain(n: usize) -> PointedModel {
        let mut m = Model::with_states(n);
        let a = Agent::new("a");
        for i in 1..n {
            m.add_edge(&a, i - 1, i);
        }
        PointedModel::new(m, 0)
    }

    fn eval(pm: &PointedModel, text: &str) -> bool {
        evaluate(pm, &parse(text).unwrap()).unwrap()
    }

    #[test]
    fn chain_depth_formulas() {
        assert!(eval(&chain(4), "<a><a><a>[a]bottom"));
        assert!(eval(&chain(3), "<a><a>[a]bottom"));
        assert!(!eval(&chain(4), "<a><a>[a]bottom"));
    }

    #[test]
    fn empty_cover_means_no_successors() {
        assert!(eval(&chain(1), "nabla_a {}"));
        assert!(!eval(&chain(2), "nabla_a {}"));
        assert!(eval(&chain(2), "nabla_a {top}"));
        assert!(!eval(&chain(2), "nabla_a {top, <a>top}"));
    }

    #[test]
    fn unknown_symbols_are_empty() {
        let pm = chain(2);
        assert!(eval(&pm, "[b]bottom"));
        assert!(eval(&pm, "~q"));
        let mut m = pm.model.clone();
        m.set_prop(&Prop::new("q"), 0, true);
        assert!(eval(&PointedModel::new(m, 0), "q"));
    }

    #[test]
    fn quantifiers_are_rejected() {
        let f = parse("E_a p").unwrap();
        assert!(matches!(evaluate(&chain(1), &f), Err(EvalError::Quantifier(_))));
    }
}
