//! Bisimulation and B-refinement as greatest fixpoints.
//!
//! Both checks start from every atom-agreeing pair and delete, round by
//! round, the pairs that break a forth or back clause. The round in which a
//! pair dies, together with the clause that killed it, is kept; it is a
//! Spoiler strategy in disguise and is read back as a distinguishing formula.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{Model, PointedModel};
use crate::syntax::{Agent, Formula, Prop};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("relations do not share the middle model")]
    ModelMismatch,
    #[error("states `{0}` and `{1}` are bisimilar")]
    Bisimilar(String, String),
}

/// A set of state pairs between two models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRelation {
    pub left: Model,
    pub right: Model,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl StateRelation {
    pub fn identity(m: &Model) -> StateRelation {
        StateRelation {
            left: m.clone(),
            right: m.clone(),
            pairs: (0..m.len()).map(|s| (s, s)).collect(),
        }
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.pairs.contains(&(s, t))
    }

    pub fn named_pairs(&self) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|&(s, t)| (self.left.name(s).to_string(), self.right.name(t).to_string()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.named_pairs()).expect("plain data")
    }

    /// Whether the pairs satisfy atoms, back for every agent and forth for
    /// every agent outside `b`.
    pub fn is_refinement(&self, b: &BTreeSet<Agent>) -> bool {
        self.satisfies(None, b)
    }

    pub fn is_bisimulation(&self) -> bool {
        self.satisfies(None, &BTreeSet::new())
    }

    /// A bisimulation that may disagree on `p`.
    pub fn is_restricted_bisimulation(&self, p: &Prop) -> bool {
        self.satisfies(Some(p), &BTreeSet::new())
    }

    fn satisfies(&self, except: Option<&Prop>, forth_exempt: &BTreeSet<Agent>) -> bool {
        if self.pairs.is_empty() {
            return false;
        }
        let agents: BTreeSet<&Agent> = self.left.agents().chain(self.right.agents()).collect();
        self.pairs.iter().all(|&(s, t)| {
            if s >= self.left.len() || t >= self.right.len() {
                return false;
            }
            if !self.left.atoms_agree(s, &self.right, t, except) {
                return false;
            }
            agents.iter().all(|a| {
                let forth = forth_exempt.contains(*a)
                    || self.left.successors(a, s).iter().all(|&s2| {
                        self.right.successors(a, t).iter().any(|&t2| self.contains(s2, t2))
                    });
                let back = self.right.successors(a, t).iter().all(|&t2| {
                    self.left.successors(a, s).iter().any(|&s2| self.contains(s2, t2))
                });
                forth && back
            })
        })
    }
}

/// Relational composition `r1 ; r2`.
pub fn compose_refinements(r1: &StateRelation, r2: &StateRelation) -> Result<StateRelation, RelationError> {
    if r1.right != r2.left {
        return Err(RelationError::ModelMismatch);
    }
    let mut by_middle: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(y, z) in &r2.pairs {
        by_middle.entry(y).or_default().push(z);
    }
    let pairs = r1
        .pairs
        .iter()
        .flat_map(|&(x, y)| by_middle.get(&y).into_iter().flatten().map(move |&z| (x, z)))
        .collect();
    Ok(StateRelation {
        left: r1.left.clone(),
        right: r2.right.clone(),
        pairs,
    })
}

/// Outcome of a bisimulation or refinement check.
#[derive(Debug, Clone)]
pub struct RefinementCheck {
    pub holds: bool,
    /// The surviving pairs reachable from the two points.
    pub witness: Option<StateRelation>,
    /// True on the right-hand pointed model and false on the left-hand one.
    pub distinguisher: Option<Formula>,
}

#[derive(Debug, Clone)]
enum Reason {
    /// Atom disagreement; the flag is the truth value on the right.
    Atom(Prop, bool),
    /// Left b-successor with no surviving partner on the right.
    Forth(Agent, usize),
    /// Right b-successor with no surviving partner on the left.
    Back(Agent, usize),
}

struct Fixpoint<'a> {
    left: &'a Model,
    right: &'a Model,
    alive: Vec<bool>,
    reason: Vec<Option<Reason>>,
}

impl<'a> Fixpoint<'a> {
    fn idx(&self, s: usize, t: usize) -> usize {
        s * self.right.len() + t
    }

    fn alive(&self, s: usize, t: usize) -> bool {
        self.alive[self.idx(s, t)]
    }

    fn compute(left: &'a Model, right: &'a Model, except: Option<&Prop>, forth_exempt: &BTreeSet<Agent>) -> Self {
        let props: Vec<Prop> = left
            .props()
            .chain(right.props())
            .filter(|p| Some(*p) != except)
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let agents: Vec<Agent> = left
            .agents()
            .chain(right.agents())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = left.len() * right.len();
        let mut fp = Fixpoint {
            left,
            right,
            alive: vec![true; n],
            reason: vec![None; n],
        };
        for s in 0..left.len() {
            for t in 0..right.len() {
                if let Some(p) = props.iter().find(|p| left.holds(p, s) != right.holds(p, t)) {
                    let i = fp.idx(s, t);
                    fp.alive[i] = false;
                    fp.reason[i] = Some(Reason::Atom(p.clone(), right.holds(p, t)));
                }
            }
        }
        loop {
            let mut dead = Vec::new();
            for s in 0..left.len() {
                for t in 0..right.len() {
                    if !fp.alive(s, t) {
                        continue;
                    }
                    if let Some(r) = fp.violation(s, t, &agents, forth_exempt) {
                        dead.push((fp.idx(s, t), r));
                    }
                }
            }
            if dead.is_empty() {
                break;
            }
            for (i, r) in dead {
                fp.alive[i] = false;
                fp.reason[i] = Some(r);
            }
        }
        fp
    }

    fn violation(&self, s: usize, t: usize, agents: &[Agent], forth_exempt: &BTreeSet<Agent>) -> Option<Reason> {
        for b in agents {
            let ls = self.left.successors(b, s);
            let rs = self.right.successors(b, t);
            if let Some(&t2) = rs.iter().find(|&&t2| !ls.iter().any(|&s2| self.alive(s2, t2))) {
                return Some(Reason::Back(b.clone(), t2));
            }
            if forth_exempt.contains(b) {
                continue;
            }
            if let Some(&s2) = ls.iter().find(|&&s2| !rs.iter().any(|&t2| self.alive(s2, t2))) {
                return Some(Reason::Forth(b.clone(), s2));
            }
        }
        None
    }

    /// Surviving pairs reachable from `(s, t)` along same-agent successors.
    fn witness(&self, s: usize, t: usize) -> StateRelation {
        let agents: BTreeSet<&Agent> = self.left.agents().chain(self.right.agents()).collect();
        let mut pairs = BTreeSet::from([(s, t)]);
        let mut stack = vec![(s, t)];
        while let Some((x, y)) = stack.pop() {
            for a in &agents {
                for &x2 in self.left.successors(a, x) {
                    for &y2 in self.right.successors(a, y) {
                        if self.alive(x2, y2) && pairs.insert((x2, y2)) {
                            stack.push((x2, y2));
                        }
                    }
                }
            }
        }
        StateRelation {
            left: self.left.clone(),
            right: self.right.clone(),
            pairs,
        }
    }

    /// Formula true at right state `t` and false at left state `s`, for a
    /// deleted pair.
    fn distinguisher(&self, s: usize, t: usize, memo: &mut HashMap<(usize, usize), Formula>) -> Formula {
        if let Some(f) = memo.get(&(s, t)) {
            return f.clone();
        }
        let reason = self.reason[self.idx(s, t)].as_ref().expect("pair was deleted");
        let f = match reason {
            Reason::Atom(p, true) => Formula::Prop(p.clone()),
            Reason::Atom(p, false) => Formula::not(Formula::Prop(p.clone())),
            Reason::Back(b, t2) => {
                let parts: BTreeSet<Formula> = self
                    .left
                    .successors(b, s)
                    .iter()
                    .map(|&s2| self.distinguisher(s2, *t2, memo))
                    .collect();
                Formula::diamond(b.clone(), Formula::conj(parts))
            }
            Reason::Forth(b, s2) => {
                let parts: BTreeSet<Formula> = self
                    .right
                    .successors(b, t)
                    .iter()
                    .map(|&t2| self.distinguisher(*s2, t2, memo))
                    .collect();
                Formula::boxed(b.clone(), Formula::disj(parts))
            }
        };
        memo.insert((s, t), f.clone());
        f
    }

    fn report(&self, s: usize, t: usize) -> RefinementCheck {
        if self.alive(s, t) {
            RefinementCheck {
                holds: true,
                witness: Some(self.witness(s, t)),
                distinguisher: None,
            }
        } else {
            RefinementCheck {
                holds: false,
                witness: None,
                distinguisher: Some(self.distinguisher(s, t, &mut HashMap::new())),
            }
        }
    }
}

/// Decides `m ≃ n`, or `m ≃ n` up to `except` when given. On failure the
/// distinguisher holds at `n` and fails at `m`.
pub fn check_bisimulation(m: &PointedModel, n: &PointedModel, except: Option<&Prop>) -> RefinementCheck {
    Fixpoint::compute(&m.model, &n.model, except, &BTreeSet::new()).report(m.point, n.point)
}

/// Decides whether `n` is a `b`-refinement of `m`. On failure the
/// distinguisher holds at `n` and fails at `m`; for a single agent `a` it
/// uses no `[a]` and negates only atoms.
pub fn check_refinement(m: &PointedModel, n: &PointedModel, b: &BTreeSet<Agent>) -> RefinementCheck {
    Fixpoint::compute(&m.model, &n.model, None, b).report(m.point, n.point)
}

/// The fast path of [`check_refinement`]: the verdict only.
pub fn refines(m: &PointedModel, n: &PointedModel, b: &BTreeSet<Agent>) -> bool {
    Fixpoint::compute(&m.model, &n.model, None, b).alive(m.point, n.point)
}

pub fn bisimilar(m: &PointedModel, n: &PointedModel) -> bool {
    Fixpoint::compute(&m.model, &n.model, None, &BTreeSet::new()).alive(m.point, n.point)
}

/// Every pair `(s, t)` such that `t` in `n` is a `b`-refinement of `s` in
/// `m`.
pub fn greatest_refinement(m: &Model, n: &Model, b: &BTreeSet<Agent>) -> BTreeSet<(usize, usize)> {
    let fp = Fixpoint::compute(m, n, None, b);
    (0..m.len())
        .flat_map(|s| (0..n.len()).map(move |t| (s, t)))
        .filter(|&(s, t)| fp.alive(s, t))
        .collect()
}

/// A formula true at `s` and false at `t`.
pub fn distinguishing_formula(m: &Model, s: usize, t: usize) -> Result<Formula, RelationError> {
    let fp = Fixpoint::compute(m, m, None, &BTreeSet::new());
    if fp.alive(t, s) {
        return Err(RelationError::Bisimilar(m.name(s).into(), m.name(t).into()));
    }
    Ok(fp.distinguisher(t, s, &mut HashMap::new()))
}
