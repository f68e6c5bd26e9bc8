//! Satisfiability and validity: a tableau for multi-agent K, lifted to the
//! full language through reduction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::kripke::{contract, Model, PointedModel};
use crate::reduction::{default_budget, reduce_formula, ReduceError};
use crate::syntax::{Agent, Formula, Prop};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable(PointedModel),
    Unsatisfiable,
}

impl Verdict {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, Verdict::Satisfiable(_))
    }

    pub fn model(&self) -> Option<&PointedModel> {
        match self {
            Verdict::Satisfiable(m) => Some(m),
            Verdict::Unsatisfiable => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::Satisfiable(m) => serde_json::json!({"status": "satisfiable", "model": m.to_json()}),
            Verdict::Unsatisfiable => serde_json::json!({"status": "unsatisfiable", "model": null}),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid { countermodel: PointedModel },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }

    pub fn countermodel(&self) -> Option<&PointedModel> {
        match self {
            Validity::Valid => None,
            Validity::Invalid { countermodel } => Some(countermodel),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Validity::Valid => serde_json::json!({"status": "valid", "model": null}),
            Validity::Invalid { countermodel } => {
                serde_json::json!({"status": "invalid", "model": countermodel.to_json()})
            }
        }
    }
}

/// An open branch, as a tree.
#[derive(Debug, Clone)]
struct Tree {
    true_props: BTreeSet<Prop>,
    children: Vec<(Agent, Tree)>,
}

type Label = BTreeSet<Formula>;

struct Tableau {
    memo: HashMap<Label, Option<Tree>>,
}

impl Tableau {
    /// Expands conjunctions and covers, leaving literals, boxes, diamonds
    /// and disjunctions. Returns `None` on a clash.
    fn saturate(label: Label) -> Option<Label> {
        let mut done = Label::new();
        let mut todo: Vec<Formula> = label.into_iter().collect();
        while let Some(f) = todo.pop() {
            match &f {
                Formula::Top => {}
                Formula::Bottom => return None,
                Formula::And(l, r) => {
                    todo.push((**l).clone());
                    todo.push((**r).clone());
                }
                Formula::Cover(a, fs) => {
                    todo.push(Formula::boxed(a.clone(), Formula::disj(fs.iter().cloned())));
                    todo.extend(fs.iter().map(|m| Formula::diamond(a.clone(), m.clone())));
                }
                Formula::Prop(_) | Formula::Not(_) => {
                    let neg = match &f {
                        Formula::Not(g) => (**g).clone(),
                        _ => Formula::not(f.clone()),
                    };
                    if done.contains(&neg) {
                        return None;
                    }
                    done.insert(f);
                }
                _ => {
                    done.insert(f);
                }
            }
        }
        Some(done)
    }

    fn sat(&mut self, label: Label) -> Option<Tree> {
        if let Some(r) = self.memo.get(&label) {
            return r.clone();
        }
        let result = self.expand(&label);
        self.memo.insert(label, result.clone());
        result
    }

    fn expand(&mut self, label: &Label) -> Option<Tree> {
        let label = Self::saturate(label.clone())?;
        if let Some(or) = label.iter().find(|f| matches!(f, Formula::Or(..))).cloned() {
            let Formula::Or(l, r) = &or else { unreachable!() };
            for branch in [l, r] {
                let mut next = label.clone();
                next.remove(&or);
                next.insert((**branch).clone());
                if let Some(t) = self.sat(next) {
                    return Some(t);
                }
            }
            return None;
        }
        let mut boxes: BTreeMap<&Agent, Vec<&Formula>> = BTreeMap::new();
        for f in &label {
            if let Formula::Box(a, g) = f {
                boxes.entry(a).or_default().push(g);
            }
        }
        let mut children = Vec::new();
        for f in &label {
            if let Formula::Diamond(a, g) = f {
                let mut succ: Label = boxes.get(a).into_iter().flatten().map(|g| (*g).clone()).collect();
                succ.insert((**g).clone());
                children.push((a.clone(), self.sat(succ)?));
            }
        }
        let true_props = label
            .iter()
            .filter_map(|f| match f {
                Formula::Prop(p) => Some(p.clone()),
                _ => None,
            })
            .collect();
        Some(Tree { true_props, children })
    }
}

fn tree_model(tree: &Tree, agents: &BTreeSet<Agent>, props: &BTreeSet<Prop>) -> PointedModel {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    fn walk<'t>(t: &'t Tree, nodes: &mut Vec<&'t Tree>, edges: &mut Vec<(Agent, usize, usize)>) -> usize {
        let id = nodes.len();
        nodes.push(t);
        for (a, c) in &t.children {
            let cid = walk(c, nodes, edges);
            edges.push((a.clone(), id, cid));
        }
        id
    }
    walk(tree, &mut nodes, &mut edges);
    let mut m = Model::new((0..nodes.len()).map(|i| format!("w{i}"))).expect("at least the root");
    agents.iter().for_each(|a| m.add_agent(a));
    for p in props {
        m.add_prop(p);
        for (i, t) in nodes.iter().enumerate() {
            m.set_prop(p, i, t.true_props.contains(p));
        }
    }
    for (a, s, t) in edges {
        m.add_edge(&a, s, t);
    }
    PointedModel::new(m, 0)
}

/// Decides satisfiability of a refinement-free formula in K. A satisfying
/// model is contracted before it is returned.
///
/// # Panics
///
/// If `f` contains a refinement quantifier.
pub fn k_satisfiable(f: &Formula) -> Verdict {
    assert!(f.is_refinement_free(), "k_satisfiable needs a refinement-free formula");
    let nnf = f.to_nnf();
    let mut tableau = Tableau { memo: HashMap::new() };
    match tableau.sat(Label::from([nnf])) {
        Some(tree) => Verdict::Satisfiable(contract(&tree_model(&tree, &f.agents(), &f.props()))),
        None => Verdict::Unsatisfiable,
    }
}

pub fn rml_satisfiable(f: &Formula) -> Result<Verdict, ReduceError> {
    rml_satisfiable_with_budget(f, default_budget())
}

pub fn rml_satisfiable_with_budget(f: &Formula, budget: usize) -> Result<Verdict, ReduceError> {
    Ok(k_satisfiable(&reduce_formula(f, budget)?))
}

/// Valid iff the reduced negation is unsatisfiable; otherwise the model of
/// the reduced negation is a countermodel.
pub fn rml_valid(f: &Formula) -> Result<Validity, ReduceError> {
    rml_valid_with_budget(f, default_budget())
}

pub fn rml_valid_with_budget(f: &Formula, budget: usize) -> Result<Validity, ReduceError> {
    Ok(match rml_satisfiable_with_budget(&Formula::not(f.clone()), budget)? {
        Verdict::Unsatisfiable => Validity::Valid,
        Verdict::Satisfiable(countermodel) => Validity::Invalid { countermodel },
    })
}

pub fn rml_equivalent(f: &Formula, g: &Formula) -> Result<Validity, ReduceError> {
    rml_valid(&Formula::iff(f.clone(), g.clone()))
}

pub fn rml_equivalent_with_budget(f: &Formula, g: &Formula, budget: usize) -> Result<Validity, ReduceError> {
    rml_valid_with_budget(&Formula::iff(f.clone(), g.clone()), budget)
}
