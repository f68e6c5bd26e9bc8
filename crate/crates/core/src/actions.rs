//! Action models: execution by restricted product, and synthesis of an
//! action realizing a given refinement.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{
    bisimulation_classes, check_refinement, contract, distinguishing_formula, generated, greatest_refinement, Model,
    ModelError, PointedModel, RawModel, RefinementCheck, StateRelation,
};
use crate::modelcheck::{extension, EvalError};
use crate::syntax::{parse, Agent, Formula, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("precondition of `{point}`: {error}")]
    Parse { point: String, error: ParseError },
    #[error("point `{0}` has no precondition")]
    MissingPre(String),
    #[error("precondition of `{0}` mentions an undeclared point")]
    UnknownPre(String),
    #[error("precondition of `{0}` contains a refinement quantifier")]
    QuantifiedPre(String),
    #[error("the action is not executable at the point")]
    NotExecutable,
    #[error("the target is not a refinement of the source")]
    NotARefinement,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The on-disk shape of a pointed action model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAction {
    pub states: Vec<String>,
    pub point: String,
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
}

/// Action points and arrows, with a refinement-free precondition per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionModel {
    /// Points and relations; the valuation is unused.
    pub frame: Model,
    pub pre: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedActionModel {
    pub action: ActionModel,
    pub point: usize,
}

impl PointedActionModel {
    pub fn from_raw(raw: &RawAction) -> Result<PointedActionModel, ActionError> {
        let frame = Model::from_raw(&RawModel {
            states: raw.states.clone(),
            point: raw.point.clone(),
            valuation: BTreeMap::new(),
            relations: raw.relations.clone(),
        })?;
        if let Some(extra) = raw.pre.keys().find(|k| frame.model.state(k).is_none()) {
            return Err(ActionError::UnknownPre(extra.clone()));
        }
        let mut pre = Vec::with_capacity(raw.states.len());
        for e in &raw.states {
            let text = raw.pre.get(e).ok_or_else(|| ActionError::MissingPre(e.clone()))?;
            let f = parse(text).map_err(|error| ActionError::Parse {
                point: e.clone(),
                error,
            })?;
            if !f.is_refinement_free() {
                return Err(ActionError::QuantifiedPre(e.clone()));
            }
            pre.push(f);
        }
        Ok(PointedActionModel {
            action: ActionModel {
                frame: frame.model,
                pre,
            },
            point: frame.point,
        })
    }

    pub fn from_json(text: &str) -> Result<PointedActionModel, ActionError> {
        let raw: RawAction =
            serde_json::from_str(text).map_err(|e| ActionError::Model(ModelError::Json(e.to_string())))?;
        PointedActionModel::from_raw(&raw)
    }

    pub fn to_raw(&self) -> RawAction {
        let frame = self.action.frame.to_raw(self.point);
        RawAction {
            pre: frame
                .states
                .iter()
                .zip(&self.action.pre)
                .map(|(e, f)| (e.clone(), f.to_string()))
                .collect(),
            states: frame.states,
            point: frame.point,
            relations: frame.relations,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("plain data")
    }

    /// The action that changes nothing: one point, precondition `top`, a
    /// loop for every agent.
    pub fn trivial(agents: impl IntoIterator<Item = Agent>) -> PointedActionModel {
        let mut frame = Model::new(["e"]).expect("one point");
        for a in agents {
            frame.add_edge(&a, 0, 0);
        }
        PointedActionModel {
            action: ActionModel {
                frame,
                pre: vec![Formula::Top],
            },
            point: 0,
        }
    }
}

/// The restricted product together with the first projection of each
/// product state.
struct Product {
    model: Model,
    pairs: Vec<(usize, usize)>,
    point: Option<usize>,
}

fn build_product(pm: &PointedModel, pa: &PointedActionModel) -> Result<Product, EvalError> {
    let m = &pm.model;
    let act = &pa.action;
    let exts = act
        .pre
        .iter()
        .map(|f| extension(m, f))
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..m.len())
        .flat_map(|s| (0..act.frame.len()).map(move |e| (s, e)))
        .filter(|&(s, e)| exts[e][s])
        .collect();
    let index: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let names: Vec<String> = pairs
        .iter()
        .map(|&(s, e)| format!("({},{})", m.name(s), act.frame.name(e)))
        .collect();
    let mut out = if names.is_empty() {
        Model::with_states(1)
    } else {
        Model::new(names).expect("pairs are distinct")
    };
    for p in m.props() {
        out.add_prop(p);
        for (i, &(s, _)) in pairs.iter().enumerate() {
            out.set_prop(p, i, m.holds(p, s));
        }
    }
    let agents: BTreeSet<&Agent> = m.agents().chain(act.frame.agents()).collect();
    for a in agents {
        out.add_agent(a);
        for (i, &(s, e)) in pairs.iter().enumerate() {
            for &t in m.successors(a, s) {
                for &f in act.frame.successors(a, e) {
                    if let Some(&j) = index.get(&(t, f)) {
                        out.add_edge(a, i, j);
                    }
                }
            }
        }
    }
    let point = index.get(&(pm.point, pa.point)).copied();
    Ok(Product {
        model: out,
        pairs,
        point,
    })
}

/// Executes the action; `None` when its precondition fails at the point.
pub fn product(pm: &PointedModel, pa: &PointedActionModel) -> Result<Option<PointedModel>, EvalError> {
    let p = build_product(pm, pa)?;
    Ok(p.point.map(|point| PointedModel::new(p.model, point)))
}

/// Checks that the product refines the model for every agent, reporting the
/// projection `(s, (s, e))` as the witness.
pub fn verify_product_is_refinement(pm: &PointedModel, pa: &PointedActionModel) -> Result<RefinementCheck, ActionError> {
    let p = build_product(pm, pa)?;
    let point = p.point.ok_or(ActionError::NotExecutable)?;
    let product = PointedModel::new(p.model, point);
    let agents: BTreeSet<Agent> = pm.model.agents().chain(pa.action.frame.agents()).cloned().collect();
    let check = check_refinement(pm, &product, &agents);
    let projection = StateRelation {
        left: pm.model.clone(),
        right: product.model.clone(),
        pairs: p.pairs.iter().enumerate().map(|(i, &(s, _))| (s, i)).collect(),
    };
    let holds = check.holds && projection.is_refinement(&agents);
    Ok(RefinementCheck {
        holds,
        witness: holds.then_some(projection),
        distinguisher: check.distinguisher,
    })
}

/// An action whose execution on `pm` yields a model bisimilar to `target`.
///
/// Action points are the states of the contracted target. The precondition
/// of a point is satisfied exactly by the source states it refines, up to
/// bisimilarity.
pub fn synthesize_action(pm: &PointedModel, target: &PointedModel) -> Result<PointedActionModel, ActionError> {
    let agents: BTreeSet<Agent> = pm.model.agents().chain(target.model.agents()).cloned().collect();
    if !check_refinement(pm, target, &agents).holds {
        return Err(ActionError::NotARefinement);
    }
    let n = contract(&generated(target));
    let m = &pm.model;
    let class = bisimulation_classes(m);
    let classes = class.iter().max().map_or(0, |c| c + 1);
    let mut rep = vec![usize::MAX; classes];
    for (s, &c) in class.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = s;
        }
    }
    let characteristic: Vec<Formula> = (0..classes)
        .map(|c| {
            Formula::conj(
                (0..classes)
                    .filter(|&d| d != c)
                    .map(|d| distinguishing_formula(m, rep[c], rep[d]).expect("distinct classes")),
            )
        })
        .collect();
    let related = greatest_refinement(m, &n.model, &agents);
    let pre = (0..n.model.len())
        .map(|u| {
            let cs: BTreeSet<usize> = (0..m.len()).filter(|&s| related.contains(&(s, u))).map(|s| class[s]).collect();
            Formula::disj(cs.into_iter().map(|c| characteristic[c].clone()))
        })
        .collect();
    let mut frame = n.model.clone();
    frame.clear_valuation();
    Ok(PointedActionModel {
        action: ActionModel { frame, pre },
        point: n.point,
    })
}
