//! Finite multi-agent Kripke models.
//!
//! States are addressed by dense indices internally; the opaque string ids
//! from the input are kept for printing and serialization.

mod contract;
mod relation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Agent, Prop};

pub use contract::{bisimulation_classes, contract, generated};
pub use relation::{
    bisimilar, check_bisimulation, check_refinement, compose_refinements, distinguishing_formula,
    greatest_refinement, refines, RefinementCheck, RelationError, StateRelation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no states")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("invalid name `{0}`: expected letters, digits or underscores")]
    InvalidName(String),
    #[error("{context} refers to undeclared state `{id}`")]
    UndeclaredState { context: String, id: String },
    #[error("malformed model file: {0}")]
    Json(String),
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The on-disk shape of a pointed model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub states: Vec<String>,
    pub point: String,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
}

/// Checks every structural invariant of a model file, reporting the first
/// violation found.
pub fn validate(raw: &RawModel) -> Result<(), ModelError> {
    if raw.states.is_empty() {
        return Err(ModelError::NoStates);
    }
    let mut seen = BTreeSet::new();
    for s in &raw.states {
        if s.is_empty() {
            return Err(ModelError::InvalidName(s.clone()));
        }
        if !seen.insert(s.as_str()) {
            return Err(ModelError::DuplicateState(s.clone()));
        }
    }
    let undeclared = |context: String, id: &str| ModelError::UndeclaredState {
        context,
        id: id.to_string(),
    };
    if !seen.contains(raw.point.as_str()) {
        return Err(undeclared("point".into(), &raw.point));
    }
    for (p, members) in &raw.valuation {
        if !is_token(p) {
            return Err(ModelError::InvalidName(p.clone()));
        }
        if let Some(bad) = members.iter().find(|s| !seen.contains(s.as_str())) {
            return Err(undeclared(format!("valuation of {p}"), bad));
        }
    }
    for (a, pairs) in &raw.relations {
        if !is_token(a) {
            return Err(ModelError::InvalidName(a.clone()));
        }
        for (s, t) in pairs {
            for id in [s, t] {
                if !seen.contains(id.as_str()) {
                    return Err(undeclared(format!("relation {a}"), id));
                }
            }
        }
    }
    Ok(())
}

/// A finite Kripke model (S, R, V).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    relations: BTreeMap<Agent, Vec<Vec<usize>>>,
    valuation: BTreeMap<Prop, Vec<bool>>,
}

impl Model {
    /// A model with the given states, no agents and no propositions.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Model, ModelError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(ModelError::InvalidName(n.clone()));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(n.clone()));
            }
        }
        Ok(Model {
            names,
            index,
            relations: BTreeMap::new(),
            valuation: BTreeMap::new(),
        })
    }

    /// States named `0`, `1`, ... `n-1`.
    pub fn with_states(n: usize) -> Model {
        Model::new((0..n.max(1)).map(|i| i.to_string())).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.relations.keys()
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.valuation.keys()
    }

    pub fn add_agent(&mut self, a: &Agent) {
        let n = self.len();
        self.relations.entry(a.clone()).or_insert_with(|| vec![Vec::new(); n]);
    }

    pub fn add_prop(&mut self, p: &Prop) {
        let n = self.len();
        self.valuation.entry(p.clone()).or_insert_with(|| vec![false; n]);
    }

    pub fn add_edge(&mut self, a: &Agent, s: usize, t: usize) {
        assert!(s < self.len() && t < self.len(), "edge endpoint out of range");
        self.add_agent(a);
        let succ = &mut self.relations.get_mut(a).expect("agent added")[s];
        if let Err(at) = succ.binary_search(&t) {
            succ.insert(at, t);
        }
    }

    pub fn remove_edges_from(&mut self, a: &Agent, s: usize) {
        if let Some(rel) = self.relations.get_mut(a) {
            rel[s].clear();
        }
    }

    pub fn set_prop(&mut self, p: &Prop, s: usize, value: bool) {
        self.add_prop(p);
        self.valuation.get_mut(p).expect("prop added")[s] = value;
    }

    pub fn clear_valuation(&mut self) {
        self.valuation.clear();
    }

    /// Appends a fresh state; its name is `name` or, if taken, `name'`,
    /// `name''`, ...
    pub fn add_state(&mut self, name: &str) -> usize {
        let mut name = if name.is_empty() { "_".to_string() } else { name.to_string() };
        while self.index.contains_key(&name) {
            name.push('\'');
        }
        let id = self.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        for rel in self.relations.values_mut() {
            rel.push(Vec::new());
        }
        for ext in self.valuation.values_mut() {
            ext.push(false);
        }
        id
    }

    /// Sorted a-successors of `s`; empty for an agent the model does not know.
    pub fn successors(&self, a: &Agent, s: usize) -> &[usize] {
        match self.relations.get(a) {
            Some(rel) => &rel[s],
            None => &[],
        }
    }

    pub fn has_edge(&self, a: &Agent, s: usize, t: usize) -> bool {
        self.successors(a, s).binary_search(&t).is_ok()
    }

    /// Truth of `p` at `s`; false for a proposition the model does not know.
    pub fn holds(&self, p: &Prop, s: usize) -> bool {
        self.valuation.get(p).is_some_and(|ext| ext[s])
    }

    pub fn edge_count(&self) -> usize {
        self.relations.values().flat_map(|rel| rel.iter()).map(Vec::len).sum()
    }

    /// Copies every state, edge and valuation of `other` into `self`,
    /// returning the index of `other`'s state 0.
    pub fn absorb(&mut self, other: &Model) -> usize {
        let offset = self.len();
        for name in other.names() {
            self.add_state(name);
        }
        for (a, rel) in &other.relations {
            self.add_agent(a);
            for (s, succ) in rel.iter().enumerate() {
                for &t in succ {
                    self.add_edge(a, s + offset, t + offset);
                }
            }
        }
        for (p, ext) in &other.valuation {
            self.add_prop(p);
            for (s, &v) in ext.iter().enumerate() {
                if v {
                    self.set_prop(p, s + offset, true);
                }
            }
        }
        offset
    }

    /// Whether `s` here and `t` in `other` agree on every proposition known
    /// to either model, ignoring `except`.
    pub(crate) fn atoms_agree(&self, s: usize, other: &Model, t: usize, except: Option<&Prop>) -> bool {
        let props: BTreeSet<&Prop> = self.props().chain(other.props()).collect();
        props
            .into_iter()
            .filter(|p| Some(*p) != except)
            .all(|p| self.holds(p, s) == other.holds(p, t))
    }

    pub fn from_raw(raw: &RawModel) -> Result<PointedModel, ModelError> {
        validate(raw)?;
        let mut m = Model::new(raw.states.iter().cloned())?;
        for (p, members) in &raw.valuation {
            let p = Prop::new(p);
            m.add_prop(&p);
            for s in members {
                let s = m.state(s).expect("validated");
                m.set_prop(&p, s, true);
            }
        }
        for (a, pairs) in &raw.relations {
            let a = Agent::new(a);
            m.add_agent(&a);
            for (s, t) in pairs {
                let (s, t) = (m.state(s).expect("validated"), m.state(t).expect("validated"));
                m.add_edge(&a, s, t);
            }
        }
        let point = m.state(&raw.point).expect("validated");
        Ok(PointedModel { model: m, point })
    }

    pub fn to_raw(&self, point: usize) -> RawModel {
        RawModel {
            states: self.names.clone(),
            point: self.names[point].clone(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, ext)| {
                    let members = (0..self.len()).filter(|&s| ext[s]).map(|s| self.names[s].clone());
                    (p.name().to_string(), members.collect())
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|(a, rel)| {
                    let pairs = rel.iter().enumerate().flat_map(|(s, succ)| {
                        succ.iter().map(move |&t| (self.names[s].clone(), self.names[t].clone()))
                    });
                    (a.name().to_string(), pairs.collect())
                })
                .collect(),
        }
    }
}

/// A model with a designated state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: Model,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: Model, point: usize) -> PointedModel {
        assert!(point < model.len(), "point out of range");
        PointedModel { model, point }
    }

    pub fn point_name(&self) -> &str {
        self.model.name(self.point)
    }

    /// The same model pointed at another state.
    pub fn at(&self, point: usize) -> PointedModel {
        PointedModel::new(self.model.clone(), point)
    }

    pub fn from_json(text: &str) -> Result<PointedModel, ModelError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        Model::from_raw(&raw)
    }

    pub fn to_raw(&self) -> RawModel {
        self.model.to_raw(self.point)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("plain data")
    }

    /// Graphviz rendering; the point is drawn with a double circle.
    pub fn to_dot(&self) -> String {
        let m = &self.model;
        let mut out = String::from("digraph model {\n");
        for s in 0..m.len() {
            let true_props: Vec<&str> = m.props().filter(|p| m.holds(p, s)).map(Prop::name).collect();
            let shape = if s == self.point { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  \"{}\" [shape={shape}, label=\"{}\\n{}\"];",
                m.name(s),
                m.name(s),
                true_props.join(",")
            );
        }
        for a in m.agents() {
            for s in 0..m.len() {
                for &t in m.successors(a, s) {
                    let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{a}\"];", m.name(s), m.name(t));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
