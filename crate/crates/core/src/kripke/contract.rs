use std::collections::{BTreeMap, BTreeSet};

use super::{Model, PointedModel};
use crate::syntax::{Agent, Prop};

/// Class index of every state under the greatest auto-bisimulation.
///
/// Classes are numbered in order of their first member, so the labelling is
/// canonical for a given state order.
pub fn bisimulation_classes(m: &Model) -> Vec<usize> {
    let agents: Vec<&Agent> = m.agents().collect();
    let props: Vec<&Prop> = m.props().collect();
    let mut block = renumber(
        (0..m.len())
            .map(|s| props.iter().map(|p| m.holds(p, s)).collect::<Vec<bool>>())
            .collect(),
    );
    loop {
        let signatures: Vec<(usize, Vec<BTreeSet<usize>>)> = (0..m.len())
            .map(|s| {
                let succ = agents
                    .iter()
                    .map(|a| m.successors(a, s).iter().map(|&t| block[t]).collect())
                    .collect();
                (block[s], succ)
            })
            .collect();
        let next = renumber(signatures);
        let stable = count(&next) == count(&block);
        block = next;
        if stable {
            return block;
        }
    }
}

fn count(block: &[usize]) -> usize {
    block.iter().max().map_or(0, |m| m + 1)
}

fn renumber<K: Ord>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: BTreeMap<&K, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(keys.len());
    for k in &keys {
        let next = ids.len();
        out.push(*ids.entry(k).or_insert(next));
    }
    out
}

/// Quotient by the greatest auto-bisimulation. Each class is named after its
/// first member.
pub fn contract(pm: &PointedModel) -> PointedModel {
    let m = &pm.model;
    let block = bisimulation_classes(m);
    let n = count(&block);
    let mut rep = vec![usize::MAX; n];
    for (s, &b) in block.iter().enumerate() {
        if rep[b] == usize::MAX {
            rep[b] = s;
        }
    }
    let mut q = Model::new(rep.iter().map(|&s| m.name(s).to_string())).expect("representatives are distinct");
    for p in m.props() {
        q.add_prop(p);
        for (b, &s) in rep.iter().enumerate() {
            q.set_prop(p, b, m.holds(p, s));
        }
    }
    for a in m.agents() {
        q.add_agent(a);
        for (b, &s) in rep.iter().enumerate() {
            for &t in m.successors(a, s) {
                q.add_edge(a, b, block[t]);
            }
        }
    }
    PointedModel::new(q, block[pm.point])
}

/// The submodel generated by the point: every state reachable through any
/// agent's relation.
pub fn generated(pm: &PointedModel) -> PointedModel {
    let m = &pm.model;
    let agents: Vec<&Agent> = m.agents().collect();
    let mut keep = vec![false; m.len()];
    let mut order = vec![pm.point];
    keep[pm.point] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        for a in &agents {
            for &t in m.successors(a, s) {
                if !keep[t] {
                    keep[t] = true;
                    order.push(t);
                }
            }
        }
    }
    order.sort_unstable();
    let mut new_id = vec![usize::MAX; m.len()];
    for (i, &s) in order.iter().enumerate() {
        new_id[s] = i;
    }
    let mut g = Model::new(order.iter().map(|&s| m.name(s).to_string())).expect("subset of distinct names");
    for p in m.props() {
        g.add_prop(p);
        for (i, &s) in order.iter().enumerate() {
            g.set_prop(p, i, m.holds(p, s));
        }
    }
    for a in m.agents() {
        g.add_agent(a);
        for (i, &s) in order.iter().enumerate() {
            for &t in m.successors(a, s) {
                g.add_edge(a, i, new_id[t]);
            }
        }
    }
    PointedModel::new(g, new_id[pm.point])
}
