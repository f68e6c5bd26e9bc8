//! Exhaustive enumeration of small pointed models, and sweeps over them.

use crate::kripke::{contract, generated, Model, PointedModel};
use crate::par::{self, Exec};
use crate::syntax::{Agent, Prop};

/// Every pointed model with 1..=`max_states` states over the given agents
/// and propositions, pointed at state `0`.
///
/// Any pointed model is isomorphic to one pointed at `0`, so nothing is lost
/// by fixing the point. Count for one agent and one proposition with three
/// states: 4 + 64 + 4096.
pub fn all_pointed_models(max_states: usize, agents: &[Agent], props: &[Prop]) -> Vec<PointedModel> {
    let mut out = Vec::new();
    for n in 1..=max_states {
        let edge_bits = n * n * agents.len();
        let val_bits = n * props.len();
        assert!(edge_bits + val_bits < 32, "model space too large to enumerate");
        for code in 0u64..(1u64 << (edge_bits + val_bits)) {
            let mut m = Model::with_states(n);
            agents.iter().for_each(|a| m.add_agent(a));
            props.iter().for_each(|p| m.add_prop(p));
            let mut bit = 0;
            for a in agents {
                for s in 0..n {
                    for t in 0..n {
                        if code >> bit & 1 == 1 {
                            m.add_edge(a, s, t);
                        }
                        bit += 1;
                    }
                }
            }
            for p in props {
                for s in 0..n {
                    if code >> bit & 1 == 1 {
                        m.set_prop(p, s, true);
                    }
                    bit += 1;
                }
            }
            out.push(PointedModel::new(m, 0));
        }
    }
    out
}

/// A string equal for two pointed models iff they are bisimilar.
///
/// Computed as the lexicographically least serialization of the contracted
/// generated submodel over all state orders that put the point first, so it
/// is only practical for small contracted models.
pub fn canonical_form(pm: &PointedModel) -> String {
    let c = contract(&generated(pm));
    let m = &c.model;
    let n = m.len();
    let others: Vec<usize> = (0..n).filter(|&s| s != c.point).collect();
    let mut best: Option<String> = None;
    permute(&mut others.clone(), 0, &mut |perm| {
        let order: Vec<usize> = std::iter::once(c.point).chain(perm.iter().copied()).collect();
        let mut pos = vec![0; n];
        for (i, &s) in order.iter().enumerate() {
            pos[s] = i;
        }
        let mut key = String::new();
        for p in m.props() {
            if (0..n).all(|s| !m.holds(p, s)) {
                continue;
            }
            key.push_str(p.name());
            key.push(':');
            for &s in &order {
                key.push(if m.holds(p, s) { '1' } else { '0' });
            }
            key.push(';');
        }
        for a in m.agents() {
            if (0..n).all(|s| m.successors(a, s).is_empty()) {
                continue;
            }
            key.push_str(a.name());
            key.push(':');
            for &s in &order {
                let mut succ: Vec<usize> = m.successors(a, s).iter().map(|&t| pos[t]).collect();
                succ.sort_unstable();
                key.push_str(&format!("{succ:?}"));
            }
            key.push(';');
        }
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    best.expect("at least one order")
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// One representative per bisimulation class, in order of first
/// appearance, together with the class index of every input.
pub fn representatives(exec: Exec, models: &[PointedModel]) -> (Vec<PointedModel>, Vec<usize>) {
    let keys = par::map(exec, models, canonical_form);
    let mut index = std::collections::HashMap::new();
    let mut reps = Vec::new();
    let class = keys
        .into_iter()
        .zip(models)
        .map(|(k, pm)| {
            *index.entry(k).or_insert_with(|| {
                reps.push(pm.clone());
                reps.len() - 1
            })
        })
        .collect();
    (reps, class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::check_bisimulation;

    #[test]
    fn counts() {
        let a = [Agent::new("a")];
        let p = [Prop::new("p")];
        assert_eq!(all_pointed_models(3, &a, &p).len(), 4 + 64 + 4096);
        assert_eq!(all_pointed_models(2, &[Agent::new("a"), Agent::new("b")], &[]).len(), 2 * 2 + 256);
    }

    #[test]
    fn canonical_form_decides_bisimilarity() {
        let a = [Agent::new("a")];
        let p = [Prop::new("p")];
        let models = all_pointed_models(2, &a, &p);
        for x in &models {
            for y in &models {
                let same = canonical_form(x) == canonical_form(y);
                assert_eq!(same, check_bisimulation(x, y, None).holds);
            }
        }
        let (reps, class) = representatives(Exec::Parallel, &models);
        assert_eq!(class.len(), models.len());
        assert!(reps.len() < models.len());
    }
}
