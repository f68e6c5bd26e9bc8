//! Bounded a-refinements by unravelling and pruning.
//!
//! The pointed model is unravelled into a tree of the given depth in which
//! every edge is copied `dup` times; the leaves point back into the original
//! model. Every subset of the a-arrows leaving tree nodes is then a candidate
//! refinement. The stream is sound (every member is an a-refinement) but not
//! complete for any fixed bound.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kripke::{contract, generated, Model, PointedModel};
use crate::kripke::check_bisimulation;
use crate::syntax::Agent;

/// Hard ceiling on prunable arrows; 2^k candidates are scanned.
const MAX_ARROWS: usize = 24;
const MAX_TREE_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("dup must be at least 1")]
    ZeroDup,
    #[error("unravelling has {0} prunable arrows, more than the cap of {MAX_ARROWS}")]
    TooManyArrows(usize),
    #[error("unravelling exceeds {MAX_TREE_NODES} nodes")]
    TooManyNodes,
}

/// Lazily yields pairwise non-bisimilar a-refinements.
pub struct RefinementStream {
    base: Model,
    root: usize,
    agent: Agent,
    prunable: Vec<(usize, usize)>,
    next_mask: Option<u64>,
    seen: Vec<PointedModel>,
    remaining: usize,
}

impl RefinementStream {
    pub fn prunable_arrows(&self) -> usize {
        self.prunable.len()
    }
}

impl Iterator for RefinementStream {
    type Item = PointedModel;

    fn next(&mut self) -> Option<PointedModel> {
        while self.remaining > 0 {
            let mask = self.next_mask?;
            self.next_mask = mask.checked_sub(1);
            let mut m = self.base.clone();
            for (i, &(s, t)) in self.prunable.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    m.add_edge(&self.agent, s, t);
                }
            }
            let candidate = contract(&generated(&PointedModel::new(m, self.root)));
            if self.seen.iter().any(|old| {
                old.model.len() == candidate.model.len() && check_bisimulation(old, &candidate, None).holds
            }) {
                continue;
            }
            self.seen.push(candidate.clone());
            self.remaining -= 1;
            return Some(candidate);
        }
        None
    }
}

/// Stream of at most `max` a-refinements of `pm`, starting with the full
/// unravelling.
pub fn enumerate_refinements(
    pm: &PointedModel,
    a: &Agent,
    depth: usize,
    dup: usize,
    max: usize,
) -> Result<RefinementStream, EnumerateError> {
    if dup == 0 {
        return Err(EnumerateError::ZeroDup);
    }
    let orig = &pm.model;
    let mut base = orig.clone();
    base.add_agent(a);
    let agents: BTreeSet<Agent> = base.agents().cloned().collect();
    let mut prunable = Vec::new();
    let copy = |base: &mut Model, s: usize| {
        let id = base.add_state(&format!("{}~", orig.name(s)));
        for p in orig.props() {
            base.set_prop(p, id, orig.holds(p, s));
        }
        id
    };
    let root = copy(&mut base, pm.point);
    let mut frontier = vec![(root, pm.point)];
    let mut nodes = 1;
    for level in 0..=depth {
        let mut next = Vec::new();
        for &(node, s) in &frontier {
            for b in &agents {
                for &t in orig.successors(b, s) {
                    let targets: Vec<usize> = if level == depth {
                        vec![t]
                    } else {
                        (0..dup)
                            .map(|_| {
                                nodes += 1;
                                let c = copy(&mut base, t);
                                next.push((c, t));
                                c
                            })
                            .collect()
                    };
                    if nodes > MAX_TREE_NODES {
                        return Err(EnumerateError::TooManyNodes);
                    }
                    for target in targets {
                        if b == a {
                            prunable.push((node, target));
                        } else {
                            base.add_edge(b, node, target);
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    if prunable.len() > MAX_ARROWS {
        return Err(EnumerateError::TooManyArrows(prunable.len()));
    }
    Ok(RefinementStream {
        base,
        root,
        agent: a.clone(),
        next_mask: Some((1u64 << prunable.len()) - 1),
        prunable,
        seen: Vec::new(),
        remaining: max,
    })
}
