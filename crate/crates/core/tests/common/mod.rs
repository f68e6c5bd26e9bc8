//! Generators and independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rmlkit::kripke::{Model, PointedModel};
use rmlkit::syntax::{Agent, Formula, Prop};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data(name: &str) -> PointedModel {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    PointedModel::from_json(&text).unwrap()
}

pub fn data_text(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

pub fn agents(names: &[&str]) -> Vec<Agent> {
    names.iter().map(|n| Agent::new(n)).collect()
}

pub fn props(names: &[&str]) -> Vec<Prop> {
    names.iter().map(|n| Prop::new(n)).collect()
}

pub fn set(agents: &[Agent]) -> BTreeSet<Agent> {
    agents.iter().cloned().collect()
}

/// Uniform-ish random model; every agent and prop is declared even if empty.
pub fn random_model(rng: &mut impl Rng, max_states: usize, agents: &[Agent], props: &[Prop], density: f64) -> PointedModel {
    let n = rng.gen_range(1..=max_states);
    let mut m = Model::with_states(n);
    for a in agents {
        m.add_agent(a);
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(density) {
                    m.add_edge(a, s, t);
                }
            }
        }
    }
    for p in props {
        m.add_prop(p);
        for s in 0..n {
            m.set_prop(p, s, rng.gen_bool(0.5));
        }
    }
    let point = rng.gen_range(0..n);
    PointedModel::new(m, point)
}

/// Random formula of bounded modal depth. `quantifiers` allows A_a / E_a.
pub fn random_formula(rng: &mut impl Rng, depth: usize, size: usize, agents: &[Agent], props: &[Prop], quantifiers: bool) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..8) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::Prop(props.choose(rng).unwrap().clone()),
        };
    }
    let a = agents.choose(rng).unwrap().clone();
    let kinds = if quantifiers { 9 } else { 7 };
    let k = rng.gen_range(0..kinds);
    let modal = depth > 0;
    match k {
        0 => Formula::not(random_formula(rng, depth, size - 1, agents, props, quantifiers)),
        1 | 2 | 3 => {
            let l = rng.gen_range(1..size.max(2));
            let left = random_formula(rng, depth, l, agents, props, quantifiers);
            let right = random_formula(rng, depth, (size - l).max(1), agents, props, quantifiers);
            match k {
                1 => Formula::and(left, right),
                2 => Formula::or(left, right),
                _ => Formula::implies(left, right),
            }
        }
        4 if modal => Formula::boxed(a, random_formula(rng, depth - 1, size - 1, agents, props, quantifiers)),
        5 if modal => Formula::diamond(a, random_formula(rng, depth - 1, size - 1, agents, props, quantifiers)),
        6 if modal => {
            let n = rng.gen_range(0..=2);
            let members = (0..n).map(|_| random_formula(rng, depth - 1, (size - 1) / 2 + 1, agents, props, quantifiers));
            Formula::cover(a, members.collect::<Vec<_>>())
        }
        7 => Formula::some_ref(a, random_formula(rng, depth, size - 1, agents, props, quantifiers)),
        8 => Formula::all_ref(a, random_formula(rng, depth, size - 1, agents, props, quantifiers)),
        _ => Formula::not(random_formula(rng, depth, size - 1, agents, props, quantifiers)),
    }
}

/// Random a-positive formula: negation on atoms only, no box (or cover) for `a`.
pub fn random_a_positive(rng: &mut impl Rng, depth: usize, a: &Agent, agents: &[Agent], props: &[Prop]) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| {
        let p = Formula::Prop(props[rng.gen_range(0..props.len())].clone());
        match rng.gen_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            2 | 3 => Formula::not(p),
            _ => p,
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let b = agents.choose(rng).unwrap().clone();
    match rng.gen_range(0..5) {
        0 => Formula::and(
            random_a_positive(rng, depth, a, agents, props),
            random_a_positive(rng, depth - 1, a, agents, props),
        ),
        1 => Formula::or(
            random_a_positive(rng, depth, a, agents, props),
            random_a_positive(rng, depth - 1, a, agents, props),
        ),
        2 if b != *a => Formula::boxed(b, random_a_positive(rng, depth - 1, a, agents, props)),
        _ => Formula::diamond(b, random_a_positive(rng, depth - 1, a, agents, props)),
    }
}

/// Straight recursive evaluation without memoization; the reference for
/// the labelling model checker.
pub fn naive_eval(m: &Model, s: usize, f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Prop(p) => m.holds(p, s),
        Formula::Not(g) => !naive_eval(m, s, g),
        Formula::And(l, r) => naive_eval(m, s, l) && naive_eval(m, s, r),
        Formula::Or(l, r) => naive_eval(m, s, l) || naive_eval(m, s, r),
        Formula::Implies(l, r) => !naive_eval(m, s, l) || naive_eval(m, s, r),
        Formula::Iff(l, r) => naive_eval(m, s, l) == naive_eval(m, s, r),
        Formula::Box(a, g) => m.successors(a, s).iter().all(|&t| naive_eval(m, t, g)),
        Formula::Diamond(a, g) => m.successors(a, s).iter().any(|&t| naive_eval(m, t, g)),
        Formula::Cover(a, fs) => {
            let succ = m.successors(a, s);
            succ.iter().all(|&t| fs.iter().any(|g| naive_eval(m, t, g)))
                && fs.iter().all(|g| succ.iter().any(|&t| naive_eval(m, t, g)))
        }
        Formula::AllRef(..) | Formula::SomeRef(..) => panic!("naive_eval is for refinement-free formulas"),
    }
}

/// Every formula with exactly `size` nodes over `p`, `~`, `&`, `[a]`, `A_a`.
pub fn primitive_formulas(size: usize, a: &Agent, p: &Prop) -> Vec<Formula> {
    let mut table: Vec<Vec<Formula>> = vec![Vec::new(), vec![Formula::Prop(p.clone())]];
    for n in 2..=size {
        let mut out = Vec::new();
        for g in &table[n - 1] {
            out.push(Formula::not(g.clone()));
            out.push(Formula::boxed(a.clone(), g.clone()));
            out.push(Formula::all_ref(a.clone(), g.clone()));
        }
        for l in 1..n - 1 {
            for x in &table[l] {
                for y in &table[n - 1 - l] {
                    out.push(Formula::and(x.clone(), y.clone()));
                }
            }
        }
        table.push(out);
    }
    table.swap_remove(size)
}

// proptest strategies

pub fn arb_formula(agents: Vec<&'static str>, props: Vec<&'static str>, quantifiers: bool) -> impl Strategy<Value = Formula> {
    let atoms = props.clone();
    let leaf = prop_oneof![
        1 => Just(Formula::Top),
        1 => Just(Formula::Bottom),
        6 => proptest::sample::select(atoms).prop_map(Formula::prop),
    ];
    leaf.prop_recursive(4, 24, 3, move |inner| {
        let ag = proptest::sample::select(agents.clone());
        let mut options: Vec<BoxedStrategy<Formula>> = vec![
            inner.clone().prop_map(Formula::not).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)).boxed(),
            (ag.clone(), inner.clone()).prop_map(|(a, g)| Formula::boxed(a, g)).boxed(),
            (ag.clone(), inner.clone()).prop_map(|(a, g)| Formula::diamond(a, g)).boxed(),
            (ag.clone(), proptest::collection::vec(inner.clone(), 0..3))
                .prop_map(|(a, fs)| Formula::cover(a, fs))
                .boxed(),
        ];
        if quantifiers {
            options.push((ag.clone(), inner.clone()).prop_map(|(a, g)| Formula::some_ref(a, g)).boxed());
            options.push((ag, inner).prop_map(|(a, g)| Formula::all_ref(a, g)).boxed());
        }
        proptest::strategy::Union::new(options)
    })
}

pub fn arb_model(max_states: usize, agents: Vec<&'static str>, props: Vec<&'static str>) -> impl Strategy<Value = PointedModel> {
    (1..=max_states).prop_flat_map(move |n| {
        let edges = proptest::collection::vec(proptest::bool::weighted(0.35), n * n * agents.len());
        let vals = proptest::collection::vec(any::<bool>(), n * props.len());
        let (agents, props) = (agents.clone(), props.clone());
        (edges, vals, 0..n).prop_map(move |(edges, vals, point)| {
            let mut m = Model::with_states(n);
            let mut bits = edges.into_iter();
            for a in &agents {
                let a = Agent::new(a);
                m.add_agent(&a);
                for s in 0..n {
                    for t in 0..n {
                        if bits.next().unwrap() {
                            m.add_edge(&a, s, t);
                        }
                    }
                }
            }
            let mut vals = vals.into_iter();
            for p in &props {
                let p = Prop::new(p);
                m.add_prop(&p);
                for s in 0..n {
                    m.set_prop(&p, s, vals.next().unwrap());
                }
            }
            PointedModel::new(m, point)
        })
    })
}
