mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use rmlkit::actions::{product, synthesize_action, verify_product_is_refinement, ActionError, PointedActionModel};
use rmlkit::kripke::{check_bisimulation, check_refinement, Model};
use rmlkit::modelcheck::evaluate;
use rmlkit::syntax::Agent;

fn announcement() -> PointedActionModel {
    PointedActionModel::from_json(&data_text("fig3_action.json")).unwrap()
}

#[test]
fn announcement_product() {
    let left = data("fig2_left.json");
    let right = data("fig2_right.json");
    let out = product(&left, &announcement()).unwrap().unwrap();
    assert!(check_bisimulation(&out, &right, None).holds);
    // State names follow the (state,event) convention.
    let names: BTreeSet<&str> = out.model.names().iter().map(String::as_str).collect();
    assert_eq!(names, BTreeSet::from(["(0,t)", "(1,t)", "(1,p)"]));
    assert_eq!(out.point_name(), "(1,p)");
    let check = verify_product_is_refinement(&left, &announcement()).unwrap();
    assert!(check.holds);
    assert!(check.witness.unwrap().is_refinement(&set(&agents(&["a", "b"]))));
}

#[test]
fn synthesis_examples() {
    let left = data("fig2_left.json");
    let right = data("fig2_right.json");
    let act = synthesize_action(&left, &right).unwrap();
    let out = product(&left, &act).unwrap().unwrap();
    assert!(check_bisimulation(&out, &right, None).holds);
    // The synthesized action executes like the stored one.
    let stored = product(&left, &announcement()).unwrap().unwrap();
    assert!(check_bisimulation(&out, &stored, None).holds);

    let m = data("fig1_M.json");
    let n = data("fig1_N.json");
    let act = synthesize_action(&m, &n).unwrap();
    assert!(check_bisimulation(&product(&m, &act).unwrap().unwrap(), &n, None).holds);

    let same = synthesize_action(&left, &left).unwrap();
    assert_eq!(same.action.frame.len(), 2);
    assert!(check_bisimulation(&product(&left, &same).unwrap().unwrap(), &left, None).holds);

    assert_eq!(synthesize_action(&n, &data("chain4.json")).unwrap_err(), ActionError::NotARefinement);
}

#[test]
fn trivial_and_impossible_actions() {
    let left = data("fig2_left.json");
    let trivial = PointedActionModel::trivial(agents(&["a", "b"]));
    assert!(check_bisimulation(&product(&left, &trivial).unwrap().unwrap(), &left, None).holds);
    assert!(verify_product_is_refinement(&left, &trivial).unwrap().holds);
    let never = PointedActionModel::from_json(r#"{"states": ["e"], "point": "e", "pre": {"e": "bottom"}}"#).unwrap();
    assert_eq!(product(&left, &never).unwrap(), None);
}

fn random_action(rng: &mut impl Rng, agents: &[Agent]) -> PointedActionModel {
    let n = rng.gen_range(1..=3);
    let mut frame = Model::with_states(n);
    for a in agents {
        frame.add_agent(a);
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(0.5) {
                    frame.add_edge(a, s, t);
                }
            }
        }
    }
    let ps = props(&["p", "q"]);
    let pre = (0..n).map(|_| random_formula(rng, 1, 4, agents, &ps, false)).collect();
    PointedActionModel {
        action: rmlkit::actions::ActionModel { frame, pre },
        point: 0,
    }
}

#[test]
fn random_products_refine_and_keep_valuations() {
    let ag = agents(&["a", "b"]);
    let ps = props(&["p", "q"]);
    let mut checked = 0;
    for seed in 0..400 {
        let mut r = rng(seed);
        let m = random_model(&mut r, 4, &ag, &ps, 0.4);
        let act = random_action(&mut r, &ag);
        let Some(out) = product(&m, &act).unwrap() else { continue };
        checked += 1;
        assert!(verify_product_is_refinement(&m, &act).unwrap().holds, "seed {seed}");
        for (i, name) in out.model.names().iter().enumerate() {
            let s = m.model.state(name[1..].split(',').next().unwrap()).unwrap();
            for p in &ps {
                assert_eq!(out.model.holds(p, i), m.model.holds(p, s));
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn synthesis_round_trip_on_random_refinements() {
    let ag = agents(&["a", "b"]);
    let ps = props(&["p"]);
    let full = set(&ag);
    let mut checked = 0;
    for seed in 0..300 {
        let mut r = rng(1000 + seed);
        let m = random_model(&mut r, 3, &ag, &ps, 0.5);
        let n = random_model(&mut r, 3, &ag, &ps, 0.4);
        if !check_refinement(&m, &n, &full).holds {
            continue;
        }
        checked += 1;
        let act = synthesize_action(&m, &n).unwrap();
        let out = product(&m, &act).unwrap().unwrap();
        assert!(check_bisimulation(&out, &n, None).holds, "seed {seed}");
    }
    assert!(checked > 20, "{checked}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Refinements built by synthesized witnesses round-trip through actions.
    #[test]
    fn witness_refinements_round_trip(
        m in arb_model(3, vec!["a", "b"], vec!["p"]),
        psi in arb_formula(vec!["a", "b"], vec!["p"], false),
    ) {
        let ab = agents(&["a", "b"]);
        let Some(n) = rmlkit::reduction::synthesize_group_witness(&m, &ab, &psi).unwrap() else { return Ok(()) };
        prop_assert!(evaluate(&n, &psi).unwrap());
        let act = synthesize_action(&m, &n).unwrap();
        let out = product(&m, &act).unwrap().unwrap();
        prop_assert!(check_bisimulation(&out, &n, None).holds);
    }
}
