mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rmlkit::kripke::{check_refinement, PointedModel};
use rmlkit::modelcheck::{
    enumerate_refinements, evaluate, evaluate_rml,
    small::{all_pointed_models, canonical_form, representatives},
    EnumerateError,
};
use rmlkit::par::Exec;
use rmlkit::syntax::{parse, Agent, Formula};

fn f(text: &str) -> Formula {
    parse(text).unwrap()
}

#[test]
fn introduction_examples() {
    let chain4 = data("chain4.json");
    let chain3 = data("chain3.json");
    assert!(evaluate(&chain4, &f("<a><a><a>[a]bottom")).unwrap());
    assert!(evaluate(&chain3, &f("<a><a>[a]bottom")).unwrap());
    assert!(!evaluate(&chain4, &f("<a><a>[a]bottom")).unwrap());
    let dead = PointedModel::from_json(r#"{"states": ["s"], "point": "s"}"#).unwrap();
    assert!(evaluate(&dead, &f("nabla_a {}")).unwrap());
}

#[test]
fn two_agent_announcement_examples() {
    let left = data("fig2_left.json");
    let right = data("fig2_right.json");
    assert!(evaluate_rml(&left, &f("E ([a]p & ~[b][a]p)")).unwrap());
    assert!(evaluate_rml(&left, &f("E_a E_b ([a]p & ~[b][a]p)")).unwrap());
    assert!(evaluate(&right, &f("[a]p & ~[b][a]p")).unwrap());
    // Agent a can do it alone: b-successors keep their a-arrows. Agent b
    // cannot, since the point keeps its a-view of the ~p state.
    let psi = f("[a]p & ~[b][a]p");
    assert!(evaluate_rml(&left, &Formula::some_ref("a", psi.clone())).unwrap());
    let w = rmlkit::reduction::synthesize_witness(&left, &Agent::new("a"), &psi).unwrap().unwrap();
    assert!(evaluate(&w, &psi).unwrap());
    assert!(check_refinement(&left, &w, &set(&agents(&["a"]))).holds);
    assert!(!evaluate_rml(&left, &Formula::some_ref("b", psi)).unwrap());
    let (ag, a) = (agents(&["a", "b"]), set(&agents(&["a"])));
    let c = check_refinement(&left, &right, &a);
    assert!(c.holds);
    let expected: BTreeSet<(String, String)> = [("1", "(1,p)"), ("1", "(1,t)"), ("0", "(0,t)")]
        .iter()
        .map(|(s, t)| (s.to_string(), t.to_string()))
        .collect();
    let found: BTreeSet<(String, String)> = c.witness.unwrap().named_pairs().into_iter().collect();
    assert_eq!(found, expected);
    assert!(!check_refinement(&left, &right, &set(&agents(&["b"]))).holds);
    assert!(check_refinement(&left, &right, &set(&ag)).holds);
}

#[test]
fn refinement_free_formulas_evaluate_directly() {
    assert!(evaluate(&data("loop.json"), &f("E_a p")).is_err());
    for m in all_pointed_models(2, &agents(&["a"]), &props(&["p"])) {
        assert_eq!(evaluate_rml(&m, &f("A_a p")).unwrap(), evaluate(&m, &f("p")).unwrap());
    }
}

#[test]
fn enumeration_examples() {
    let a = Agent::new("a");
    let lp = data("loop.json");
    let d0: Vec<_> = enumerate_refinements(&lp, &a, 0, 1, 100).unwrap().collect();
    assert!(d0.iter().all(|n| check_refinement(&lp, n, &BTreeSet::from([a.clone()])).holds));
    let refinements: Vec<_> = enumerate_refinements(&lp, &a, 2, 1, 100).unwrap().collect();
    let chain3 = data("chain3.json");
    assert!(refinements.iter().any(|n| rmlkit::kripke::bisimilar(n, &chain3)));
    // The first yield is the unpruned unravelling.
    assert!(rmlkit::kripke::bisimilar(&refinements[0], &lp));
    assert!(matches!(enumerate_refinements(&lp, &a, 1, 0, 10), Err(EnumerateError::ZeroDup)));
}

#[test]
fn small_model_counts() {
    let all = all_pointed_models(3, &agents(&["a"]), &props(&["p"]));
    assert_eq!(all.len(), 4 + 64 + 4096);
    let (reps, class) = representatives(Exec::Parallel, &all);
    let (seq, seq_class) = representatives(Exec::Sequential, &all);
    assert_eq!(class, seq_class);
    assert_eq!(reps.len(), seq.len());
    for (m, &c) in all.iter().zip(&class).step_by(97) {
        assert_eq!(canonical_form(m), canonical_form(&reps[c]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn labelling_agrees_with_naive(
        g in arb_formula(vec!["a", "b"], vec!["p", "q"], false),
        m in arb_model(4, vec!["a", "b"], vec!["p", "q"]),
    ) {
        prop_assert_eq!(evaluate(&m, &g).unwrap(), naive_eval(&m.model, m.point, &g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn enumerated_models_are_refinements(m in arb_model(3, vec!["a", "b"], vec!["p"])) {
        let a = Agent::new("a");
        let Ok(stream) = enumerate_refinements(&m, &a, 2, 2, 64) else { return Ok(()) };
        for n in stream {
            prop_assert!(check_refinement(&m, &n, &BTreeSet::from([a.clone()])).holds);
        }
    }

    #[test]
    fn enumeration_oracle_is_sound(
        m in arb_model(3, vec!["a", "b"], vec!["p"]),
        psi in arb_formula(vec!["a", "b"], vec!["p"], false),
    ) {
        let a = Agent::new("a");
        let Ok(stream) = enumerate_refinements(&m, &a, 2, 1, 64) else { return Ok(()) };
        let reached = stream.into_iter().any(|n| evaluate(&n, &psi).unwrap());
        if reached {
            prop_assert!(evaluate_rml(&m, &Formula::some_ref(a, psi)).unwrap());
        }
    }
}
