mod common;

use common::*;
use proptest::prelude::*;
use rmlkit::decision::{k_satisfiable, rml_equivalent, rml_satisfiable, rml_valid, Validity, Verdict};
use rmlkit::kripke::PointedModel;
use rmlkit::modelcheck::{evaluate, evaluate_rml, small::all_pointed_models};
use rmlkit::syntax::{parse, Formula};

fn f(text: &str) -> Formula {
    parse(text).unwrap()
}

fn models() -> &'static [PointedModel] {
    static M: std::sync::OnceLock<Vec<PointedModel>> = std::sync::OnceLock::new();
    M.get_or_init(|| all_pointed_models(3, &agents(&["a"]), &props(&["p"])))
}

#[test]
fn k_examples() {
    assert_eq!(k_satisfiable(&f("p & ~p")), Verdict::Unsatisfiable);
    assert_eq!(k_satisfiable(&f("[a]p & <a>~p")), Verdict::Unsatisfiable);
    let v = k_satisfiable(&f("<a>top"));
    let m = v.model().unwrap();
    assert_eq!(m.model.len(), 2);
    assert_eq!(m.model.edge_count(), 1);
}

#[test]
fn rml_examples() {
    assert!(rml_valid(&f("<a>top -> E_a ([a]p | [a]~p)")).unwrap().is_valid());
    assert!(rml_valid(&f("(<a>p & <b>p & <a>~p & <b>~p) -> E_a ([a]p & ~[b]p)")).unwrap().is_valid());
    let v = rml_valid(&f("<a>top -> A_a <a>top")).unwrap();
    let Validity::Invalid { countermodel } = &v else { panic!("expected invalid") };
    assert!(!evaluate_rml(countermodel, &f("<a>top -> A_a <a>top")).unwrap());
    assert_eq!(v.to_json()["status"], "invalid");

    assert!(rml_equivalent(&f("E_a <a>p"), &f("<a>E_a p")).unwrap().is_valid());
    assert!(rml_equivalent(&f("E_a E_b p"), &f("E_b E_a p")).unwrap().is_valid());
    assert!(rml_equivalent(&f("E_a (p & q)"), &f("E_a p & E_a q")).unwrap().is_valid());
    // Splitting an existential over a conjunction of diamonds.
    let split = rml_equivalent(&f("E_a (<a>p & <a>~p)"), &f("E_a <a>p & E_a <a>~p")).unwrap();
    let one_way = rml_valid(&f("E_a (<a>p & <a>~p) -> E_a <a>p & E_a <a>~p")).unwrap();
    assert!(one_way.is_valid());
    if let Validity::Invalid { countermodel } = &split {
        let lhs = evaluate_rml(countermodel, &f("E_a (<a>p & <a>~p)")).unwrap();
        let rhs = evaluate_rml(countermodel, &f("E_a <a>p & E_a <a>~p")).unwrap();
        assert_ne!(lhs, rhs);
    }
}

#[test]
fn removing_all_access_is_always_possible() {
    assert!(rml_valid(&f("E_a [a]bottom")).unwrap().is_valid());
    assert!(rml_valid(&f("E_a E_b ([a]bottom & [b]bottom)")).unwrap().is_valid());
    assert!(rml_valid(&f("E ([a]bottom & [b]bottom)")).unwrap().is_valid());
}

#[test]
fn verdict_json() {
    let v = rml_satisfiable(&f("E_a <a>p")).unwrap();
    let j = v.to_json();
    assert_eq!(j["status"], "satisfiable");
    assert!(j["model"]["states"].is_array());
    assert_eq!(k_satisfiable(&f("bottom")).to_json()["model"], serde_json::Value::Null);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tableau_models_satisfy(g in arb_formula(vec!["a", "b"], vec!["p", "q"], false)) {
        if let Verdict::Satisfiable(m) = k_satisfiable(&g) {
            prop_assert!(evaluate(&m, &g).unwrap(), "{}", g);
        }
    }

    /// A model found by brute force over one agent up to three states means
    /// the tableau must answer satisfiable.
    #[test]
    fn brute_force_models_are_found(g in arb_formula(vec!["a"], vec!["p"], false)) {
        let brute = models().iter().any(|m| evaluate(m, &g).unwrap());
        let verdict = k_satisfiable(&g);
        if brute {
            prop_assert!(verdict.is_satisfiable(), "{}", g);
        }
        if let Verdict::Satisfiable(m) = verdict {
            prop_assert!(evaluate(&m, &g).unwrap());
        }
    }

    #[test]
    fn rml_countermodels_falsify(g in arb_formula(vec!["a", "b"], vec!["p"], true)
        .prop_filter("small", |g| g.size() <= 12))
    {
        if let Ok(Validity::Invalid { countermodel }) = rml_valid(&g) {
            prop_assert!(!evaluate_rml(&countermodel, &g).unwrap(), "{}", g);
        }
    }
}
