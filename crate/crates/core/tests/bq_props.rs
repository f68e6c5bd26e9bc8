mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rmlkit::bq::{alpha_normalize, check_relativization_commutes, relativize, translate, BqError};
use rmlkit::syntax::{parse, Agent, BqFormula, Prop};

fn t(text: &str) -> BqFormula {
    translate(&parse(text).unwrap())
}

#[test]
fn relativization_examples() {
    let (a, p) = (Agent::new("a"), Prop::new("p"));
    assert_eq!(relativize(&t("[a]r"), &a, &p), t("[a](p -> r)"));
    assert_eq!(relativize(&t("[b]r"), &a, &p), t("[b]r"));
    assert_eq!(relativize(&t("q"), &a, &p), t("q"));
}

#[test]
fn translation_examples() {
    let out = t("E_a E_b r");
    let r = BqFormula::prop(&Prop::new("r"));
    let shape = BqFormula::bisim_some(Prop::new("x"), BqFormula::bisim_some(Prop::new("y"), r.clone()));
    assert_eq!(alpha_normalize(&out), alpha_normalize(&shape));
    assert_eq!(out.to_string(), "BE__v1 BE__v0 r");
    let all = t("A_a p");
    let shape = BqFormula::bisim_all(Prop::new("x"), BqFormula::prop(&Prop::new("p")));
    assert_eq!(alpha_normalize(&all), alpha_normalize(&shape));
    assert_eq!(t("[a]p"), BqFormula::boxed(Agent::new("a"), BqFormula::prop(&Prop::new("p"))));
}

#[test]
fn commutation_examples() {
    let (a, b) = (Agent::new("a"), Agent::new("b"));
    let (p, q) = (Prop::new("p"), Prop::new("q"));
    for text in ["[a]r", "r", "[a][b]r"] {
        assert!(check_relativization_commutes(&t(text), &a, &p, &b, &q).unwrap());
    }
    let bound = t("E_a r");
    let v = bound.bound_props().into_iter().next().unwrap();
    assert_eq!(
        check_relativization_commutes(&bound, &a, &v, &b, &q).unwrap_err(),
        BqError::BoundVariable(v)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn translation_has_no_refinement_quantifiers_and_fresh_binders(
        f in arb_formula(vec!["a", "b"], vec!["p", "q"], true)
    ) {
        let out = translate(&f);
        let input = f.props();
        let bound = out.bound_props();
        prop_assert!(bound.is_disjoint(&input));
        let mut binders = 0;
        out.visit(&mut |g| if matches!(g, BqFormula::BisimAll(..) | BqFormula::BisimSome(..)) { binders += 1 });
        prop_assert_eq!(binders, f.quantifier_count());
        // Free variables of the output are exactly the input's.
        let free: BTreeSet<Prop> = out.props().difference(&bound).cloned().collect();
        prop_assert!(free.is_subset(&input));
    }

    #[test]
    fn relativizations_commute(f in arb_formula(vec!["a", "b", "c"], vec!["p", "q", "r"], true)) {
        let g = translate(&f);
        let (x, y) = (Prop::new("x"), Prop::new("y"));
        for (a, b) in [("a", "b"), ("b", "c"), ("c", "a")] {
            prop_assert!(check_relativization_commutes(&g, &Agent::new(a), &x, &Agent::new(b), &y).unwrap());
        }
    }
}
