//! Translation into bisimulation-quantified modal logic.
//!
//! A refinement quantifier for agent `a` becomes a bisimulation quantifier
//! over a fresh variable `p`, with every `a`-modality of the body restricted
//! to `p`-successors.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{fresh_prop, Agent, BqFormula, Formula, Prop};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BqError {
    #[error("agents must differ, both are {0}")]
    SameAgent(Agent),
    #[error("variables must differ, both are {0}")]
    SameVariable(Prop),
    #[error("variable {0} is bound in the formula")]
    BoundVariable(Prop),
}

/// `f` with every `a`-modality restricted to `p`-successors.
///
/// Covers are expanded into boxes and diamonds first. A binder of `p` is
/// renamed to a fresh variable before the body is relativized.
pub fn relativize(f: &BqFormula, a: &Agent, p: &Prop) -> BqFormula {
    use BqFormula as B;
    let rel = |g: &BqFormula| relativize(g, a, p);
    match f {
        B::Top | B::Bottom | B::Prop(_) => f.clone(),
        B::Not(g) => B::not(rel(g)),
        B::And(l, r) => B::and(rel(l), rel(r)),
        B::Or(l, r) => B::Or(rel(l).into(), rel(r).into()),
        B::Implies(l, r) => B::implies(rel(l), rel(r)),
        B::Iff(l, r) => B::Iff(rel(l).into(), rel(r).into()),
        B::Box(b, g) if b == a => B::boxed(b.clone(), B::implies(B::prop(p), rel(g))),
        B::Box(b, g) => B::boxed(b.clone(), rel(g)),
        B::Diamond(b, g) if b == a => B::diamond(b.clone(), B::and(B::prop(p), rel(g))),
        B::Diamond(b, g) => B::diamond(b.clone(), rel(g)),
        B::Cover(b, members) => rel(&desugar_cover(b, members)),
        B::BisimAll(q, g) | B::BisimSome(q, g) => {
            let (q, body) = if q == p {
                let mut avoid = f.props();
                avoid.insert(p.clone());
                let fresh = fresh_prop(&avoid);
                let renamed = g.rename_free(q, &fresh);
                (fresh, renamed)
            } else {
                (q.clone(), (**g).clone())
            };
            match f {
                B::BisimAll(..) => B::bisim_all(q, rel(&body)),
                _ => B::bisim_some(q, rel(&body)),
            }
        }
    }
}

fn desugar_cover(a: &Agent, members: &[BqFormula]) -> BqFormula {
    let any = members
        .iter()
        .cloned()
        .reduce(|l, r| BqFormula::Or(l.into(), r.into()))
        .unwrap_or(BqFormula::Bottom);
    members
        .iter()
        .map(|m| BqFormula::diamond(a.clone(), m.clone()))
        .fold(BqFormula::boxed(a.clone(), any), BqFormula::and)
}

/// The bisimulation-quantified translation. Each refinement quantifier gets
/// a variable occurring neither in its scope nor in the translated scope.
pub fn translate(f: &Formula) -> BqFormula {
    use BqFormula as B;
    match f {
        Formula::Top => B::Top,
        Formula::Bottom => B::Bottom,
        Formula::Prop(p) => B::prop(p),
        Formula::Not(g) => B::not(translate(g)),
        Formula::And(l, r) => B::and(translate(l), translate(r)),
        Formula::Or(l, r) => B::Or(translate(l).into(), translate(r).into()),
        Formula::Implies(l, r) => B::implies(translate(l), translate(r)),
        Formula::Iff(l, r) => B::Iff(translate(l).into(), translate(r).into()),
        Formula::Box(a, g) => B::boxed(a.clone(), translate(g)),
        Formula::Diamond(a, g) => B::diamond(a.clone(), translate(g)),
        Formula::Cover(a, fs) => B::Cover(a.clone(), fs.iter().map(translate).collect()),
        Formula::AllRef(a, g) | Formula::SomeRef(a, g) => {
            let body = translate(g);
            let avoid: BTreeSet<Prop> = g.props().into_iter().chain(body.props()).collect();
            let p = fresh_prop(&avoid);
            let restricted = relativize(&body, a, &p);
            match f {
                Formula::AllRef(..) => B::bisim_all(p, restricted),
                _ => B::bisim_some(p, restricted),
            }
        }
    }
}

/// Renames bound variables to `%0`, `%1`, ... in binding order. Two
/// formulas are alpha-equivalent iff their normalizations are equal.
pub fn alpha_normalize(f: &BqFormula) -> BqFormula {
    let mut next = 0;
    normalize(f, &mut next)
}

fn normalize(f: &BqFormula, next: &mut usize) -> BqFormula {
    use BqFormula as B;
    match f {
        B::Top | B::Bottom | B::Prop(_) => f.clone(),
        B::Not(g) => B::not(normalize(g, next)),
        B::And(l, r) => {
            let l = normalize(l, next);
            B::and(l, normalize(r, next))
        }
        B::Or(l, r) => {
            let l = normalize(l, next);
            B::Or(l.into(), normalize(r, next).into())
        }
        B::Implies(l, r) => {
            let l = normalize(l, next);
            B::implies(l, normalize(r, next))
        }
        B::Iff(l, r) => {
            let l = normalize(l, next);
            B::Iff(l.into(), normalize(r, next).into())
        }
        B::Box(a, g) => B::boxed(a.clone(), normalize(g, next)),
        B::Diamond(a, g) => B::diamond(a.clone(), normalize(g, next)),
        B::Cover(a, fs) => B::Cover(a.clone(), fs.iter().map(|g| normalize(g, next)).collect()),
        B::BisimAll(q, g) | B::BisimSome(q, g) => {
            let name = Prop::new(format!("%{next}"));
            *next += 1;
            let body = normalize(&g.rename_free(q, &name), next);
            match f {
                B::BisimAll(..) => B::bisim_all(name, body),
                _ => B::bisim_some(name, body),
            }
        }
    }
}

/// Whether relativizing to `(a, p)` then `(b, q)` gives the same formula as
/// the opposite order, up to renaming of bound variables.
pub fn check_relativization_commutes(
    f: &BqFormula,
    a: &Agent,
    p: &Prop,
    b: &Agent,
    q: &Prop,
) -> Result<bool, BqError> {
    if a == b {
        return Err(BqError::SameAgent(a.clone()));
    }
    if p == q {
        return Err(BqError::SameVariable(p.clone()));
    }
    let bound = f.bound_props();
    if let Some(v) = [p, q].into_iter().find(|v| bound.contains(*v)) {
        return Err(BqError::BoundVariable(v.clone()));
    }
    let ab = relativize(&relativize(f, a, p), b, q);
    let ba = relativize(&relativize(f, b, q), a, p);
    Ok(alpha_normalize(&ab) == alpha_normalize(&ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn bq(text: &str) -> BqFormula {
        translate(&parse(text).unwrap())
    }

    #[test]
    fn relativization_clauses() {
        let (a, p) = (Agent::new("a"), Prop::new("p"));
        assert_eq!(relativize(&bq("[a]r"), &a, &p).to_string(), "[a](p -> r)");
        assert_eq!(relativize(&bq("[b]r"), &a, &p).to_string(), "[b]r");
        assert_eq!(relativize(&bq("<a>r"), &a, &p).to_string(), "<a>(p & r)");
        assert_eq!(relativize(&bq("q"), &a, &p).to_string(), "q");
    }

    #[test]
    fn binder_of_the_relativizing_variable_is_renamed() {
        let (a, p) = (Agent::new("a"), Prop::new("p"));
        let f = BqFormula::bisim_some(p.clone(), bq("[a]p"));
        let out = relativize(&f, &a, &p);
        assert_eq!(out.to_string(), "BE__v0 [a](p -> _v0)");
    }

    #[test]
    fn translation_examples() {
        let t = bq("E_a E_b r");
        assert_eq!(t.to_string(), "BE__v1 BE__v0 r");
        let expected = BqFormula::bisim_some(
            Prop::new("x"),
            BqFormula::bisim_some(Prop::new("y"), BqFormula::prop(&Prop::new("r"))),
        );
        assert_eq!(alpha_normalize(&t), alpha_normalize(&expected));
        assert_eq!(bq("A_a p").to_string(), "BA__v0 p");
        assert_eq!(bq("[a]p").to_string(), "[a]p");
        assert_eq!(bq("A_a [a]p").to_string(), "BA__v0 [a](_v0 -> p)");
    }

    #[test]
    fn commutation() {
        let (a, b) = (Agent::new("a"), Agent::new("b"));
        let (p, q) = (Prop::new("p"), Prop::new("q"));
        for text in ["[a]r", "r", "[a][b]r", "nabla_a {r, <b>r}"] {
            assert!(check_relativization_commutes(&bq(text), &a, &p, &b, &q).unwrap(), "{text}");
        }
        assert!(check_relativization_commutes(&bq("r"), &a, &p, &a, &q).is_err());
        assert!(check_relativization_commutes(&bq("r"), &a, &p, &b, &p).is_err());
    }
}
