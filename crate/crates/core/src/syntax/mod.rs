//! Formulas of multi-agent modal logic with refinement quantifiers and the
//! cover operator.
//!
//! [`Formula`] is the single currency of the crate. Children are shared
//! through [`Arc`], so cloning a formula is cheap and formulas may be handed
//! to worker threads freely.

mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parser::{parse, parse_with_agents, ParseError};

/// An agent name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(Arc<str>);

impl Agent {
    pub fn new(name: impl AsRef<str>) -> Self {
        Agent(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Agent {
    fn from(s: &str) -> Self {
        Agent::new(s)
    }
}

/// A propositional variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prop(Arc<str>);

impl Prop {
    pub fn new(name: impl AsRef<str>) -> Self {
        Prop(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Prop {
    fn from(s: &str) -> Self {
        Prop::new(s)
    }
}

/// Returns the first name of the form `_v0`, `_v1`, ... not in `avoid`.
pub fn fresh_prop<'a>(avoid: impl IntoIterator<Item = &'a Prop>) -> Prop {
    let taken: BTreeSet<&str> = avoid.into_iter().map(Prop::name).collect();
    (0..)
        .map(|i| format!("_v{i}"))
        .find(|name| !taken.contains(name.as_str()))
        .map(Prop::new)
        .expect("unbounded name supply")
}

/// The member set of a cover formula.
///
/// Members are kept sorted by their printed form and deduplicated, so two
/// covers over the same set compare equal regardless of construction order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormulaSet(Arc<[Formula]>);

impl FormulaSet {
    pub fn new(members: impl IntoIterator<Item = Formula>) -> Self {
        let mut keyed: Vec<(String, Formula)> = members
            .into_iter()
            .map(|f| (f.to_string(), f))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        FormulaSet(keyed.into_iter().map(|(_, f)| f).collect())
    }

    pub fn empty() -> Self {
        FormulaSet(Arc::from(Vec::new()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Formula] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A formula of refinement modal logic extended with the cover operator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Prop(Prop),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Box(Agent, Arc<Formula>),
    Diamond(Agent, Arc<Formula>),
    /// `nabla_a {...}`: every a-successor satisfies some member and every
    /// member holds at some a-successor.
    Cover(Agent, FormulaSet),
    /// `A_a φ`: φ holds in every a-refinement.
    AllRef(Agent, Arc<Formula>),
    /// `E_a φ`: φ holds in some a-refinement.
    SomeRef(Agent, Arc<Formula>),
}

impl Formula {
    pub fn prop(name: impl AsRef<str>) -> Self {
        Formula::Prop(Prop::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(a: impl Into<Agent>, f: Formula) -> Self {
        Formula::Box(a.into(), Arc::new(f))
    }

    pub fn diamond(a: impl Into<Agent>, f: Formula) -> Self {
        Formula::Diamond(a.into(), Arc::new(f))
    }

    pub fn cover(a: impl Into<Agent>, members: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Cover(a.into(), FormulaSet::new(members))
    }

    pub fn all_ref(a: impl Into<Agent>, f: Formula) -> Self {
        Formula::AllRef(a.into(), Arc::new(f))
    }

    pub fn some_ref(a: impl Into<Agent>, f: Formula) -> Self {
        Formula::SomeRef(a.into(), Arc::new(f))
    }

    /// Left-nested conjunction; `top` for an empty iterator.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `bottom` for an empty iterator.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Number of AST nodes; a cover counts one node plus its members.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) => 1,
            Formula::Not(f)
            | Formula::Box(_, f)
            | Formula::Diamond(_, f)
            | Formula::AllRef(_, f)
            | Formula::SomeRef(_, f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                1 + l.size() + r.size()
            }
            Formula::Cover(_, fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) => 0,
            Formula::Not(f) | Formula::AllRef(_, f) | Formula::SomeRef(_, f) => f.modal_depth(),
            Formula::Box(_, f) | Formula::Diamond(_, f) => 1 + f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.modal_depth().max(r.modal_depth())
            }
            Formula::Cover(_, fs) => 1 + fs.iter().map(Formula::modal_depth).max().unwrap_or(0),
        }
    }

    /// Number of refinement quantifier occurrences.
    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, Formula::AllRef(..) | Formula::SomeRef(..)) {
                n += 1;
            }
        });
        n
    }

    pub fn is_refinement_free(&self) -> bool {
        self.quantifier_count() == 0
    }

    /// True when no modality, cover or quantifier occurs.
    pub fn is_propositional(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if matches!(
                f,
                Formula::Box(..)
                    | Formula::Diamond(..)
                    | Formula::Cover(..)
                    | Formula::AllRef(..)
                    | Formula::SomeRef(..)
            ) {
                ok = false;
            }
        });
        ok
    }

    pub fn props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Box(a, _)
            | Formula::Diamond(a, _)
            | Formula::Cover(a, _)
            | Formula::AllRef(a, _)
            | Formula::SomeRef(a, _) => {
                out.insert(a.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal over every subformula, including cover members.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) => {}
            Formula::Not(g)
            | Formula::Box(_, g)
            | Formula::Diamond(_, g)
            | Formula::AllRef(_, g)
            | Formula::SomeRef(_, g) => g.visit(f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Cover(_, fs) => fs.iter().for_each(|g| g.visit(f)),
        }
    }

    /// Rebuilds the node with each immediate child replaced by `g(child)`.
    pub fn map_children<G: FnMut(&Formula) -> Formula>(&self, mut g: G) -> Formula {
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) => self.clone(),
            Formula::Not(f) => Formula::not(g(f)),
            Formula::And(l, r) => Formula::and(g(l), g(r)),
            Formula::Or(l, r) => Formula::or(g(l), g(r)),
            Formula::Implies(l, r) => Formula::implies(g(l), g(r)),
            Formula::Iff(l, r) => Formula::iff(g(l), g(r)),
            Formula::Box(a, f) => Formula::Box(a.clone(), Arc::new(g(f))),
            Formula::Diamond(a, f) => Formula::Diamond(a.clone(), Arc::new(g(f))),
            Formula::AllRef(a, f) => Formula::AllRef(a.clone(), Arc::new(g(f))),
            Formula::SomeRef(a, f) => Formula::SomeRef(a.clone(), Arc::new(g(f))),
            Formula::Cover(a, fs) => Formula::cover(a.clone(), fs.iter().map(g)),
        }
    }

    /// Replaces every occurrence of `p` by `by`.
    pub fn substitute(&self, p: &Prop, by: &Formula) -> Formula {
        match self {
            Formula::Prop(q) if q == p => by.clone(),
            _ => self.map_children(|c| c.substitute(p, by)),
        }
    }

    /// Negation normal form: implications and biconditionals are removed and
    /// negation is pushed onto propositional variables. Negated covers are
    /// expanded through their box/diamond definition; positive covers keep
    /// their shape with normalized members.
    pub fn to_nnf(&self) -> Formula {
        nnf(self, true)
    }

    /// Expands every cover into `[a](φ1 | ...) & <a>φ1 & ...`.
    pub fn desugar_covers(&self) -> Formula {
        match self {
            Formula::Cover(a, fs) => {
                let members: Vec<Formula> = fs.iter().map(Formula::desugar_covers).collect();
                cover_definition(a, &members)
            }
            _ => self.map_children(Formula::desugar_covers),
        }
    }
}

/// `[a]⋁Φ & ⋀<a>Φ` for the given members.
pub(crate) fn cover_definition(a: &Agent, members: &[Formula]) -> Formula {
    let boxed = Formula::boxed(a.clone(), Formula::disj(members.iter().cloned()));
    Formula::conj(
        std::iter::once(boxed).chain(members.iter().map(|m| Formula::diamond(a.clone(), m.clone()))),
    )
}

fn nnf(f: &Formula, positive: bool) -> Formula {
    use Formula as F;
    match (f, positive) {
        (F::Top, true) | (F::Bottom, false) => F::Top,
        (F::Top, false) | (F::Bottom, true) => F::Bottom,
        (F::Prop(_), true) => f.clone(),
        (F::Prop(_), false) => F::not(f.clone()),
        (F::Not(g), _) => nnf(g, !positive),
        (F::And(l, r), true) => F::and(nnf(l, true), nnf(r, true)),
        (F::And(l, r), false) => F::or(nnf(l, false), nnf(r, false)),
        (F::Or(l, r), true) => F::or(nnf(l, true), nnf(r, true)),
        (F::Or(l, r), false) => F::and(nnf(l, false), nnf(r, false)),
        (F::Implies(l, r), true) => F::or(nnf(l, false), nnf(r, true)),
        (F::Implies(l, r), false) => F::and(nnf(l, true), nnf(r, false)),
        (F::Iff(l, r), true) => F::or(
            F::and(nnf(l, true), nnf(r, true)),
            F::and(nnf(l, false), nnf(r, false)),
        ),
        (F::Iff(l, r), false) => F::or(
            F::and(nnf(l, true), nnf(r, false)),
            F::and(nnf(l, false), nnf(r, true)),
        ),
        (F::Box(a, g), true) => F::boxed(a.clone(), nnf(g, true)),
        (F::Box(a, g), false) => F::diamond(a.clone(), nnf(g, false)),
        (F::Diamond(a, g), true) => F::diamond(a.clone(), nnf(g, true)),
        (F::Diamond(a, g), false) => F::boxed(a.clone(), nnf(g, false)),
        (F::AllRef(a, g), true) => F::all_ref(a.clone(), nnf(g, true)),
        (F::AllRef(a, g), false) => F::some_ref(a.clone(), nnf(g, false)),
        (F::SomeRef(a, g), true) => F::some_ref(a.clone(), nnf(g, true)),
        (F::SomeRef(a, g), false) => F::all_ref(a.clone(), nnf(g, false)),
        (F::Cover(a, fs), true) => F::cover(a.clone(), fs.iter().map(|m| nnf(m, true))),
        (F::Cover(a, fs), false) => {
            // ~nabla_a Φ  ==  <a>(~φ1 & ... ) | [a]~φ1 | ...
            let no_member = F::conj(fs.iter().map(|m| nnf(m, false)));
            F::disj(
                std::iter::once(F::diamond(a.clone(), no_member))
                    .chain(fs.iter().map(|m| F::boxed(a.clone(), nnf(m, false)))),
            )
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        printer::write_formula(f, self)
    }
}

/// Renders a formula in the ASCII surface syntax accepted by [`parse`].
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// Formulas of bisimulation-quantified modal logic.
///
/// Same connectives as [`Formula`] without refinement quantifiers, plus
/// quantification over the valuation of a propositional variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BqFormula {
    Top,
    Bottom,
    Prop(Prop),
    Not(Arc<BqFormula>),
    And(Arc<BqFormula>, Arc<BqFormula>),
    Or(Arc<BqFormula>, Arc<BqFormula>),
    Implies(Arc<BqFormula>, Arc<BqFormula>),
    Iff(Arc<BqFormula>, Arc<BqFormula>),
    Box(Agent, Arc<BqFormula>),
    Diamond(Agent, Arc<BqFormula>),
    Cover(Agent, Vec<BqFormula>),
    /// `BA_p φ`
    BisimAll(Prop, Arc<BqFormula>),
    /// `BE_p φ`
    BisimSome(Prop, Arc<BqFormula>),
}

impl BqFormula {
    pub fn prop(p: &Prop) -> Self {
        BqFormula::Prop(p.clone())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: BqFormula) -> Self {
        BqFormula::Not(Arc::new(f))
    }

    pub fn and(l: BqFormula, r: BqFormula) -> Self {
        BqFormula::And(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: BqFormula, r: BqFormula) -> Self {
        BqFormula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(a: Agent, f: BqFormula) -> Self {
        BqFormula::Box(a, Arc::new(f))
    }

    pub fn diamond(a: Agent, f: BqFormula) -> Self {
        BqFormula::Diamond(a, Arc::new(f))
    }

    pub fn bisim_all(p: Prop, f: BqFormula) -> Self {
        BqFormula::BisimAll(p, Arc::new(f))
    }

    pub fn bisim_some(p: Prop, f: BqFormula) -> Self {
        BqFormula::BisimSome(p, Arc::new(f))
    }

    /// Every propositional variable occurring, bound or free.
    pub fn props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<Prop>) {
        match self {
            BqFormula::Top | BqFormula::Bottom => {}
            BqFormula::Prop(p) => {
                out.insert(p.clone());
            }
            BqFormula::Not(f) | BqFormula::Box(_, f) | BqFormula::Diamond(_, f) => f.collect_props(out),
            BqFormula::And(l, r) | BqFormula::Or(l, r) | BqFormula::Implies(l, r) | BqFormula::Iff(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            BqFormula::Cover(_, fs) => fs.iter().for_each(|g| g.collect_props(out)),
            BqFormula::BisimAll(p, f) | BqFormula::BisimSome(p, f) => {
                out.insert(p.clone());
                f.collect_props(out);
            }
        }
    }

    /// Variables bound by some bisimulation quantifier.
    pub fn bound_props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let BqFormula::BisimAll(p, _) | BqFormula::BisimSome(p, _) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn visit<F: FnMut(&BqFormula)>(&self, f: &mut F) {
        f(self);
        match self {
            BqFormula::Top | BqFormula::Bottom | BqFormula::Prop(_) => {}
            BqFormula::Not(g)
            | BqFormula::Box(_, g)
            | BqFormula::Diamond(_, g)
            | BqFormula::BisimAll(_, g)
            | BqFormula::BisimSome(_, g) => g.visit(f),
            BqFormula::And(l, r) | BqFormula::Or(l, r) | BqFormula::Implies(l, r) | BqFormula::Iff(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            BqFormula::Cover(_, fs) => fs.iter().for_each(|g| g.visit(f)),
        }
    }

    /// Substitutes `by` for free occurrences of `p`.
    pub fn rename_free(&self, p: &Prop, by: &Prop) -> BqFormula {
        use BqFormula as B;
        match self {
            B::Top | B::Bottom => self.clone(),
            B::Prop(q) if q == p => B::Prop(by.clone()),
            B::Prop(_) => self.clone(),
            B::Not(f) => B::not(f.rename_free(p, by)),
            B::And(l, r) => B::and(l.rename_free(p, by), r.rename_free(p, by)),
            B::Or(l, r) => B::Or(Arc::new(l.rename_free(p, by)), Arc::new(r.rename_free(p, by))),
            B::Implies(l, r) => B::implies(l.rename_free(p, by), r.rename_free(p, by)),
            B::Iff(l, r) => B::Iff(Arc::new(l.rename_free(p, by)), Arc::new(r.rename_free(p, by))),
            B::Box(a, f) => B::boxed(a.clone(), f.rename_free(p, by)),
            B::Diamond(a, f) => B::diamond(a.clone(), f.rename_free(p, by)),
            B::Cover(a, fs) => B::Cover(a.clone(), fs.iter().map(|g| g.rename_free(p, by)).collect()),
            B::BisimAll(q, _) | B::BisimSome(q, _) if q == p => self.clone(),
            B::BisimAll(q, f) => B::bisim_all(q.clone(), f.rename_free(p, by)),
            B::BisimSome(q, f) => B::bisim_some(q.clone(), f.rename_free(p, by)),
        }
    }
}

impl fmt::Display for BqFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        printer::write_bq(f, self)
    }
}
