//! Cover algebra and disjunctive normal forms for refinement-free formulas.
//!
//! A disjunctive formula is a disjunction of conjuncts; each conjunct is a
//! set of literals together with at most one cover per agent, and every
//! cover member is again disjunctive.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{Agent, Formula, FormulaSet, Prop};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("refinement quantifier in {0}")]
    Quantifier(Formula),
    #[error("expected a cover formula, found {0}")]
    NotACover(Formula),
    #[error("cover agents differ: {0} and {1}")]
    AgentMismatch(Agent, Agent),
    #[error("normal form exceeds the budget of {0} conjuncts")]
    Budget(usize),
}

/// Rewrites every box and diamond into covers.
pub fn box_diamond_to_cover(f: &Formula) -> Result<Formula, NormalFormError> {
    Ok(match f {
        Formula::Box(a, g) => {
            let g = box_diamond_to_cover(g)?;
            Formula::or(Formula::cover(a.clone(), []), Formula::cover(a.clone(), [g]))
        }
        Formula::Diamond(a, g) => Formula::cover(a.clone(), [box_diamond_to_cover(g)?, Formula::Top]),
        Formula::AllRef(..) | Formula::SomeRef(..) => return Err(NormalFormError::Quantifier(f.clone())),
        _ => {
            let mut err = None;
            let out = f.map_children(|c| {
                box_diamond_to_cover(c).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    Formula::Top
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            out
        }
    })
}

/// The single cover equivalent to `c1 & c2`.
pub fn merge_covers(c1: &Formula, c2: &Formula) -> Result<Formula, NormalFormError> {
    let (a, phi) = match c1 {
        Formula::Cover(a, fs) => (a, fs),
        _ => return Err(NormalFormError::NotACover(c1.clone())),
    };
    let (b, psi) = match c2 {
        Formula::Cover(b, fs) => (b, fs),
        _ => return Err(NormalFormError::NotACover(c2.clone())),
    };
    if a != b {
        return Err(NormalFormError::AgentMismatch(a.clone(), b.clone()));
    }
    let any_phi = Formula::disj(phi.iter().cloned());
    let any_psi = Formula::disj(psi.iter().cloned());
    let members = phi
        .iter()
        .map(|f| Formula::and(f.clone(), any_psi.clone()))
        .chain(psi.iter().map(|g| Formula::and(any_phi.clone(), g.clone())));
    Ok(Formula::cover(a.clone(), members))
}

/// `literals & nabla_b1 {...} & ... & nabla_bn {...}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjunct {
    /// `(p, true)` for `p`, `(p, false)` for `~p`.
    pub literals: BTreeSet<(Prop, bool)>,
    pub covers: BTreeMap<Agent, Vec<DisjunctiveForm>>,
}

impl Conjunct {
    pub fn to_formula(&self) -> Formula {
        let lits = self.literals.iter().map(|(p, pos)| {
            let atom = Formula::Prop(p.clone());
            if *pos {
                atom
            } else {
                Formula::not(atom)
            }
        });
        let covers = self
            .covers
            .iter()
            .map(|(a, members)| Formula::cover(a.clone(), members.iter().map(DisjunctiveForm::to_formula)));
        Formula::conj(lits.chain(covers))
    }

    pub fn propositional_part(&self) -> Formula {
        Conjunct {
            literals: self.literals.clone(),
            covers: BTreeMap::new(),
        }
        .to_formula()
    }
}

/// A disjunction of conjuncts; empty means `bottom`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DisjunctiveForm(pub Vec<Conjunct>);

impl DisjunctiveForm {
    pub fn conjuncts(&self) -> &[Conjunct] {
        &self.0
    }

    pub fn to_formula(&self) -> Formula {
        Formula::disj(self.0.iter().map(Conjunct::to_formula))
    }
}

/// Converts a refinement-free formula into an equivalent disjunctive form.
pub fn to_disjunctive(f: &Formula) -> Result<DisjunctiveForm, NormalFormError> {
    to_disjunctive_with_budget(f, usize::MAX)
}

/// As [`to_disjunctive`], failing once more than `budget` conjuncts have
/// been produced in total.
pub fn to_disjunctive_with_budget(f: &Formula, budget: usize) -> Result<DisjunctiveForm, NormalFormError> {
    if !f.is_refinement_free() {
        return Err(NormalFormError::Quantifier(f.clone()));
    }
    let mut cx = Dnf {
        memo: HashMap::new(),
        produced: 0,
        budget,
    };
    cx.convert(&f.to_nnf())
}

/// One propositional disjunct with modal subformulas kept opaque.
#[derive(Debug, Clone, Default)]
struct Clause {
    lits: BTreeSet<(Prop, bool)>,
    boxes: BTreeMap<Agent, Vec<Formula>>,
    diamonds: BTreeMap<Agent, Vec<Formula>>,
}

impl Clause {
    fn merge(&self, other: &Clause) -> Option<Clause> {
        let mut out = self.clone();
        for (p, pos) in &other.lits {
            if out.lits.contains(&(p.clone(), !pos)) {
                return None;
            }
            out.lits.insert((p.clone(), *pos));
        }
        for (a, fs) in &other.boxes {
            out.boxes.entry(a.clone()).or_default().extend(fs.iter().cloned());
        }
        for (a, fs) in &other.diamonds {
            out.diamonds.entry(a.clone()).or_default().extend(fs.iter().cloned());
        }
        Some(out)
    }
}

struct Dnf {
    memo: HashMap<Formula, DisjunctiveForm>,
    produced: usize,
    budget: usize,
}

impl Dnf {
    fn charge(&mut self, n: usize) -> Result<(), NormalFormError> {
        self.produced = self.produced.saturating_add(n);
        if self.produced > self.budget {
            return Err(NormalFormError::Budget(self.budget));
        }
        Ok(())
    }

    fn clauses(&mut self, f: &Formula) -> Result<Vec<Clause>, NormalFormError> {
        let single = |c: Clause| Ok(vec![c]);
        match f {
            Formula::Top => single(Clause::default()),
            Formula::Bottom => Ok(Vec::new()),
            Formula::Prop(p) => single(Clause {
                lits: BTreeSet::from([(p.clone(), true)]),
                ..Clause::default()
            }),
            Formula::Not(g) => match &**g {
                Formula::Prop(p) => single(Clause {
                    lits: BTreeSet::from([(p.clone(), false)]),
                    ..Clause::default()
                }),
                _ => self.clauses(&f.to_nnf()),
            },
            Formula::And(l, r) => {
                let left = self.clauses(l)?;
                if left.is_empty() {
                    return Ok(left);
                }
                let right = self.clauses(r)?;
                let mut out = Vec::new();
                for x in &left {
                    for y in &right {
                        if let Some(c) = x.merge(y) {
                            out.push(c);
                        }
                    }
                }
                self.charge(out.len())?;
                Ok(out)
            }
            Formula::Or(l, r) => {
                let mut out = self.clauses(l)?;
                out.extend(self.clauses(r)?);
                Ok(out)
            }
            Formula::Box(a, g) => single(Clause {
                boxes: BTreeMap::from([(a.clone(), vec![(**g).clone()])]),
                ..Clause::default()
            }),
            Formula::Diamond(a, g) => single(Clause {
                diamonds: BTreeMap::from([(a.clone(), vec![(**g).clone()])]),
                ..Clause::default()
            }),
            Formula::Cover(a, fs) => single(Clause {
                boxes: BTreeMap::from([(a.clone(), vec![Formula::disj(fs.iter().cloned())])]),
                diamonds: BTreeMap::from([(a.clone(), fs.iter().cloned().collect())]),
                ..Clause::default()
            }),
            Formula::Implies(..) | Formula::Iff(..) => self.clauses(&f.to_nnf()),
            Formula::AllRef(..) | Formula::SomeRef(..) => Err(NormalFormError::Quantifier(f.clone())),
        }
    }

    fn convert(&mut self, f: &Formula) -> Result<DisjunctiveForm, NormalFormError> {
        if let Some(d) = self.memo.get(f) {
            return Ok(d.clone());
        }
        let mut out: Vec<Conjunct> = Vec::new();
        for clause in self.clauses(f)? {
            let agents: BTreeSet<Agent> = clause.boxes.keys().chain(clause.diamonds.keys()).cloned().collect();
            let mut partial = vec![Conjunct {
                literals: clause.lits.clone(),
                covers: BTreeMap::new(),
            }];
            for a in agents {
                let boxes = clause.boxes.get(&a).cloned().unwrap_or_default();
                let diamonds = clause.diamonds.get(&a).cloned().unwrap_or_default();
                let all = simple_conj(boxes.iter().cloned());
                let options: Vec<Vec<DisjunctiveForm>> = if diamonds.is_empty() {
                    let mut opts = vec![Vec::new()];
                    let d = self.convert(&all)?;
                    if !d.0.is_empty() {
                        opts.push(vec![d]);
                    }
                    opts
                } else {
                    let members: BTreeSet<Formula> = diamonds
                        .iter()
                        .map(|b| simple_conj([b.clone(), all.clone()]))
                        .chain(std::iter::once(all.clone()))
                        .collect();
                    let mut converted = Vec::new();
                    for m in &members {
                        let d = self.convert(m)?;
                        if d.0.is_empty() {
                            converted.clear();
                            break;
                        }
                        converted.push(d);
                    }
                    if converted.is_empty() {
                        Vec::new()
                    } else {
                        converted.sort();
                        converted.dedup();
                        vec![converted]
                    }
                };
                let mut next = Vec::with_capacity(partial.len() * options.len());
                for c in &partial {
                    for opt in &options {
                        let mut c = c.clone();
                        c.covers.insert(a.clone(), opt.clone());
                        next.push(c);
                    }
                }
                self.charge(next.len())?;
                partial = next;
            }
            out.extend(partial);
        }
        let mut seen = BTreeSet::new();
        out.retain(|c| seen.insert(c.clone()));
        let d = DisjunctiveForm(out);
        self.memo.insert(f.clone(), d.clone());
        Ok(d)
    }
}

/// Conjunction skipping `top`.
fn simple_conj(items: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::conj(items.into_iter().filter(|f| *f != Formula::Top))
}

/// Whether `f` has the disjunctive shape: a disjunction of conjunctions of
/// literals and covers, one cover per agent, members disjunctive again.
pub fn is_disjunctive(f: &Formula) -> bool {
    let mut disjuncts = Vec::new();
    flatten_or(f, &mut disjuncts);
    disjuncts.into_iter().all(|d| {
        if *d == Formula::Bottom {
            return true;
        }
        let mut items = Vec::new();
        flatten_and(d, &mut items);
        let mut agents = BTreeSet::new();
        items.into_iter().all(|item| match item {
            Formula::Top | Formula::Prop(_) => true,
            Formula::Not(g) => matches!(**g, Formula::Prop(_)),
            Formula::Cover(a, fs) => agents.insert(a.clone()) && fs.iter().all(is_disjunctive),
            _ => false,
        })
    })
}

fn flatten_or<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Or(l, r) => {
            flatten_or(l, out);
            flatten_or(r, out);
        }
        _ => out.push(f),
    }
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(l, r) => {
            flatten_and(l, out);
            flatten_and(r, out);
        }
        _ => out.push(f),
    }
}

fn negation_of(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => (**g).clone(),
        _ => Formula::not(f.clone()),
    }
}

/// Equivalence-preserving cleanup: constant folding, flattening with
/// deduplication, complementary literals, absorption, and `<a>top` dropped
/// next to another `<a>` conjunct. A cover with a `bottom` member is
/// `bottom`.
pub fn simplify(f: &Formula) -> Formula {
    use Formula as F;
    match f {
        F::Top | F::Bottom | F::Prop(_) => f.clone(),
        F::Not(g) => match simplify(g) {
            F::Top => F::Bottom,
            F::Bottom => F::Top,
            F::Not(h) => (*h).clone(),
            g => F::not(g),
        },
        F::And(..) => {
            let mut items = Vec::new();
            flatten_and(f, &mut items);
            let items: Vec<Formula> = items.into_iter().map(simplify).collect();
            simplify_junction(items, true)
        }
        F::Or(..) => {
            let mut items = Vec::new();
            flatten_or(f, &mut items);
            let items: Vec<Formula> = items.into_iter().map(simplify).collect();
            simplify_junction(items, false)
        }
        F::Implies(l, r) => match (simplify(l), simplify(r)) {
            (F::Bottom, _) | (_, F::Top) => F::Top,
            (F::Top, r) => r,
            (l, F::Bottom) => simplify(&F::not(l)),
            (l, r) if l == r => F::Top,
            (l, r) => F::implies(l, r),
        },
        F::Iff(l, r) => match (simplify(l), simplify(r)) {
            (F::Top, x) | (x, F::Top) => x,
            (F::Bottom, x) | (x, F::Bottom) => simplify(&F::not(x)),
            (l, r) if l == r => F::Top,
            (l, r) => F::iff(l, r),
        },
        F::Box(a, g) => match simplify(g) {
            F::Top => F::Top,
            g => F::boxed(a.clone(), g),
        },
        F::Diamond(a, g) => match simplify(g) {
            F::Bottom => F::Bottom,
            g => F::diamond(a.clone(), g),
        },
        F::Cover(a, fs) => {
            let members: Vec<Formula> = fs.iter().map(simplify).collect();
            if members.contains(&F::Bottom) {
                F::Bottom
            } else {
                F::Cover(a.clone(), FormulaSet::new(members))
            }
        }
        F::AllRef(a, g) => match simplify(g) {
            g @ (F::Top | F::Bottom) => g,
            g => F::all_ref(a.clone(), g),
        },
        F::SomeRef(a, g) => match simplify(g) {
            g @ (F::Top | F::Bottom) => g,
            g => F::some_ref(a.clone(), g),
        },
    }
}

fn simplify_junction(items: Vec<Formula>, conj: bool) -> Formula {
    let (unit, zero) = if conj {
        (Formula::Top, Formula::Bottom)
    } else {
        (Formula::Bottom, Formula::Top)
    };
    let mut flat = Vec::new();
    for item in items {
        let mut parts = Vec::new();
        if conj {
            flatten_and(&item, &mut parts);
        } else {
            flatten_or(&item, &mut parts);
        }
        flat.extend(parts.into_iter().cloned());
    }
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    for item in flat {
        if item == zero {
            return zero;
        }
        if item != unit && seen.insert(item.clone()) {
            kept.push(item);
        }
    }
    if kept.iter().any(|x| seen.contains(&negation_of(x))) {
        return zero;
    }
    // Absorption: x & (x | y) == x, and dually.
    let dual_parts = |f: &Formula| {
        let mut parts = Vec::new();
        if conj {
            flatten_or(f, &mut parts);
        } else {
            flatten_and(f, &mut parts);
        }
        parts.len() > 1 && parts.iter().any(|p| seen.contains(*p))
    };
    kept.retain(|x| !dual_parts(x));
    if conj {
        let with_diamond: BTreeSet<Agent> = kept
            .iter()
            .filter_map(|x| match x {
                Formula::Diamond(a, g) if **g != Formula::Top => Some(a.clone()),
                _ => None,
            })
            .collect();
        kept.retain(|x| !matches!(x, Formula::Diamond(a, g) if **g == Formula::Top && with_diamond.contains(a)));
    }
    if conj {
        Formula::conj(kept)
    } else {
        Formula::disj(kept)
    }
}
