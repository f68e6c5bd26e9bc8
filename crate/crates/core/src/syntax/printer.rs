use std::fmt::{self, Write};

use super::{BqFormula, Formula};

// Binding strength, loosest first. Must agree with the parser.
const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Top | Formula::Bottom | Formula::Prop(_) => ATOM,
        _ => UNARY,
    }
}

fn child<W: Write>(w: &mut W, f: &Formula, parens: bool) -> fmt::Result {
    if parens {
        w.write_char('(')?;
        write_formula(w, f)?;
        w.write_char(')')
    } else {
        write_formula(w, f)
    }
}

fn binary<W: Write>(w: &mut W, l: &Formula, op: &str, r: &Formula, lvl: u8, right_assoc: bool) -> fmt::Result {
    let (lp, rp) = if right_assoc {
        (level(l) <= lvl, level(r) < lvl)
    } else {
        (level(l) < lvl, level(r) <= lvl)
    };
    child(w, l, lp)?;
    write!(w, " {op} ")?;
    child(w, r, rp)
}

pub(super) fn write_formula<W: Write>(w: &mut W, f: &Formula) -> fmt::Result {
    match f {
        Formula::Top => w.write_str("top"),
        Formula::Bottom => w.write_str("bottom"),
        Formula::Prop(p) => w.write_str(p.name()),
        Formula::Not(g) => {
            w.write_char('~')?;
            child(w, g, level(g) < UNARY)
        }
        Formula::And(l, r) => binary(w, l, "&", r, AND, false),
        Formula::Or(l, r) => binary(w, l, "|", r, OR, false),
        Formula::Implies(l, r) => binary(w, l, "->", r, IMP, true),
        Formula::Iff(l, r) => binary(w, l, "<->", r, IFF, false),
        Formula::Box(a, g) => {
            write!(w, "[{a}]")?;
            child(w, g, level(g) < UNARY)
        }
        Formula::Diamond(a, g) => {
            write!(w, "<{a}>")?;
            child(w, g, level(g) < UNARY)
        }
        Formula::AllRef(a, g) => {
            write!(w, "A_{a} ")?;
            child(w, g, level(g) < UNARY)
        }
        Formula::SomeRef(a, g) => {
            write!(w, "E_{a} ")?;
            child(w, g, level(g) < UNARY)
        }
        Formula::Cover(a, fs) => {
            write!(w, "nabla_{a} {{")?;
            for (i, m) in fs.iter().enumerate() {
                if i > 0 {
                    w.write_str(", ")?;
                }
                write_formula(w, m)?;
            }
            w.write_char('}')
        }
    }
}

fn bq_level(f: &BqFormula) -> u8 {
    match f {
        BqFormula::Iff(..) => IFF,
        BqFormula::Implies(..) => IMP,
        BqFormula::Or(..) => OR,
        BqFormula::And(..) => AND,
        BqFormula::Top | BqFormula::Bottom | BqFormula::Prop(_) => ATOM,
        _ => UNARY,
    }
}

fn bq_child<W: Write>(w: &mut W, f: &BqFormula, parens: bool) -> fmt::Result {
    if parens {
        w.write_char('(')?;
        write_bq(w, f)?;
        w.write_char(')')
    } else {
        write_bq(w, f)
    }
}

fn bq_binary<W: Write>(
    w: &mut W,
    l: &BqFormula,
    op: &str,
    r: &BqFormula,
    lvl: u8,
    right_assoc: bool,
) -> fmt::Result {
    let (lp, rp) = if right_assoc {
        (bq_level(l) <= lvl, bq_level(r) < lvl)
    } else {
        (bq_level(l) < lvl, bq_level(r) <= lvl)
    };
    bq_child(w, l, lp)?;
    write!(w, " {op} ")?;
    bq_child(w, r, rp)
}

pub(super) fn write_bq<W: Write>(w: &mut W, f: &BqFormula) -> fmt::Result {
    match f {
        BqFormula::Top => w.write_str("top"),
        BqFormula::Bottom => w.write_str("bottom"),
        BqFormula::Prop(p) => w.write_str(p.name()),
        BqFormula::Not(g) => {
            w.write_char('~')?;
            bq_child(w, g, bq_level(g) < UNARY)
        }
        BqFormula::And(l, r) => bq_binary(w, l, "&", r, AND, false),
        BqFormula::Or(l, r) => bq_binary(w, l, "|", r, OR, false),
        BqFormula::Implies(l, r) => bq_binary(w, l, "->", r, IMP, true),
        BqFormula::Iff(l, r) => bq_binary(w, l, "<->", r, IFF, false),
        BqFormula::Box(a, g) => {
            write!(w, "[{a}]")?;
            bq_child(w, g, bq_level(g) < UNARY)
        }
        BqFormula::Diamond(a, g) => {
            write!(w, "<{a}>")?;
            bq_child(w, g, bq_level(g) < UNARY)
        }
        BqFormula::BisimAll(p, g) => {
            write!(w, "BA_{p} ")?;
            bq_child(w, g, bq_level(g) < UNARY)
        }
        BqFormula::BisimSome(p, g) => {
            write!(w, "BE_{p} ")?;
            bq_child(w, g, bq_level(g) < UNARY)
        }
        BqFormula::Cover(a, fs) => {
            write!(w, "nabla_{a} {{")?;
            for (i, m) in fs.iter().enumerate() {
                if i > 0 {
                    w.write_str(", ")?;
                }
                write_bq(w, m)?;
            }
            w.write_char('}')
        }
    }
}
