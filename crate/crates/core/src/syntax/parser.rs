//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! iff   := imp ("<->" imp)*
//! imp   := or ("->" imp)?
//! or    := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := "~" unary | "[" agent "]" unary | "<" agent ">" unary
//!        | ("A_" | "forall_" | "E_" | "exists_") agent unary
//!        | ("A" | "forall" | "E" | "exists") unary
//!        | "nabla_" agent "{" (iff ("," iff)*)? "}"
//!        | "top" | "bottom" | prop | "(" iff ")"
//! ```
//!
//! A bare quantifier (`E φ`, `A φ`) stands for the stack of single-agent
//! quantifiers over every agent in the agent universe.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{Agent, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

fn expected_list(items: &[String]) -> String {
    match items {
        [] => "nothing".into(),
        [one] => one.clone(),
        _ => format!("one of {}", items.join(", ")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Imp,
    Iff,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Not => "`~`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Imp => "`->`",
            Tok::Iff => "`<->`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            let t = match c {
                '~' | '!' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '<' => Tok::LAngle,
                '>' => Tok::RAngle,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                other => {
                    return Err(ParseError {
                        line: l0,
                        column: c0,
                        found: format!("`{other}`"),
                        expected: vec!["a formula token".into()],
                    })
                }
            };
            (t, 1)
        };
        out.push(Spanned { tok, line: l0, column: c0 });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QuantKind {
    All,
    Some,
}

/// How an identifier token is read in prefix position.
enum Word<'a> {
    Top,
    Bottom,
    Quant(QuantKind, Option<&'a str>),
    Nabla(&'a str),
    Prop(&'a str),
}

fn classify(word: &str) -> Word<'_> {
    match word {
        "top" => return Word::Top,
        "bottom" => return Word::Bottom,
        "A" | "forall" => return Word::Quant(QuantKind::All, None),
        "E" | "exists" => return Word::Quant(QuantKind::Some, None),
        _ => {}
    }
    for (prefix, kind) in [
        ("A_", QuantKind::All),
        ("forall_", QuantKind::All),
        ("E_", QuantKind::Some),
        ("exists_", QuantKind::Some),
    ] {
        if let Some(agent) = word.strip_prefix(prefix) {
            if !agent.is_empty() {
                return Word::Quant(kind, Some(agent));
            }
        }
    }
    if let Some(agent) = word.strip_prefix("nabla_") {
        if !agent.is_empty() {
            return Word::Nabla(agent);
        }
    }
    Word::Prop(word)
}

/// Agents named anywhere in the token stream.
fn mentioned_agents(toks: &[Spanned]) -> BTreeSet<Agent> {
    let mut out = BTreeSet::new();
    for w in toks.windows(3) {
        if let [Spanned { tok: open, .. }, Spanned { tok: Tok::Ident(name), .. }, Spanned { tok: close, .. }] = w {
            if matches!((open, close), (Tok::LBrack, Tok::RBrack) | (Tok::LAngle, Tok::RAngle)) {
                out.insert(Agent::new(name));
            }
        }
    }
    for t in toks {
        if let Tok::Ident(word) = &t.tok {
            match classify(word) {
                Word::Quant(_, Some(a)) | Word::Nabla(a) => {
                    out.insert(Agent::new(a));
                }
                _ => {}
            }
        }
    }
    out
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    universe: Vec<Agent>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            column: here.column,
            found: here.tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, context: &[&str]) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(context))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent_in(&mut self, close: Tok, close_name: &str) -> Result<Agent, ParseError> {
        let name = match self.peek() {
            Tok::Ident(name) => name.clone(),
            _ => return Err(self.error(&["agent name"])),
        };
        self.bump();
        self.expect(close, &[close_name])?;
        Ok(Agent::new(name))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        const START: &[&str] = &[
            "`~`", "`[`", "`<`", "`(`", "`top`", "`bottom`", "quantifier", "`nabla_<agent>`", "proposition",
        ];
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let a = self.agent_in(Tok::RBrack, "`]`")?;
                Ok(Formula::boxed(a, self.unary()?))
            }
            Tok::LAngle => {
                self.bump();
                let a = self.agent_in(Tok::RAngle, "`>`")?;
                Ok(Formula::diamond(a, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, &["`)`", "`&`", "`|`", "`->`", "`<->`"])?;
                Ok(f)
            }
            Tok::Ident(word) => {
                let kind = match classify(&word) {
                    Word::Top => {
                        self.bump();
                        return Ok(Formula::Top);
                    }
                    Word::Bottom => {
                        self.bump();
                        return Ok(Formula::Bottom);
                    }
                    Word::Prop(p) => {
                        let f = Formula::prop(p);
                        self.bump();
                        return Ok(f);
                    }
                    Word::Nabla(a) => {
                        let a = Agent::new(a);
                        self.bump();
                        return self.cover_body(a);
                    }
                    Word::Quant(kind, agent) => (kind, agent.map(Agent::new)),
                };
                self.bump();
                let body = self.unary()?;
                let agents = match kind.1 {
                    Some(a) => vec![a],
                    None => self.universe.clone(),
                };
                Ok(agents.into_iter().rev().fold(body, |acc, a| match kind.0 {
                    QuantKind::All => Formula::all_ref(a, acc),
                    QuantKind::Some => Formula::some_ref(a, acc),
                }))
            }
            _ => Err(self.error(START)),
        }
    }

    fn cover_body(&mut self, a: Agent) -> Result<Formula, ParseError> {
        self.expect(Tok::LBrace, &["`{`"])?;
        let mut members = Vec::new();
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(Formula::cover(a, members));
        }
        loop {
            members.push(self.iff()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(Formula::cover(a, members));
                }
                _ => return Err(self.error(&["`,`", "`}`"])),
            }
        }
    }
}

/// Parses a formula. Bare `E`/`A` quantify over the agents named in `text`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with_agents(text, &BTreeSet::new())
}

/// Parses a formula; bare `E`/`A` quantify over `extra` together with every
/// agent named in `text`.
pub fn parse_with_agents(text: &str, extra: &BTreeSet<Agent>) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut universe = mentioned_agents(&toks);
    universe.extend(extra.iter().cloned());
    let mut p = Parser {
        toks,
        pos: 0,
        universe: universe.into_iter().collect(),
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["`&`", "`|`", "`->`", "`<->`", "end of input"]));
    }
    Ok(f)
}
