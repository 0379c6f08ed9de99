//! Recursive-descent parser for formulas, terms and base formulas.
//!
//! Grammar sketch (lowest precedence first):
//!
//! ```text
//! formula  := disj ('->' formula)?
//! disj     := conj ('|' conj)*
//! conj     := unary ('&' unary)*
//! unary    := '~' unary | '(' formula ')' | term relop term
//! relop    := '>=' | '>' | '==' | '=' | '<=' | '<' | '!='
//! term     := product (('+' | '-') product)*
//! product  := factor ('*' factor)*
//! factor   := '-' factor | NUMBER | 'P' '(' event ('|' event)? ')' | '(' term ')'
//! event    := ev_disj ('->' event)?
//! ev_unary := '~' ev_unary | '[' assigns ']' ev_unary | '(' event ')'
//!           | 'top' | 'bot' | IDENT ('=' | '!=') VALUE
//! ```
//!
//! Inside `P( .. )` a top-level `|` is the conditioning bar; a disjunction
//! there has to be parenthesized.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{Atom, Event, Formula, Intervention, Prop, Term};
use crate::num::{parse_rat, Rat};
use crate::signature::Signature;
use crate::{Error, Result};

/// Result of [`parse`]: either a probabilistic formula or a base formula.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Parsed {
    Formula(Formula),
    Event(Event),
}

/// Parses a formula if the text contains a comparison, otherwise a base
/// formula. With a signature, every atom is domain-checked.
pub fn parse(text: &str, sig: Option<&Signature>) -> Result<Parsed> {
    match parse_formula(text, sig) {
        Ok(f) => Ok(Parsed::Formula(f)),
        Err(formula_err) => match parse_event(text, sig) {
            Ok(e) => Ok(Parsed::Event(e)),
            Err(Error::Syntax { .. }) => Err(formula_err),
            Err(other) => Err(other),
        },
    }
}

/// Parses a probabilistic formula.
pub fn parse_formula(text: &str, sig: Option<&Signature>) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_end()?;
    if let Some(sig) = sig {
        f.check(sig)?;
    }
    Ok(f)
}

/// Parses a base formula (the argument language of `P`).
pub fn parse_event(text: &str, sig: Option<&Signature>) -> Result<Event> {
    let mut p = Parser::new(text)?;
    let raw = p.event(true)?;
    p.expect_end()?;
    let e = raw.into_event()?;
    if let Some(sig) = sig {
        e.check(sig)?;
    }
    Ok(e)
}

/// Parses a term.
pub fn parse_term(text: &str, sig: Option<&Signature>) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect_end()?;
    if let Some(sig) = sig {
        let mut res = Ok(());
        t.for_each_event(&mut |e| {
            if res.is_ok() {
                res = e.check(sig);
            }
        });
        res?;
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Amp,
    Bar,
    Tilde,
    Arrow,
    Eq,
    EqEq,
    Neq,
    Ge,
    Gt,
    Le,
    Lt,
    Plus,
    Minus,
    Star,
    Top,
    Bot,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().expect("in bounds");
        let start = i;
        let two = text.get(i..i + 2).unwrap_or("");
        let three = text.get(i..i + 3).unwrap_or("");
        let (tok, len) = if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'') {
                j += 1;
            }
            let word = &text[i..j];
            let tok = match word {
                "top" => Tok::Top,
                "bot" => Tok::Bot,
                _ => Tok::Ident(word.to_string()),
            };
            (tok, j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < bytes.len() && (bytes[j] == b'/' || bytes[j] == b'.') && bytes[j + 1].is_ascii_digit() {
                j += 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
            }
            (Tok::Number(text[i..j].to_string()), j - i)
        } else if three == "<->" {
            return Err(syntax(i, "`<->` is not supported; use two implications"));
        } else {
            match two {
                "->" => (Tok::Arrow, 2),
                "==" => (Tok::EqEq, 2),
                "!=" => (Tok::Neq, 2),
                ">=" => (Tok::Ge, 2),
                "<=" => (Tok::Le, 2),
                _ => {
                    let tok = match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        ',' => Tok::Comma,
                        '&' | '∧' => Tok::Amp,
                        '|' | '∨' => Tok::Bar,
                        '~' | '¬' => Tok::Tilde,
                        '→' => Tok::Arrow,
                        '=' => Tok::Eq,
                        '≠' => Tok::Neq,
                        '≥' => Tok::Ge,
                        '≤' => Tok::Le,
                        '≡' => Tok::EqEq,
                        '>' => Tok::Gt,
                        '<' => Tok::Lt,
                        '+' => Tok::Plus,
                        '-' | '−' => Tok::Minus,
                        '*' | '·' => Tok::Star,
                        '⊤' => Tok::Top,
                        '⊥' => Tok::Bot,
                        _ => return Err(syntax(i, alloc::format!("unexpected character `{c}`"))),
                    };
                    (tok, c.len_utf8())
                }
            }
        };
        out.push(Token { tok, pos: start });
        i += len;
    }
    out.push(Token { tok: Tok::End, pos: text.len() });
    Ok(out)
}

/// Base formula before the box-free parts are folded into propositions.
#[derive(Clone, Debug)]
enum Raw {
    Top,
    Bot,
    Atom(Atom, bool),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Box(Intervention, Box<Raw>, usize),
}

impl Raw {
    fn has_box(&self) -> bool {
        match self {
            Raw::Top | Raw::Bot | Raw::Atom(..) => false,
            Raw::Not(x) => x.has_box(),
            Raw::And(a, b) | Raw::Or(a, b) | Raw::Implies(a, b) => a.has_box() || b.has_box(),
            Raw::Box(..) => true,
        }
    }

    fn into_prop(self) -> Result<Prop> {
        Ok(match self {
            Raw::Top => Prop::Top,
            Raw::Bot => Prop::Bot,
            Raw::Atom(a, true) => Prop::Atom(a),
            Raw::Atom(a, false) => Prop::Atom(a).not(),
            Raw::Not(x) => x.into_prop()?.not(),
            Raw::And(a, b) => a.into_prop()?.and(b.into_prop()?),
            Raw::Or(a, b) => a.into_prop()?.or(b.into_prop()?),
            Raw::Implies(a, b) => a.into_prop()?.and(b.into_prop()?.not()).not(),
            Raw::Box(_, _, p) => return Err(syntax(p, "nested intervention")),
        })
    }

    fn into_event(self) -> Result<Event> {
        if !self.has_box() {
            return Ok(Event::prop(self.into_prop()?));
        }
        Ok(match self {
            Raw::Box(alpha, inner, _) => Event::Cond(alpha, inner.into_prop()?),
            Raw::Not(x) => x.into_event()?.not(),
            Raw::And(a, b) => a.into_event()?.and(b.into_event()?),
            Raw::Or(a, b) => a.into_event()?.or(b.into_event()?),
            Raw::Implies(a, b) => a.into_event()?.and(b.into_event()?.not()).not(),
            Raw::Top | Raw::Bot | Raw::Atom(..) => unreachable!("box-free case handled above"),
        })
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { tokens: lex(text)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(syntax(self.pos(), alloc::format!("expected {what}")))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(syntax(self.pos(), "unexpected trailing input"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Bar) {
            f = f.or(self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Tilde) {
            return Ok(self.unary()?.not());
        }
        if *self.peek() == Tok::LParen {
            let save = self.at;
            self.bump();
            if let Ok(f) = self.formula() {
                if self.eat(&Tok::RParen) && !continues_term(self.peek()) {
                    return Ok(f);
                }
            }
            self.at = save;
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let pos = self.pos();
        let op = self.bump();
        let rhs = self.term()?;
        Ok(match op {
            Tok::Ge => Formula::Geq(lhs, rhs),
            Tok::Gt => Formula::Gt(lhs, rhs),
            Tok::Eq | Tok::EqEq => Formula::Equiv(lhs, rhs),
            Tok::Le => Formula::Geq(rhs, lhs),
            Tok::Lt => Formula::Gt(rhs, lhs),
            Tok::Neq => Formula::Equiv(lhs, rhs).not(),
            _ => return Err(syntax(pos, "expected a comparison operator")),
        })
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                t = t.add(self.product()?);
            } else if self.eat(&Tok::Minus) {
                t = t.sub(self.product()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        while self.eat(&Tok::Star) {
            t = t.mul(self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Minus => {
                if let Tok::Number(n) = self.peek().clone() {
                    self.bump();
                    return Ok(Term::Const(-number(&n, pos)?));
                }
                Ok(self.factor()?.neg())
            }
            Tok::Number(n) => Ok(Term::Const(number(&n, pos)?)),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(name) if name == "P" => {
                self.expect(Tok::LParen, "`(` after P")?;
                let e = self.event(false)?.into_event()?;
                let t = if self.eat(&Tok::Bar) {
                    let g = self.event(false)?.into_event()?;
                    Term::CondProb(e, g)
                } else {
                    Term::Prob(e)
                };
                self.expect(Tok::RParen, "`)` closing P")?;
                Ok(t)
            }
            _ => Err(syntax(pos, "expected a term")),
        }
    }

    /// `allow_bar` is false directly inside `P(...)`, where `|` conditions.
    fn event(&mut self, allow_bar: bool) -> Result<Raw> {
        let lhs = self.ev_disj(allow_bar)?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.event(allow_bar)?;
            return Ok(Raw::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn ev_disj(&mut self, allow_bar: bool) -> Result<Raw> {
        let mut e = self.ev_conj()?;
        while allow_bar && self.eat(&Tok::Bar) {
            e = Raw::Or(Box::new(e), Box::new(self.ev_conj()?));
        }
        Ok(e)
    }

    fn ev_conj(&mut self) -> Result<Raw> {
        let mut e = self.ev_unary()?;
        while self.eat(&Tok::Amp) {
            e = Raw::And(Box::new(e), Box::new(self.ev_unary()?));
        }
        Ok(e)
    }

    fn ev_unary(&mut self) -> Result<Raw> {
        let pos = self.pos();
        match self.bump() {
            Tok::Tilde => Ok(Raw::Not(Box::new(self.ev_unary()?))),
            Tok::LParen => {
                let e = self.event(true)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBracket => {
                let alpha = self.assignments()?;
                let inner = self.ev_unary()?;
                Ok(Raw::Box(alpha, Box::new(inner), pos))
            }
            Tok::Top => Ok(Raw::Top),
            Tok::Bot => Ok(Raw::Bot),
            Tok::Ident(var) if var != "P" => {
                let positive = match self.bump() {
                    Tok::Eq => true,
                    Tok::Neq => false,
                    _ => return Err(syntax(self.pos(), "expected `=` or `!=` after variable")),
                };
                let value = self.value()?;
                Ok(Raw::Atom(Atom::new(var, value), positive))
            }
            _ => Err(syntax(pos, "expected a base formula")),
        }
    }

    fn value(&mut self) -> Result<String> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(v) => Ok(v),
            Tok::Number(n) if n.bytes().all(|b| b.is_ascii_digit()) => Ok(n),
            Tok::Minus => match self.bump() {
                Tok::Number(n) if n.bytes().all(|b| b.is_ascii_digit()) => Ok(alloc::format!("-{n}")),
                _ => Err(syntax(pos, "expected a value")),
            },
            _ => Err(syntax(pos, "expected a value")),
        }
    }

    /// Parses the assignments of `[ .. ]` after the opening bracket.
    fn assignments(&mut self) -> Result<Intervention> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        if self.eat(&Tok::RBracket) {
            return Ok(Intervention::top());
        }
        if self.eat(&Tok::Top) {
            self.expect(Tok::RBracket, "`]`")?;
            return Ok(Intervention::top());
        }
        loop {
            let pos = self.pos();
            let var = match self.bump() {
                Tok::Ident(v) if v != "P" => v,
                _ => return Err(syntax(pos, "expected a variable in intervention")),
            };
            self.expect(Tok::Eq, "`=` in intervention")?;
            let value = self.value()?;
            if pairs.iter().any(|(v, x)| *v == var && *x != value) {
                return Err(Error::DuplicateAssignment(var));
            }
            pairs.push((var, value));
            if self.eat(&Tok::Comma) || self.eat(&Tok::Amp) {
                continue;
            }
            self.expect(Tok::RBracket, "`]` or `,`")?;
            return Intervention::new(pairs);
        }
    }
}

fn continues_term(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Plus | Tok::Minus | Tok::Star | Tok::Ge | Tok::Gt | Tok::Le | Tok::Lt | Tok::Eq | Tok::EqEq | Tok::Neq
    )
}

fn number(text: &str, pos: usize) -> Result<Rat> {
    parse_rat(text).ok_or_else(|| syntax(pos, alloc::format!("bad number `{text}`")))
}
