//! Concrete IMP syntax.
//!
//! ```text
//! S ::= V := E | S ; S | if B then S | while B do S | ( S )
//! B ::= true | false | ! B | not B | B and B | E < E | E = E | E == E | ( B )
//! E ::= 0 | 1 | n | V | E + E | E - E | E * E | E / E | ( E )
//! ```
//!
//! Binding strength, loosest first: `;` (right-assoc), `:=`, `and`, `!`,
//! `< = ==`, `+ -`, `* /` (both left-assoc). `if`/`while` bodies extend as far
//! right as possible. A numeral `n >= 2` is sugar for `1 + 1 + ... + 1`.
//!
//! Dummy syntax and widened operators use applicative notation: `•` (or
//! `null`), `nop(a, b)`, `1(•, •)`, `x(•, •)`, `not(b, •)`. Any operator may be
//! written applicatively, e.g. `+(1, x)` or `;(s1, s2)`.

use alloc::{
    format,
    string::{String, ToString},
    vec,
    vec::Vec,
};
use core::fmt::Write;

use thiserror::Error;

use crate::syntax::{Op, SortError, Term, VarUniverse};

/// Largest numeral accepted as sugar for a sum of ones.
pub const MAX_NUMERAL: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at offset {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("ill-sorted term at offset {pos}: {source}")]
    Sort { pos: usize, source: SortError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Assign,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Eq,
    Bang,
    And,
    Bullet,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(&(_, c)) = it.peek() {
                if let Some(d) = c.to_digit(10) {
                    n = n.saturating_mul(10).saturating_add(d as u64);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Num(n), pos));
            continue;
        }
        it.next();
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '<' => Tok::Lt,
            '!' | '¬' => Tok::Bang,
            '∧' => Tok::And,
            '•' => Tok::Bullet,
            '&' if it.peek().map(|p| p.1) == Some('&') => {
                it.next();
                Tok::And
            }
            '=' => {
                if it.peek().map(|p| p.1) == Some('=') {
                    it.next();
                }
                Tok::Eq
            }
            ':' if it.peek().map(|p| p.1) == Some('=') => {
                it.next();
                Tok::Assign
            }
            c => return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{c}`") }),
        };
        out.push((tok, pos));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Sort-agnostic parse tree; variables are still names.
#[derive(Debug, Clone)]
enum Head {
    Op(Op),
    Var(String),
}

#[derive(Debug, Clone)]
struct Raw {
    head: Head,
    children: Vec<Raw>,
    pos: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

const BP_SEQ: u8 = 1;
const BP_ASSIGN: u8 = 2;
const BP_AND: u8 = 3;
const BP_NOT: u8 = 4;
const BP_CMP: u8 = 5;
const BP_ADD: u8 = 6;
const BP_MUL: u8 = 7;

fn infix(tok: &Tok) -> Option<(Op, u8)> {
    Some(match tok {
        Tok::Semi => (Op::Seq, BP_SEQ),
        Tok::Assign => (Op::Assign, BP_ASSIGN),
        Tok::And => (Op::And, BP_AND),
        Tok::Ident(s) if s == "and" => (Op::And, BP_AND),
        Tok::Lt => (Op::Lt, BP_CMP),
        Tok::Eq => (Op::Eq, BP_CMP),
        Tok::Plus => (Op::Plus, BP_ADD),
        Tok::Minus => (Op::Minus, BP_ADD),
        Tok::Star => (Op::Times, BP_MUL),
        Tok::Slash => (Op::Div, BP_MUL),
        _ => return None,
    })
}

/// Tokens that may be written applicatively as `tok(a, b)`.
fn applicative_op(tok: &Tok) -> Option<Op> {
    match tok {
        Tok::Ident(s) => match s.as_str() {
            "and" => Some(Op::And),
            "not" => Some(Op::Not),
            "seq" => Some(Op::Seq),
            "if" => Some(Op::If),
            "while" => Some(Op::While),
            _ => None,
        },
        Tok::Bang => Some(Op::Not),
        Tok::Semi | Tok::Assign | Tok::And | Tok::Lt | Tok::Eq | Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash => {
            infix(tok).map(|(op, _)| op)
        }
        _ => None,
    }
}

fn ones(n: u64, pos: usize) -> Raw {
    let one = || Raw { head: Head::Op(Op::One), children: Vec::new(), pos };
    let mut acc = one();
    for _ in 1..n {
        acc = Raw { head: Head::Op(Op::Plus), children: vec![acc, one()], pos };
    }
    acc
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Raw, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((op, bp)) = infix(self.peek()) {
            if bp < min_bp {
                break;
            }
            let pos = self.pos();
            self.bump();
            // `;` is right-assoc; comparisons do not chain; the rest are left-assoc.
            let rbp = match op {
                Op::Seq => bp,
                _ => bp + 1,
            };
            let rhs = self.expr(rbp)?;
            if op == Op::Assign && !matches!(lhs.head, Head::Var(_)) {
                return Err(ParseError::Syntax { pos: lhs.pos, msg: "assignment target must be a variable".into() });
            }
            if matches!(op, Op::Lt | Op::Eq) && matches!(self.peek(), Tok::Lt | Tok::Eq) {
                return self.err("comparisons do not chain; add parentheses");
            }
            lhs = Raw { head: Head::Op(op), children: vec![lhs, rhs], pos };
        }
        Ok(lhs)
    }

    /// `( a, b, ... )` directly after an operator token, or `None` (with the
    /// cursor restored) when the parenthesised group is not an argument list
    /// of the requested length.
    fn try_args(&mut self, counts: &[usize]) -> Result<Option<Vec<Raw>>, ParseError> {
        if *self.peek() != Tok::LParen {
            return Ok(None);
        }
        let save = self.at;
        self.bump();
        let mut args = Vec::new();
        loop {
            match self.expr(0) {
                Ok(a) => args.push(a),
                Err(e) => {
                    self.at = save;
                    return if counts.contains(&1) { Err(e) } else { Ok(None) };
                }
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    break;
                }
                _ => {
                    self.at = save;
                    return Ok(None);
                }
            }
        }
        if counts.contains(&args.len()) {
            Ok(Some(args))
        } else {
            self.at = save;
            Ok(None)
        }
    }

    fn prefix(&mut self) -> Result<Raw, ParseError> {
        let pos = self.pos();
        let tok = self.peek().clone();
        let leaf = |head| Raw { head, children: Vec::new(), pos };

        // Applicative spelling of an operator: `op(a, b)` / `not(b)`.
        if let Some(op) = applicative_op(&tok) {
            if *self.peek_at(1) == Tok::LParen {
                self.bump();
                if let Some(args) = self.try_args(&[2])? {
                    return Ok(Raw { head: Head::Op(op), children: args, pos });
                }
                self.at -= 1;
            }
        }

        match tok {
            Tok::LParen => {
                self.bump();
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Bullet => {
                self.bump();
                Ok(leaf(Head::Op(Op::Null)))
            }
            Tok::Bang => {
                self.bump();
                let b = self.expr(BP_NOT)?;
                Ok(Raw { head: Head::Op(Op::Not), children: vec![b], pos })
            }
            Tok::Num(n) => {
                self.bump();
                let base = match n {
                    0 => leaf(Head::Op(Op::Zero)),
                    1 => leaf(Head::Op(Op::One)),
                    n if n <= MAX_NUMERAL as u64 => return Ok(ones(n, pos)),
                    _ => {
                        return Err(ParseError::Syntax {
                            pos,
                            msg: format!("numeral larger than {MAX_NUMERAL}"),
                        })
                    }
                };
                self.widened(base)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => self.widened(leaf(Head::Op(Op::True))),
                    "false" => self.widened(leaf(Head::Op(Op::False))),
                    "null" => Ok(leaf(Head::Op(Op::Null))),
                    "nop" => {
                        let args = self.try_args(&[2])?;
                        match args {
                            Some(args) => Ok(Raw { head: Head::Op(Op::Nop), children: args, pos }),
                            None => self.err("expected `nop(a, b)`"),
                        }
                    }
                    "not" => {
                        let b = self.expr(BP_NOT)?;
                        Ok(Raw { head: Head::Op(Op::Not), children: vec![b], pos })
                    }
                    "if" | "while" => {
                        let guard = self.expr(0)?;
                        let (kw, op) = if name == "if" { ("then", Op::If) } else { ("do", Op::While) };
                        self.expect_keyword(kw)?;
                        let body = self.expr(0)?;
                        Ok(Raw { head: Head::Op(op), children: vec![guard, body], pos })
                    }
                    "and" | "then" | "do" | "seq" => {
                        Err(ParseError::Syntax { pos, msg: format!("unexpected keyword `{name}`") })
                    }
                    _ => self.widened(leaf(Head::Var(name))),
                }
            }
            Tok::End => self.err("unexpected end of input"),
            _ => self.err("expected a term"),
        }
    }

    /// A leaf optionally followed by widened operands `(a, b)`.
    fn widened(&mut self, mut leaf: Raw) -> Result<Raw, ParseError> {
        if let Some(args) = self.try_args(&[2])? {
            leaf.children = args;
        }
        Ok(leaf)
    }
}

fn elaborate(raw: Raw, universe: &VarUniverse) -> Result<Term, ParseError> {
    let op = match &raw.head {
        Head::Op(op) => *op,
        Head::Var(name) => match universe.lookup(name) {
            Some(v) => Op::Var(v),
            None => return Err(ParseError::UnknownVariable { pos: raw.pos, name: name.clone() }),
        },
    };
    let children = raw
        .children
        .into_iter()
        .map(|c| elaborate(c, universe))
        .collect::<Result<Vec<_>, _>>()?;
    Term::new(op, children).map_err(|source| ParseError::Sort { pos: raw.pos, source })
}

/// Parses concrete IMP syntax over `universe`.
pub fn parse_term(text: &str, universe: &VarUniverse) -> Result<Term, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, at: 0 };
    let raw = p.expr(0)?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    elaborate(raw, universe)
}

/// Collects identifiers in `text` that could be variables, in order of first
/// occurrence. Used to infer a universe when none is declared.
pub fn free_identifiers(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    if let Ok(toks) = tokenize(text) {
        for (tok, _) in toks {
            if let Tok::Ident(s) = tok {
                if !crate::syntax::RESERVED.contains(&s.as_str()) && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn infix_symbol(op: Op) -> Option<&'static str> {
    Some(match op {
        Op::Plus => "+",
        Op::Minus => "-",
        Op::Times => "*",
        Op::Div => "/",
        Op::Lt => "<",
        Op::Eq => "=",
        Op::And => "and",
        _ => return None,
    })
}

fn write_term(out: &mut String, t: &Term, u: &VarUniverse) {
    let name = |op: Op| -> String {
        match op {
            Op::Var(v) => u.name(v).to_string(),
            Op::Null => "•".to_string(),
            Op::Not => "not".to_string(),
            op => op.prefix_name().unwrap().to_string(),
        }
    };
    if t.is_widened() || t.op() == Op::Nop {
        out.push_str(&name(t.op()));
        out.push('(');
        for (i, c) in t.children().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_term(out, c, u);
        }
        out.push(')');
        return;
    }
    let [l, r] = match t.children() {
        [] => {
            out.push_str(&name(t.op()));
            return;
        }
        [b] => {
            out.push('!');
            write_term(out, b, u);
            return;
        }
        [l, r] => [l, r],
        _ => unreachable!("arity is at most 2"),
    };
    match t.op() {
        Op::Assign => {
            write_term(out, l, u);
            out.push_str(" := ");
            write_term(out, r, u);
        }
        Op::Seq => {
            let wrap = matches!(l.op(), Op::Seq | Op::If | Op::While) && !l.is_widened();
            if wrap {
                out.push('(');
            }
            write_term(out, l, u);
            if wrap {
                out.push(')');
            }
            out.push_str("; ");
            write_term(out, r, u);
        }
        Op::If | Op::While => {
            let (a, b) = if t.op() == Op::If { ("if ", " then ") } else { ("while ", " do ") };
            out.push_str(a);
            write_term(out, l, u);
            out.push_str(b);
            write_term(out, r, u);
        }
        op => {
            let _ = write!(out, "(");
            write_term(out, l, u);
            let _ = write!(out, " {} ", infix_symbol(op).unwrap());
            write_term(out, r, u);
            out.push(')');
        }
    }
}

/// Concrete syntax; binary expressions are fully parenthesised.
pub fn print_term(t: &Term, universe: &VarUniverse) -> String {
    let mut out = String::new();
    write_term(&mut out, t, universe);
    out
}
