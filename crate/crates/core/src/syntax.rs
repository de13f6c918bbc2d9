//! IMP abstract syntax: operators, sorts, terms, variable universes and states.
//!
//! A [`Term`] is an immutable, cheaply clonable tree. Construction always goes
//! through [`Term::new`], which enforces operator arity and the sort discipline
//! of the IMP grammar, so every `Term` in circulation is well-sorted.
//!
//! The dummy syntax of complete binary forms (`nop` and the leaf `•`, spelled
//! `null` in prefix form) is part of the same term type. A nullary or unary
//! operator may be *widened* to two children, in which case every extra slot
//! must hold a Null-sorted subterm.

use alloc::{
    string::{String, ToString},
    sync::Arc,
    vec,
    vec::Vec,
};
use core::fmt;

use num_bigint::BigInt;
use thiserror::Error;

/// Index of a variable in a [`VarUniverse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Operator tags of IMP plus the dummy syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// The dummy leaf `•`.
    Null,
    /// The dummy binary operator.
    Nop,
    True,
    False,
    Not,
    And,
    Lt,
    Eq,
    Zero,
    One,
    Var(VarId),
    Plus,
    Minus,
    Times,
    Div,
    Assign,
    Seq,
    If,
    While,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Boolean,
    Expression,
    Variable,
    Statement,
    Null,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Boolean => "Boolean",
            Sort::Expression => "Expression",
            Sort::Variable => "Variable",
            Sort::Statement => "Statement",
            Sort::Null => "Null",
        })
    }
}

/// What an operand position of an operator accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Boolean,
    /// Expressions, including bare variables.
    Expression,
    /// Exactly a variable (assignment target).
    Variable,
    Statement,
    /// Dummy-only operand (`nop` children and widened slots).
    Null,
}

impl Slot {
    pub fn accepts(self, sort: Sort) -> bool {
        match self {
            Slot::Boolean => sort == Sort::Boolean,
            Slot::Expression => matches!(sort, Sort::Expression | Sort::Variable),
            Slot::Variable => sort == Sort::Variable,
            Slot::Statement => sort == Sort::Statement,
            Slot::Null => sort == Sort::Null,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Boolean => "Boolean",
            Slot::Expression => "Expression",
            Slot::Variable => "Variable",
            Slot::Statement => "Statement",
            Slot::Null => "Null",
        })
    }
}

/// Number of fixed operator codes; variable `i` is coded as `OP_CODES + i`.
pub const OP_CODES: u32 = 18;

const FIXED_OPS: [Op; OP_CODES as usize] = [
    Op::Null,
    Op::Nop,
    Op::True,
    Op::False,
    Op::Not,
    Op::And,
    Op::Lt,
    Op::Eq,
    Op::Zero,
    Op::One,
    Op::Plus,
    Op::Minus,
    Op::Times,
    Op::Div,
    Op::Assign,
    Op::Seq,
    Op::If,
    Op::While,
];

impl Op {
    /// Arity in the IMP grammar (before any widening).
    pub fn arity(self) -> usize {
        self.slots().len()
    }

    pub fn sort(self) -> Sort {
        match self {
            Op::Null | Op::Nop => Sort::Null,
            Op::True | Op::False | Op::Not | Op::And | Op::Lt | Op::Eq => Sort::Boolean,
            Op::Zero | Op::One | Op::Plus | Op::Minus | Op::Times | Op::Div => Sort::Expression,
            Op::Var(_) => Sort::Variable,
            Op::Assign | Op::Seq | Op::If | Op::While => Sort::Statement,
        }
    }

    /// Operand requirements in order.
    pub fn slots(self) -> &'static [Slot] {
        use Slot::*;
        match self {
            Op::Null | Op::True | Op::False | Op::Zero | Op::One | Op::Var(_) => &[],
            Op::Nop => &[Null, Null],
            Op::Not => &[Boolean],
            Op::And => &[Boolean, Boolean],
            Op::Lt | Op::Eq | Op::Plus | Op::Minus | Op::Times | Op::Div => &[Expression, Expression],
            Op::Assign => &[Variable, Expression],
            Op::Seq => &[Statement, Statement],
            Op::If | Op::While => &[Boolean, Statement],
        }
    }

    /// `nop` or `•`.
    pub fn is_dummy(self) -> bool {
        matches!(self, Op::Null | Op::Nop)
    }

    /// Whether the operator may be widened to two children in a binform.
    pub fn is_widenable(self) -> bool {
        self.arity() < 2 && self != Op::Null
    }

    /// Stable numbering: fixed operators take `0..OP_CODES`, variable `i` takes
    /// `OP_CODES + i`.
    pub fn code(self) -> u32 {
        match self {
            Op::Var(v) => OP_CODES + v.0,
            op => FIXED_OPS.iter().position(|o| *o == op).unwrap() as u32,
        }
    }

    pub fn from_code(code: u32) -> Op {
        if code < OP_CODES {
            FIXED_OPS[code as usize]
        } else {
            Op::Var(VarId(code - OP_CODES))
        }
    }

    /// Canonical spelling in prefix form; `None` for variables.
    pub fn prefix_name(self) -> Option<&'static str> {
        Some(match self {
            Op::Null => "null",
            Op::Nop => "nop",
            Op::True => "true",
            Op::False => "false",
            Op::Not => "not",
            Op::And => "and",
            Op::Lt => "<",
            Op::Eq => "=",
            Op::Zero => "0",
            Op::One => "1",
            Op::Plus => "+",
            Op::Minus => "-",
            Op::Times => "*",
            Op::Div => "/",
            Op::Assign => ":=",
            Op::Seq => "seq",
            Op::If => "if",
            Op::While => "while",
            Op::Var(_) => return None,
        })
    }

    /// Inverse of [`Op::prefix_name`] for the fixed operators.
    pub fn from_prefix_name(name: &str) -> Option<Op> {
        FIXED_OPS.iter().copied().find(|op| op.prefix_name() == Some(name))
    }

    /// Spelling in the applicative notation (`+(1, x)`, `nop(•, •)`).
    pub fn symbol(self) -> Option<&'static str> {
        Some(match self {
            Op::Null => "•",
            Op::Minus => "−",
            Op::Times => "·",
            Op::And => "∧",
            Op::Not => "!",
            Op::Seq => ";",
            op => return op.prefix_name(),
        })
    }
}

/// Words that can never be variable names.
pub const RESERVED: &[&str] = &[
    "true", "false", "not", "and", "seq", "if", "then", "while", "do", "nop", "null", "out", "size",
    "or",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("variable universe must not be empty")]
    Empty,
    #[error("duplicate variable `{0}`")]
    Duplicate(String),
    #[error("`{0}` is not a valid variable name")]
    InvalidName(String),
}

/// Ordered set of variable names; the order fixes state-tuple encodings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarUniverse {
    names: Arc<[String]>,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarUniverse {
    pub fn new<I, S>(names: I) -> Result<Self, UniverseError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(UniverseError::Empty);
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) || RESERVED.contains(&n.as_str()) {
                return Err(UniverseError::InvalidName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(UniverseError::Duplicate(n.clone()));
            }
        }
        Ok(VarUniverse { names: names.into() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(|i| VarId(i as u32))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len()).map(|i| VarId(i as u32))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("`{op}` takes {expected} operand(s), got {found}")]
    Arity { op: String, expected: usize, found: usize },
    #[error("operand {slot} of `{op}` must be {expected}, found {found}")]
    Mismatch { op: String, slot: usize, expected: Slot, found: Sort },
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Node {
    op: Op,
    children: Vec<Term>,
}

/// A well-sorted IMP (or binform) term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term(Arc<Node>);

fn op_label(op: Op) -> String {
    match op {
        Op::Var(v) => alloc::format!("v{}", v.0),
        op => op.prefix_name().unwrap().to_string(),
    }
}

impl Term {
    /// Builds a node, checking arity and operand sorts.
    pub fn new(op: Op, children: Vec<Term>) -> Result<Term, SortError> {
        let slots = op.slots();
        let widened = children.len() == 2 && op.is_widenable();
        if children.len() != slots.len() && !widened {
            return Err(SortError::Arity {
                op: op_label(op),
                expected: slots.len(),
                found: children.len(),
            });
        }
        for (i, child) in children.iter().enumerate() {
            let slot = slots.get(i).copied().unwrap_or(Slot::Null);
            if !slot.accepts(child.sort()) {
                return Err(SortError::Mismatch {
                    op: op_label(op),
                    slot: i,
                    expected: slot,
                    found: child.sort(),
                });
            }
        }
        Ok(Term(Arc::new(Node { op, children })))
    }

    pub fn leaf(op: Op) -> Result<Term, SortError> {
        Term::new(op, Vec::new())
    }

    pub fn var(v: VarId) -> Term {
        Term(Arc::new(Node { op: Op::Var(v), children: Vec::new() }))
    }

    pub fn one() -> Term {
        Term(Arc::new(Node { op: Op::One, children: Vec::new() }))
    }

    pub fn zero() -> Term {
        Term(Arc::new(Node { op: Op::Zero, children: Vec::new() }))
    }

    /// The dummy leaf `•`.
    pub fn null() -> Term {
        Term(Arc::new(Node { op: Op::Null, children: Vec::new() }))
    }

    pub fn binary(op: Op, left: Term, right: Term) -> Result<Term, SortError> {
        Term::new(op, vec![left, right])
    }

    pub fn op(&self) -> Op {
        self.0.op
    }

    pub fn children(&self) -> &[Term] {
        &self.0.children
    }

    pub fn child(&self, i: usize) -> Option<&Term> {
        self.0.children.get(i)
    }

    pub fn sort(&self) -> Sort {
        self.0.op.sort()
    }

    /// An operator carrying more children than its IMP arity.
    pub fn is_widened(&self) -> bool {
        self.children().len() > self.op().arity()
    }

    /// Number of nodes, dummy nodes included.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Term::size).sum::<usize>()
    }

    /// Height, with a lone leaf at height 0.
    pub fn height(&self) -> usize {
        self.children().iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// True iff the term mentions `nop`, `•`, or a widened operator.
    pub fn has_dummy_syntax(&self) -> bool {
        self.op().is_dummy() || self.is_widened() || self.children().iter().any(Term::has_dummy_syntax)
    }

    pub fn contains_op(&self, pred: &dyn Fn(Op) -> bool) -> bool {
        pred(self.op()) || self.children().iter().any(|c| c.contains_op(pred))
    }

    /// Every node has zero or two children and all leaves sit at the same depth.
    pub fn is_complete_binary(&self) -> bool {
        fn go(t: &Term, depth: usize, leaf_depth: &mut Option<usize>) -> bool {
            match t.children().len() {
                0 => *leaf_depth.get_or_insert(depth) == depth,
                2 => t.children().iter().all(|c| go(c, depth + 1, leaf_depth)),
                _ => false,
            }
        }
        go(self, 0, &mut None)
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<VarId> {
        let here = match self.op() {
            Op::Var(v) => Some(v),
            _ => None,
        };
        self.children().iter().filter_map(Term::max_var).chain(here).max()
    }

    /// Canonical prefix form, e.g. `(+ (+ 1 x) 1)`.
    pub fn prefix<'a>(&'a self, universe: &'a VarUniverse) -> Prefix<'a> {
        Prefix { term: self, universe }
    }

    /// Applicative notation, e.g. `+(+(1(•, •), x(•, •)), 1(nop(•, •), nop(•, •)))`.
    pub fn applicative<'a>(&'a self, universe: &'a VarUniverse) -> Applicative<'a> {
        Applicative { term: self, universe }
    }

    /// Pre-order listing of the nodes.
    pub fn preorder(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(t.children().iter().rev());
        }
        out
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", op_label(self.op()))?;
        if !self.children().is_empty() {
            f.debug_list().entries(self.children()).finish()?;
        }
        Ok(())
    }
}

pub struct Prefix<'a> {
    term: &'a Term,
    universe: &'a VarUniverse,
}

fn write_op(f: &mut fmt::Formatter<'_>, op: Op, universe: &VarUniverse) -> fmt::Result {
    match op {
        Op::Var(v) if v.index() < universe.len() => f.write_str(universe.name(v)),
        Op::Var(v) => write!(f, "?v{}", v.0),
        op => f.write_str(op.prefix_name().unwrap()),
    }
}

impl fmt::Display for Prefix<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.term;
        if t.children().is_empty() {
            return write_op(f, t.op(), self.universe);
        }
        f.write_str("(")?;
        write_op(f, t.op(), self.universe)?;
        for c in t.children() {
            write!(f, " {}", c.prefix(self.universe))?;
        }
        f.write_str(")")
    }
}

pub struct Applicative<'a> {
    term: &'a Term,
    universe: &'a VarUniverse,
}

impl fmt::Display for Applicative<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.term;
        match t.op() {
            Op::Var(v) => f.write_str(self.universe.name(v))?,
            op => f.write_str(op.symbol().unwrap())?,
        }
        if let [first, rest @ ..] = t.children() {
            write!(f, "({}", first.applicative(self.universe))?;
            for c in rest {
                write!(f, ", {}", c.applicative(self.universe))?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Program state: the dummy value ∅, or a total map from the universe to integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Empty,
    Vals(Vec<BigInt>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` assigned twice")]
    Duplicate(String),
    #[error("variable `{0}` has no value")]
    Missing(String),
    #[error("malformed binding `{0}`")]
    Malformed(String),
    #[error("expected {expected} value(s), got {found}")]
    Length { expected: usize, found: usize },
}

impl State {
    pub fn new(universe: &VarUniverse, values: Vec<BigInt>) -> Result<State, StateError> {
        if values.len() != universe.len() {
            return Err(StateError::Length { expected: universe.len(), found: values.len() });
        }
        Ok(State::Vals(values))
    }

    pub fn zeros(universe: &VarUniverse) -> State {
        State::Vals(vec![BigInt::from(0); universe.len()])
    }

    pub fn from_ints(values: &[i64]) -> State {
        State::Vals(values.iter().map(|v| BigInt::from(*v)).collect())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, State::Empty)
    }

    pub fn get(&self, v: VarId) -> Option<&BigInt> {
        match self {
            State::Empty => None,
            State::Vals(vals) => vals.get(v.index()),
        }
    }

    /// Functional update; ∅ stays ∅.
    pub fn with(&self, v: VarId, value: BigInt) -> State {
        match self {
            State::Empty => State::Empty,
            State::Vals(vals) => {
                let mut vals = vals.clone();
                vals[v.index()] = value;
                State::Vals(vals)
            }
        }
    }

    pub fn values(&self) -> Option<&[BigInt]> {
        match self {
            State::Empty => None,
            State::Vals(v) => Some(v),
        }
    }

    /// Parses `x=3,y=-1`; every variable of the universe must be bound.
    pub fn parse(text: &str, universe: &VarUniverse) -> Result<State, StateError> {
        let mut vals: Vec<Option<BigInt>> = vec![None; universe.len()];
        for binding in text.split(',').map(str::trim).filter(|b| !b.is_empty()) {
            let (name, value) =
                binding.split_once('=').ok_or_else(|| StateError::Malformed(binding.to_string()))?;
            let (name, value) = (name.trim(), value.trim());
            let v = universe.lookup(name).ok_or_else(|| StateError::UnknownVariable(name.to_string()))?;
            let value: BigInt =
                value.parse().map_err(|_| StateError::Malformed(binding.to_string()))?;
            if vals[v.index()].replace(value).is_some() {
                return Err(StateError::Duplicate(name.to_string()));
            }
        }
        vals.into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| StateError::Missing(universe.names()[i].clone())))
            .collect::<Result<Vec<_>, _>>()
            .map(State::Vals)
    }

    /// `x=3,y=0`, or `∅`.
    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> StateDisplay<'a> {
        StateDisplay { state: self, universe }
    }
}

pub struct StateDisplay<'a> {
    state: &'a State,
    universe: &'a VarUniverse,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.state {
            State::Empty => f.write_str("∅"),
            State::Vals(vals) => {
                for (i, v) in vals.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match self.universe.names().get(i) {
                        Some(name) => write!(f, "{name}={v}")?,
                        None => write!(f, "?v{i}={v}")?,
                    }
                }
                Ok(())
            }
        }
    }
}
