//! Fuel-bounded big-step semantics.
//!
//! Cost model: every evaluated node costs one unit, and every completed loop
//! iteration costs one more. Nodes that are never evaluated cost nothing: the
//! operands of `nop`, the dummy operands of widened operators, and the target
//! of an assignment. Hence padding a term with dummy syntax never changes its
//! cost.
//!
//! Evaluation is strict and left to right; `and` does not short-circuit.
//! Division truncates toward zero and faults on a zero divisor. The dummy
//! value ∅ is produced by `nop` and `•`, and by any term run on the ∅ state;
//! an operator yields ∅ when any operand it evaluates does.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::syntax::{Op, State, Term, VarUniverse};

pub type Fuel = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    DivByZero,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::DivByZero => f.write_str("div0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EvalOutcome {
    Value(BigInt),
    Bool(bool),
    StateOut(State),
    Dummy,
    FuelExhausted,
    Fault(Fault),
}

impl EvalOutcome {
    pub fn is_exhausted(&self) -> bool {
        matches!(self, EvalOutcome::FuelExhausted)
    }

    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> OutcomeDisplay<'a> {
        OutcomeDisplay { outcome: self, universe }
    }
}

pub struct OutcomeDisplay<'a> {
    outcome: &'a EvalOutcome,
    universe: &'a VarUniverse,
}

impl fmt::Display for OutcomeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            EvalOutcome::Value(v) => write!(f, "value: {v}"),
            EvalOutcome::Bool(b) => write!(f, "value: {b}"),
            EvalOutcome::StateOut(s) => write!(f, "state: {}", s.display(self.universe)),
            EvalOutcome::Dummy => f.write_str("dummy"),
            EvalOutcome::FuelExhausted => f.write_str("fuel-exhausted"),
            EvalOutcome::Fault(x) => write!(f, "fault: {x}"),
        }
    }
}

/// Why evaluation stopped without a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stop {
    FuelExhausted,
    Fault(Fault),
}

/// Intermediate result of evaluating a subterm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Val {
    Int(BigInt),
    Bool(bool),
    State(State),
    Dummy,
}

impl From<Val> for EvalOutcome {
    fn from(v: Val) -> Self {
        match v {
            Val::Int(i) => EvalOutcome::Value(i),
            Val::Bool(b) => EvalOutcome::Bool(b),
            Val::State(State::Empty) | Val::Dummy => EvalOutcome::Dummy,
            Val::State(s) => EvalOutcome::StateOut(s),
        }
    }
}

impl From<Stop> for EvalOutcome {
    fn from(s: Stop) -> Self {
        match s {
            Stop::FuelExhausted => EvalOutcome::FuelExhausted,
            Stop::Fault(f) => EvalOutcome::Fault(f),
        }
    }
}

/// Fuel meter shared by the interpreter and the value-tree builder.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Meter {
    pub left: Fuel,
}

impl Meter {
    pub fn tick(&mut self) -> Result<(), Stop> {
        if self.left == 0 {
            return Err(Stop::FuelExhausted);
        }
        self.left -= 1;
        Ok(())
    }
}

pub(crate) fn arith(op: Op, a: &BigInt, b: &BigInt) -> Result<Val, Stop> {
    Ok(match op {
        Op::Plus => Val::Int(a + b),
        Op::Minus => Val::Int(a - b),
        Op::Times => Val::Int(a * b),
        Op::Div if b.is_zero() => return Err(Stop::Fault(Fault::DivByZero)),
        Op::Div => Val::Int(a / b),
        Op::Lt => Val::Bool(a < b),
        Op::Eq => Val::Bool(a == b),
        _ => unreachable!("not an arithmetic operator"),
    })
}

/// Value of a nullary operator (or a widened one, whose operands are ignored).
pub(crate) fn leaf_value(op: Op, sigma: &State) -> Val {
    match op {
        Op::True => Val::Bool(true),
        Op::False => Val::Bool(false),
        Op::Zero => Val::Int(BigInt::zero()),
        Op::One => Val::Int(BigInt::from(1)),
        Op::Var(v) => match sigma.get(v) {
            Some(x) => Val::Int(x.clone()),
            None => Val::Dummy,
        },
        Op::Null => Val::Dummy,
        _ => unreachable!("not a leaf operator"),
    }
}

pub(crate) fn eval_in(t: &Term, sigma: &State, m: &mut Meter) -> Result<Val, Stop> {
    m.tick()?;
    if sigma.is_empty() {
        return Ok(Val::Dummy);
    }
    let op = t.op();
    let kids = t.children();
    match op {
        Op::Nop | Op::Null => Ok(Val::Dummy),
        Op::True | Op::False | Op::Zero | Op::One | Op::Var(_) => Ok(leaf_value(op, sigma)),
        Op::Not => match eval_in(&kids[0], sigma, m)? {
            Val::Bool(b) => Ok(Val::Bool(!b)),
            _ => Ok(Val::Dummy),
        },
        Op::And => {
            let a = eval_in(&kids[0], sigma, m)?;
            let b = eval_in(&kids[1], sigma, m)?;
            match (a, b) {
                (Val::Bool(a), Val::Bool(b)) => Ok(Val::Bool(a && b)),
                _ => Ok(Val::Dummy),
            }
        }
        Op::Plus | Op::Minus | Op::Times | Op::Div | Op::Lt | Op::Eq => {
            let a = eval_in(&kids[0], sigma, m)?;
            let b = eval_in(&kids[1], sigma, m)?;
            match (a, b) {
                (Val::Int(a), Val::Int(b)) => arith(op, &a, &b),
                _ => Ok(Val::Dummy),
            }
        }
        Op::Assign => {
            let Op::Var(v) = kids[0].op() else { unreachable!("assignment target is a variable") };
            match eval_in(&kids[1], sigma, m)? {
                Val::Int(x) => Ok(Val::State(sigma.with(v, x))),
                _ => Ok(Val::Dummy),
            }
        }
        Op::Seq => match eval_in(&kids[0], sigma, m)? {
            Val::State(mid) => eval_in(&kids[1], &mid, m),
            _ => Ok(Val::Dummy),
        },
        Op::If => match eval_in(&kids[0], sigma, m)? {
            Val::Bool(true) => eval_in(&kids[1], sigma, m),
            Val::Bool(false) => Ok(Val::State(sigma.clone())),
            _ => Ok(Val::Dummy),
        },
        Op::While => {
            let mut cur = sigma.clone();
            loop {
                match eval_in(&kids[0], &cur, m)? {
                    Val::Bool(true) => {}
                    Val::Bool(false) => return Ok(Val::State(cur)),
                    _ => return Ok(Val::Dummy),
                }
                match eval_in(&kids[1], &cur, m)? {
                    Val::State(next) => cur = next,
                    _ => return Ok(Val::Dummy),
                }
                m.tick()?;
            }
        }
    }
}

/// Evaluates `t` on `sigma` with at most `fuel` steps.
pub fn eval(t: &Term, sigma: &State, fuel: Fuel) -> EvalOutcome {
    eval_counted(t, sigma, fuel).0
}

/// Like [`eval`], also returning the fuel consumed.
pub fn eval_counted(t: &Term, sigma: &State, fuel: Fuel) -> (EvalOutcome, Fuel) {
    let mut m = Meter { left: fuel };
    let out = match eval_in(t, sigma, &mut m) {
        Ok(v) => v.into(),
        Err(s) => s.into(),
    };
    (out, fuel - m.left)
}

/// Whether `t` finishes on `sigma` within `n` steps (faults count as finishing).
pub fn terminate_within(t: &Term, sigma: &State, n: Fuel) -> bool {
    !eval(t, sigma, n).is_exhausted()
}

/// Why a loop produced no witness sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoopStop {
    FuelExhausted,
    Fault(Fault),
    /// The guard or body produced ∅.
    Dummy,
}

/// The states `σ0..σk` visited by `while b do s` from `sigma`: the guard holds
/// on `σ0..σ(k-1)`, fails on `σk`, and each body run maps `σi` to `σ(i+1)`.
///
/// Fuel is charged exactly as [`eval`] charges the corresponding loop, so the
/// trace exists iff the loop terminates within the same fuel.
pub fn loop_trace(b: &Term, s: &Term, sigma: &State, fuel: Fuel) -> Result<Vec<State>, LoopStop> {
    let stop = |s: Stop| match s {
        Stop::FuelExhausted => LoopStop::FuelExhausted,
        Stop::Fault(f) => LoopStop::Fault(f),
    };
    let mut m = Meter { left: fuel };
    m.tick().map_err(stop)?;
    if sigma.is_empty() {
        return Err(LoopStop::Dummy);
    }
    let mut trace = alloc::vec![sigma.clone()];
    loop {
        let cur = trace.last().unwrap();
        match eval_in(b, cur, &mut m).map_err(stop)? {
            Val::Bool(true) => {}
            Val::Bool(false) => return Ok(trace),
            _ => return Err(LoopStop::Dummy),
        }
        match eval_in(s, cur, &mut m).map_err(stop)? {
            Val::State(next) if !next.is_empty() => trace.push(next),
            _ => return Err(LoopStop::Dummy),
        }
        m.tick().map_err(stop)?;
    }
}
