//! Value trees: per-node evaluation evidence for a complete binary term, and
//! the local checks that certify it.
//!
//! A value tree has one payload per syntax node, in heap order. The payload
//! form is fixed by the node's position:
//!
//! * nodes that are never evaluated (operands of `nop`, dummy operands of
//!   widened operators, assignment targets) and dummy nodes hold `Val(∅)`;
//! * nodes that run at most once per run of the whole term hold `Val` for
//!   expressions, `StatePair` for loop-free statements and a one-element
//!   `NestedSeq` for loops;
//! * nodes below a `while`, or in the body of an `if`, may run any number of
//!   times and hold `ValSeq` or `NestedSeq` with one entry per run, in
//!   execution order.
//!
//! Each inner sequence of a statement runs from its input state to its
//! output state; it has exactly two states unless the statement is a loop,
//! in which case it lists every state the loop passes through.

use alloc::{vec, vec::Vec};
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::codec::{
    self, decode_seq, decode_state, encode_seq_compact, encode_state, heap_order, int_to_nat, nat_to_int, pair,
    unpair, BetaPair, CodecError, EncodedTree,
};
use crate::semantics::{arith, leaf_value, Fault, Fuel, Meter, Stop, Val};
use crate::syntax::{Op, Sort, State, Term, VarUniverse};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Dummy,
}

impl From<Val> for Value {
    fn from(v: Val) -> Self {
        match v {
            Val::Int(i) => Value::Int(i),
            Val::Bool(b) => Value::Bool(b),
            Val::State(_) | Val::Dummy => Value::Dummy,
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v.into())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Dummy => f.write_str("∅"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodePayload {
    Val(Value),
    ValSeq(Vec<Value>),
    StatePair(State, State),
    NestedSeq(Vec<Vec<State>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    Val,
    ValSeq,
    StatePair,
    NestedSeq,
}

impl NodePayload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            NodePayload::Val(_) => PayloadKind::Val,
            NodePayload::ValSeq(_) => PayloadKind::ValSeq,
            NodePayload::StatePair(..) => PayloadKind::StatePair,
            NodePayload::NestedSeq(_) => PayloadKind::NestedSeq,
        }
    }

    pub fn dummy() -> Self {
        NodePayload::Val(Value::Dummy)
    }

    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> PayloadDisplay<'a> {
        PayloadDisplay { payload: self, universe }
    }
}

pub struct PayloadDisplay<'a> {
    payload: &'a NodePayload,
    universe: &'a VarUniverse,
}

impl fmt::Display for PayloadDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = self.universe;
        let states = |f: &mut fmt::Formatter<'_>, ss: &[State]| -> fmt::Result {
            f.write_str("[")?;
            for (i, s) in ss.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{{{}}}", s.display(u))?;
            }
            f.write_str("]")
        };
        match self.payload {
            NodePayload::Val(v) => write!(f, "{v}"),
            NodePayload::ValSeq(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            NodePayload::StatePair(a, b) => write!(f, "({{{}}}, {{{}}})", a.display(u), b.display(u)),
            NodePayload::NestedSeq(outer) => {
                f.write_str("[")?;
                for (i, inner) in outer.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    states(f, inner)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Payloads of a complete binary term in heap order, with the input state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueTree {
    pub input: State,
    pub nodes: Vec<NodePayload>,
}

impl ValueTree {
    /// Root output: the value of an expression term or the final state of a statement.
    pub fn output(&self) -> Option<crate::semantics::EvalOutcome> {
        use crate::semantics::EvalOutcome;
        Some(match self.nodes.first()? {
            NodePayload::Val(Value::Int(i)) => EvalOutcome::Value(i.clone()),
            NodePayload::Val(Value::Bool(b)) => EvalOutcome::Bool(*b),
            NodePayload::Val(Value::Dummy) => EvalOutcome::Dummy,
            NodePayload::StatePair(_, out) => EvalOutcome::StateOut(out.clone()),
            NodePayload::NestedSeq(outer) => EvalOutcome::StateOut(outer.first()?.last()?.clone()),
            NodePayload::ValSeq(_) => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueTreeError {
    #[error("term is not a complete binary tree")]
    NotCompleteBinary,
    #[error("value tree has {found} nodes but the term has {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("evaluation fault: {0}")]
    Fault(Fault),
    #[error("input state is ∅")]
    DummyInput,
}

/// Payload forms handed to [`check_node`] do not fit the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("payload kind does not match the operator")]
pub struct KindMismatch;

/// Static role of a node inside its term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub kind: PayloadKind,
    /// Never evaluated.
    pub inert: bool,
}

/// Payload kind and evaluation role of every node, in heap order.
pub fn layout(f: &Term) -> Option<Vec<NodeInfo>> {
    let nodes = heap_order(f)?;
    let mut info = vec![NodeInfo { kind: PayloadKind::Val, inert: false }; nodes.len()];
    let mut repeated = vec![false; nodes.len()];
    for (i, t) in nodes.iter().enumerate() {
        let (inert, rep) = (info[i].inert, repeated[i]);
        info[i].kind = if inert || t.op().is_dummy() {
            PayloadKind::Val
        } else if t.sort() == Sort::Statement {
            if rep || t.op() == Op::While {
                PayloadKind::NestedSeq
            } else {
                PayloadKind::StatePair
            }
        } else if rep {
            PayloadKind::ValSeq
        } else {
            PayloadKind::Val
        };
        if t.children().is_empty() {
            continue;
        }
        for slot in 0..2 {
            let c = 2 * i + 1 + slot;
            info[c].inert = inert
                || t.op() == Op::Nop
                || slot >= t.op().arity()
                || (t.op() == Op::Assign && slot == 0);
            repeated[c] = rep || t.op() == Op::While || (t.op() == Op::If && slot == 1);
        }
    }
    Some(info)
}

fn vals(p: &NodePayload) -> Result<&[Value], KindMismatch> {
    match p {
        NodePayload::Val(v) => Ok(core::slice::from_ref(v)),
        NodePayload::ValSeq(vs) => Ok(vs),
        _ => Err(KindMismatch),
    }
}

fn acts(p: &NodePayload) -> Result<Vec<Vec<State>>, KindMismatch> {
    match p {
        NodePayload::StatePair(a, b) => Ok(vec![vec![a.clone(), b.clone()]]),
        NodePayload::NestedSeq(outer) => Ok(outer.clone()),
        _ => Err(KindMismatch),
    }
}

/// Expected value of `op` applied to operand values, with ∅ propagation.
/// `None` when no value is consistent (division by zero, ill-typed operands).
fn combine(op: Op, l: &Value, r: Option<&Value>) -> Option<Value> {
    if matches!(l, Value::Dummy) || matches!(r, Some(Value::Dummy)) {
        return Some(Value::Dummy);
    }
    match (op, l, r) {
        (Op::Not, Value::Bool(b), _) => Some(Value::Bool(!b)),
        (Op::And, Value::Bool(a), Some(Value::Bool(b))) => Some(Value::Bool(*a && *b)),
        (Op::Plus | Op::Minus | Op::Times | Op::Div | Op::Lt | Op::Eq, Value::Int(a), Some(Value::Int(b))) => {
            arith(op, a, b).ok().map(Value::from)
        }
        _ => None,
    }
}

/// Local check of an internal node against its two children.
///
/// `left_op` is the operator of the left child; it is consulted only by `:=`,
/// whose left child names the assigned variable. Leaf operators (including
/// widened ones) are checked with [`check_leaf`].
pub fn check_node(
    op: Op,
    left_op: Op,
    parent: &NodePayload,
    left: &NodePayload,
    right: &NodePayload,
) -> Result<bool, KindMismatch> {
    match op {
        Op::Nop => {
            vals(parent)?;
            vals(left)?;
            vals(right)?;
            let dummy = NodePayload::dummy();
            Ok(*parent == dummy && *left == dummy && *right == dummy)
        }
        Op::Not | Op::And | Op::Plus | Op::Minus | Op::Times | Op::Div | Op::Lt | Op::Eq => {
            let (p, l, r) = (vals(parent)?, vals(left)?, vals(right)?);
            let unary = op == Op::Not;
            if p.len() != l.len() || (!unary && p.len() != r.len()) {
                return Ok(false);
            }
            Ok((0..p.len()).all(|j| {
                let rv = if unary { None } else { Some(&r[j]) };
                combine(op, &l[j], rv).as_ref() == Some(&p[j])
            }))
        }
        Op::Assign => {
            let Op::Var(v) = left_op else { return Err(KindMismatch) };
            let (p, r) = (acts(parent)?, vals(right)?);
            vals(left)?;
            if p.len() != r.len() {
                return Ok(false);
            }
            Ok(p.iter().zip(r).all(|(a, rv)| match (a.as_slice(), rv) {
                ([i, o], Value::Int(x)) => *o == i.with(v, x.clone()),
                ([_, o], Value::Dummy) => o.is_empty(),
                _ => false,
            }))
        }
        Op::Seq => {
            let (p, l, r) = (acts(parent)?, acts(left)?, acts(right)?);
            if p.len() != l.len() || p.len() != r.len() {
                return Ok(false);
            }
            Ok((0..p.len()).all(|j| match (p[j].as_slice(), l[j].first(), l[j].last(), r[j].first(), r[j].last()) {
                ([i, o], Some(li), Some(lo), Some(ri), Some(ro)) => li == i && lo == ri && ro == o,
                _ => false,
            }))
        }
        Op::If => {
            let (p, g, b) = (acts(parent)?, vals(left)?, acts(right)?);
            if p.len() != g.len() {
                return Ok(false);
            }
            let mut body = b.iter();
            for (a, gv) in p.iter().zip(g) {
                let [i, o] = a.as_slice() else { return Ok(false) };
                let ok = match gv {
                    Value::Bool(true) => match body.next() {
                        Some(run) => run.first() == Some(i) && run.last() == Some(o),
                        None => false,
                    },
                    Value::Bool(false) => o == i,
                    Value::Dummy => o.is_empty(),
                    Value::Int(_) => false,
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(body.next().is_none())
        }
        Op::While => {
            let (p, g, b) = (acts(parent)?, vals(left)?, acts(right)?);
            let mut guard = g.iter();
            let mut body = b.iter();
            for trace in &p {
                if trace.is_empty() {
                    return Ok(false);
                }
                let k = trace.len() - 1;
                for (i, s) in trace.iter().enumerate() {
                    let expect = Value::Bool(i < k);
                    if guard.next() != Some(&expect) {
                        return Ok(false);
                    }
                    if i < k {
                        match body.next() {
                            Some(run) if run.first() == Some(s) && run.last() == Some(&trace[i + 1]) => {}
                            _ => return Ok(false),
                        }
                    }
                }
            }
            Ok(guard.next().is_none() && body.next().is_none())
        }
        _ => Err(KindMismatch),
    }
}

/// Check of a nullary operator (possibly widened) against the states it ran on.
pub fn check_leaf(op: Op, payload: &NodePayload, inputs: &[State]) -> bool {
    let Ok(vs) = vals(payload) else { return false };
    if op == Op::Null {
        return vs.iter().all(|v| *v == Value::Dummy);
    }
    if op.arity() != 0 || vs.len() != inputs.len() {
        return false;
    }
    vs.iter().zip(inputs).all(|(v, s)| *v == Value::from(leaf_value(op, s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Invalid { node: usize },
}

impl Verdict {
    pub fn is_valid(self) -> bool {
        self == Verdict::Valid
    }
}

/// States each evaluated leaf-level expression ran on, derived top-down from
/// the statement payloads above it.
fn inputs(nodes: &[Term], info: &[NodeInfo], v: &ValueTree) -> Vec<Vec<State>> {
    let n = nodes.len();
    let mut inputs: Vec<Vec<State>> = vec![Vec::new(); n];
    inputs[0] = vec![v.input.clone()];
    let firsts = |p: &NodePayload| -> Vec<State> {
        acts(p).map(|a| a.iter().map(|s| s.first().cloned().unwrap_or(State::Empty)).collect()).unwrap_or_default()
    };
    for i in 0..n {
        let t = &nodes[i];
        if t.children().is_empty() || info[i].inert || t.op().is_dummy() {
            continue;
        }
        let (l, r) = (2 * i + 1, 2 * i + 2);
        match t.op() {
            Op::Assign => inputs[r] = firsts(&v.nodes[i]),
            Op::If => inputs[l] = firsts(&v.nodes[i]),
            Op::While => {
                inputs[l] = acts(&v.nodes[i]).map(|a| a.concat()).unwrap_or_default();
            }
            Op::Seq => {}
            _ => {
                inputs[l] = inputs[i].clone();
                if t.op().arity() == 2 {
                    inputs[r] = inputs[i].clone();
                }
            }
        }
    }
    inputs
}

/// Checks every node locally, scanning from the last heap index to the root,
/// and reports the first node whose check fails.
pub fn validate(f: &Term, sigma: &State, v: &ValueTree) -> Result<Verdict, ValueTreeError> {
    let nodes = heap_order(f).ok_or(ValueTreeError::NotCompleteBinary)?;
    if v.nodes.len() != nodes.len() {
        return Err(ValueTreeError::ShapeMismatch { expected: nodes.len(), found: v.nodes.len() });
    }
    let info = layout(f).expect("complete binary");
    if let Some(i) = (0..nodes.len()).rev().find(|&i| v.nodes[i].kind() != info[i].kind) {
        return Ok(Verdict::Invalid { node: i });
    }
    let inputs = inputs(&nodes, &info, v);
    for i in (0..nodes.len()).rev() {
        let t = &nodes[i];
        let p = &v.nodes[i];
        let mut ok = if info[i].inert {
            *p == NodePayload::dummy()
        } else if t.op().arity() == 0 {
            check_leaf(t.op(), p, &inputs[i])
        } else {
            let (l, r) = (&v.nodes[2 * i + 1], &v.nodes[2 * i + 2]);
            check_node(t.op(), nodes[2 * i + 1].op(), p, l, r).unwrap_or(false)
        };
        if i == 0 {
            ok &= v.input == *sigma && !sigma.is_empty();
            if t.sort() == Sort::Statement {
                ok &= matches!(acts(p).as_deref(), Ok([run]) if run.first() == Some(sigma));
            }
        }
        if !ok {
            return Ok(Verdict::Invalid { node: i });
        }
    }
    Ok(Verdict::Valid)
}

struct Recorder {
    vals: Vec<Vec<Value>>,
    runs: Vec<Vec<Vec<State>>>,
}

fn run(t: &Term, i: usize, sigma: &State, m: &mut Meter, rec: &mut Recorder) -> Result<Val, Stop> {
    m.tick()?;
    let op = t.op();
    let kids = t.children();
    let (l, r) = (2 * i + 1, 2 * i + 2);
    let out = match op {
        Op::Nop | Op::Null | Op::True | Op::False | Op::Zero | Op::One | Op::Var(_) => leaf_value_or_dummy(op, sigma),
        Op::Not => match run(&kids[0], l, sigma, m, rec)? {
            Val::Bool(b) => Val::Bool(!b),
            _ => Val::Dummy,
        },
        Op::And | Op::Plus | Op::Minus | Op::Times | Op::Div | Op::Lt | Op::Eq => {
            let a = run(&kids[0], l, sigma, m, rec)?;
            let b = run(&kids[1], r, sigma, m, rec)?;
            match (a, b) {
                (Val::Bool(a), Val::Bool(b)) if op == Op::And => Val::Bool(a && b),
                (Val::Int(a), Val::Int(b)) => arith(op, &a, &b)?,
                _ => Val::Dummy,
            }
        }
        Op::Assign => {
            let Op::Var(v) = kids[0].op() else { unreachable!("assignment target is a variable") };
            match run(&kids[1], r, sigma, m, rec)? {
                Val::Int(x) => Val::State(sigma.with(v, x)),
                _ => Val::State(State::Empty),
            }
        }
        Op::Seq => match run(&kids[0], l, sigma, m, rec)? {
            Val::State(mid) => run(&kids[1], r, &mid, m, rec)?,
            _ => Val::State(State::Empty),
        },
        Op::If => match run(&kids[0], l, sigma, m, rec)? {
            Val::Bool(true) => run(&kids[1], r, sigma, m, rec)?,
            Val::Bool(false) => Val::State(sigma.clone()),
            _ => Val::State(State::Empty),
        },
        Op::While => {
            let mut trace = vec![sigma.clone()];
            loop {
                let cur = trace.last().unwrap().clone();
                match run(&kids[0], l, &cur, m, rec)? {
                    Val::Bool(true) => {}
                    Val::Bool(false) => break,
                    _ => {
                        trace.push(State::Empty);
                        break;
                    }
                }
                match run(&kids[1], r, &cur, m, rec)? {
                    Val::State(next) => trace.push(next),
                    _ => trace.push(State::Empty),
                }
                m.tick()?;
            }
            let out = trace.last().unwrap().clone();
            rec.runs[i].push(trace);
            return Ok(Val::State(out));
        }
    };
    match &out {
        Val::State(o) => rec.runs[i].push(vec![sigma.clone(), o.clone()]),
        v => rec.vals[i].push(v.clone().into()),
    }
    Ok(out)
}

fn leaf_value_or_dummy(op: Op, sigma: &State) -> Val {
    match op {
        Op::Nop => Val::Dummy,
        op => leaf_value(op, sigma),
    }
}

/// Builds the value tree of `f` on `sigma` by instrumented evaluation, with
/// the same fuel accounting as [`crate::semantics::eval`].
pub fn build_value_tree(f: &Term, sigma: &State, fuel: Fuel) -> Result<ValueTree, ValueTreeError> {
    let info = layout(f).ok_or(ValueTreeError::NotCompleteBinary)?;
    if sigma.is_empty() {
        return Err(ValueTreeError::DummyInput);
    }
    let n = info.len();
    let mut rec = Recorder { vals: vec![Vec::new(); n], runs: vec![Vec::new(); n] };
    let mut m = Meter { left: fuel };
    run(f, 0, sigma, &mut m, &mut rec).map_err(|s| match s {
        Stop::FuelExhausted => ValueTreeError::FuelExhausted,
        Stop::Fault(x) => ValueTreeError::Fault(x),
    })?;
    let nodes = info
        .iter()
        .enumerate()
        .map(|(i, inf)| {
            if inf.inert {
                return NodePayload::dummy();
            }
            match inf.kind {
                PayloadKind::Val => NodePayload::Val(rec.vals[i].pop().unwrap_or(Value::Dummy)),
                PayloadKind::ValSeq => NodePayload::ValSeq(core::mem::take(&mut rec.vals[i])),
                PayloadKind::StatePair => {
                    let mut r = rec.runs[i].pop().unwrap_or_default().into_iter();
                    let a = r.next().unwrap_or(State::Empty);
                    let b = r.next().unwrap_or(State::Empty);
                    NodePayload::StatePair(a, b)
                }
                PayloadKind::NestedSeq => NodePayload::NestedSeq(core::mem::take(&mut rec.runs[i])),
            }
        })
        .collect();
    Ok(ValueTree { input: sigma.clone(), nodes })
}

const TAG_INT: u32 = 0;
const TAG_BOOL: u32 = 1;
const TAG_VALSEQ: u32 = 2;
const TAG_STATEPAIR: u32 = 3;
const TAG_NESTED: u32 = 4;

fn value_code(v: &Value) -> BigUint {
    match v {
        Value::Dummy => BigUint::zero(),
        Value::Int(i) => pair(&BigUint::from(TAG_INT), &int_to_nat(i)) + 1u32,
        Value::Bool(b) => pair(&BigUint::from(TAG_BOOL), &BigUint::from(*b as u32)) + 1u32,
    }
}

/// `0` for the empty list, else `1 + pair(len − 1, pair(a, b))` of its beta pair.
fn list_code(xs: &[BigUint]) -> BigUint {
    match encode_seq_compact(xs) {
        Err(_) => BigUint::zero(),
        Ok(p) => pair(&BigUint::from(p.len - 1), &pair(&p.a, &p.b)) + 1u32,
    }
}

fn list_decode(code: &BigUint) -> Result<Vec<BigUint>, CodecError> {
    if code.is_zero() {
        return Ok(Vec::new());
    }
    let (len, ab) = unpair(&(code - 1u32));
    let len = len.to_usize().filter(|l| *l < 1 << 24).ok_or_else(|| CodecError::NotAnImage(code.clone()))? + 1;
    let (a, b) = unpair(&ab);
    Ok(decode_seq(&BetaPair { a, b, len }))
}

/// Natural-number code of a payload; `Val(∅)` is `0`.
pub fn payload_code(p: &NodePayload) -> BigUint {
    let tagged = |tag: u32, body: BigUint| pair(&BigUint::from(tag), &body) + 1u32;
    match p {
        NodePayload::Val(v) => value_code(v),
        NodePayload::ValSeq(vs) => tagged(TAG_VALSEQ, list_code(&vs.iter().map(value_code).collect::<Vec<_>>())),
        NodePayload::StatePair(a, b) => tagged(TAG_STATEPAIR, pair(&encode_state(a), &encode_state(b))),
        NodePayload::NestedSeq(outer) => {
            let flat: Vec<BigUint> = outer.iter().flatten().map(encode_state).collect();
            let lens: Vec<BigUint> = outer.iter().map(|s| BigUint::from(s.len())).collect();
            tagged(TAG_NESTED, pair(&list_code(&flat), &list_code(&lens)))
        }
    }
}

fn value_decode(code: &BigUint) -> Result<Value, CodecError> {
    if code.is_zero() {
        return Ok(Value::Dummy);
    }
    let (tag, body) = unpair(&(code - 1u32));
    match tag.to_u32() {
        Some(TAG_INT) => Ok(Value::Int(nat_to_int(&body))),
        Some(TAG_BOOL) if body <= BigUint::from(1u32) => Ok(Value::Bool(!body.is_zero())),
        _ => Err(CodecError::NotAnImage(code.clone())),
    }
}

pub fn payload_decode(code: &BigUint, universe: &VarUniverse) -> Result<NodePayload, CodecError> {
    if code.is_zero() {
        return Ok(NodePayload::dummy());
    }
    let (tag, body) = unpair(&(code - 1u32));
    match tag.to_u32() {
        Some(TAG_INT | TAG_BOOL) => value_decode(code).map(NodePayload::Val),
        Some(TAG_VALSEQ) => Ok(NodePayload::ValSeq(
            list_decode(&body)?.iter().map(value_decode).collect::<Result<_, _>>()?,
        )),
        Some(TAG_STATEPAIR) => {
            let (a, b) = unpair(&body);
            Ok(NodePayload::StatePair(decode_state(&a, universe), decode_state(&b, universe)))
        }
        Some(TAG_NESTED) => {
            let (flat, lens) = unpair(&body);
            let flat = list_decode(&flat)?;
            let lens = list_decode(&lens)?;
            let mut states = flat.iter().map(|c| decode_state(c, universe));
            let mut outer = Vec::with_capacity(lens.len());
            for l in &lens {
                let l = l.to_usize().ok_or_else(|| CodecError::NotAnImage(code.clone()))?;
                let inner: Vec<State> = states.by_ref().take(l).collect();
                if inner.len() != l {
                    return Err(CodecError::NotAnImage(code.clone()));
                }
                outer.push(inner);
            }
            if states.next().is_some() {
                return Err(CodecError::NotAnImage(code.clone()));
            }
            Ok(NodePayload::NestedSeq(outer))
        }
        _ => Err(CodecError::NotAnImage(code.clone())),
    }
}

/// Beta-encodes the heap-order payload codes.
pub fn encode_value_tree(v: &ValueTree) -> Result<EncodedTree, CodecError> {
    let height = codec::height_for(v.nodes.len())?;
    let cells: Vec<BigUint> = v.nodes.iter().map(payload_code).collect();
    Ok(EncodedTree { pair: encode_seq_compact(&cells)?, height })
}

/// Inverse of [`encode_value_tree`]; the input state is not part of the code.
pub fn decode_value_tree(enc: &EncodedTree, input: State, universe: &VarUniverse) -> Result<ValueTree, CodecError> {
    codec::height_for(enc.pair.len)?;
    let nodes = decode_seq(&enc.pair)
        .iter()
        .map(|c| payload_decode(c, universe))
        .collect::<Result<_, _>>()?;
    Ok(ValueTree { input, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binform::embed;
    use crate::parse::parse_term;
    use alloc::string::ToString;

    fn u() -> VarUniverse {
        VarUniverse::new(["x"]).unwrap()
    }

    fn p(s: &str) -> Term {
        parse_term(s, &u()).unwrap()
    }

    fn x(v: i64) -> State {
        State::from_ints(&[v])
    }

    fn val(v: i64) -> NodePayload {
        NodePayload::Val(v.into())
    }

    #[test]
    fn sum_tree_values() {
        let f = embed(&p("1 + x + 1")).unwrap();
        let v = build_value_tree(&f, &x(3), 1000).unwrap();
        let d = NodePayload::dummy();
        let expected = [val(5), val(4), val(1), val(1), val(3), d.clone(), d.clone()];
        assert_eq!(v.nodes[..7], expected);
        assert!(v.nodes[7..].iter().all(|n| *n == d));
        assert_eq!(validate(&f, &x(3), &v), Ok(Verdict::Valid));
    }

    #[test]
    fn mutation_fails_at_node_one() {
        let f = embed(&p("1 + x + 1")).unwrap();
        let mut v = build_value_tree(&f, &x(3), 1000).unwrap();
        v.nodes[1] = val(5);
        assert_eq!(validate(&f, &x(3), &v), Ok(Verdict::Invalid { node: 1 }));
        // the root alone would also fail, but the scan reports the deepest failure first
        let mut w = build_value_tree(&f, &x(3), 1000).unwrap();
        w.nodes[0] = val(6);
        assert_eq!(validate(&f, &x(3), &w), Ok(Verdict::Invalid { node: 0 }));
    }

    #[test]
    fn node_checks() {
        let dummy = NodePayload::dummy();
        assert_eq!(check_node(Op::Plus, Op::One, &val(4), &val(1), &val(3)), Ok(true));
        assert_eq!(check_node(Op::Plus, Op::One, &val(5), &val(1), &val(3)), Ok(false));
        assert_eq!(check_node(Op::Plus, Op::One, &dummy, &dummy, &val(3)), Ok(true));
        assert_eq!(check_node(Op::Div, Op::One, &val(0), &val(1), &val(0)), Ok(false));
        let sp = |a, b| NodePayload::StatePair(x(a), x(b));
        assert_eq!(check_node(Op::Seq, Op::Assign, &sp(3, 5), &sp(3, 4), &sp(4, 5)), Ok(true));
        assert_eq!(check_node(Op::Seq, Op::Assign, &sp(3, 5), &sp(3, 4), &sp(3, 5)), Ok(false));
        let loop_ = NodePayload::NestedSeq(vec![vec![x(0), x(1), x(2)]]);
        let guard = NodePayload::ValSeq(vec![Value::Bool(true), Value::Bool(true), Value::Bool(false)]);
        let body = NodePayload::NestedSeq(vec![vec![x(0), x(1)], vec![x(1), x(2)]]);
        assert_eq!(check_node(Op::While, Op::Lt, &loop_, &guard, &body), Ok(true));
        let short = NodePayload::NestedSeq(vec![vec![x(0), x(1)]]);
        assert_eq!(check_node(Op::While, Op::Lt, &loop_, &guard, &short), Ok(false));
        assert_eq!(check_node(Op::Plus, Op::One, &sp(0, 1), &val(1), &val(3)), Err(KindMismatch));
        assert_eq!(check_node(Op::One, Op::Null, &val(1), &dummy, &dummy), Err(KindMismatch));
    }

    #[test]
    fn leaf_checks() {
        assert!(check_leaf(Op::One, &val(1), &[x(0)]));
        assert!(check_leaf(Op::Var(crate::syntax::VarId(0)), &val(3), &[x(3)]));
        assert!(!check_leaf(Op::Null, &val(7), &[]));
        assert!(check_leaf(Op::Null, &NodePayload::dummy(), &[]));
    }

    #[test]
    fn seq_tree() {
        let f = embed(&p("x := x + 1; x := x + 1")).unwrap();
        let v = build_value_tree(&f, &x(3), 1000).unwrap();
        assert_eq!(v.nodes[0], NodePayload::StatePair(x(3), x(5)));
        assert_eq!(v.nodes[1], NodePayload::StatePair(x(3), x(4)));
        assert_eq!(v.nodes[2], NodePayload::StatePair(x(4), x(5)));
        assert_eq!(validate(&f, &x(3), &v), Ok(Verdict::Valid));
    }

    #[test]
    fn loop_tree() {
        let f = embed(&p("while x < 2 do x := x + 1")).unwrap();
        let v = build_value_tree(&f, &x(0), 1000).unwrap();
        assert_eq!(v.nodes[0], NodePayload::NestedSeq(vec![vec![x(0), x(1), x(2)]]));
        assert_eq!(v.nodes[1], NodePayload::ValSeq(vec![Value::Bool(true), Value::Bool(true), Value::Bool(false)]));
        assert_eq!(v.nodes[2], NodePayload::NestedSeq(vec![vec![x(0), x(1)], vec![x(1), x(2)]]));
        assert_eq!(validate(&f, &x(0), &v), Ok(Verdict::Valid));
        assert_eq!(v.output(), Some(crate::semantics::EvalOutcome::StateOut(x(2))));
        let enc = encode_value_tree(&v).unwrap();
        assert_eq!(decode_value_tree(&enc, x(0), &u()).unwrap(), v);
        assert_eq!(
            v.nodes[2].display(&u()).to_string(),
            "[[{x=0}, {x=1}], [{x=1}, {x=2}]]"
        );
    }

    #[test]
    fn if_tree() {
        let f = embed(&p("if x < 2 then x := 7")).unwrap();
        for (start, end) in [(0, 7), (5, 5)] {
            let v = build_value_tree(&f, &x(start), 1000).unwrap();
            assert_eq!(v.nodes[0], NodePayload::StatePair(x(start), x(end)));
            assert_eq!(validate(&f, &x(start), &v), Ok(Verdict::Valid));
        }
    }

    #[test]
    fn errors() {
        let f = embed(&p("1 + x")).unwrap();
        let v = build_value_tree(&f, &x(3), 1000).unwrap();
        let g = embed(&p("1 + x + 1")).unwrap();
        assert_eq!(validate(&g, &x(3), &v), Err(ValueTreeError::ShapeMismatch { expected: 15, found: 7 }));
        assert_eq!(validate(&f, &x(4), &v), Ok(Verdict::Invalid { node: 0 }));
        assert_eq!(build_value_tree(&p("1 + x + 1"), &x(3), 100), Err(ValueTreeError::NotCompleteBinary));
        assert_eq!(build_value_tree(&f, &State::Empty, 100), Err(ValueTreeError::DummyInput));
        let w = embed(&p("while true do x := x")).unwrap();
        assert_eq!(build_value_tree(&w, &x(0), 10_000), Err(ValueTreeError::FuelExhausted));
        let z = embed(&p("x / 0")).unwrap();
        assert_eq!(build_value_tree(&z, &x(0), 10_000), Err(ValueTreeError::Fault(Fault::DivByZero)));
    }

    #[test]
    fn encoding_round_trip_and_dummy_cell() {
        assert_eq!(payload_code(&NodePayload::dummy()), BigUint::zero());
        let f = embed(&p("1 + x + 1")).unwrap();
        let v = build_value_tree(&f, &x(3), 1000).unwrap();
        let enc = encode_value_tree(&v).unwrap();
        assert_eq!(enc.height, 3);
        assert_eq!(decode_value_tree(&enc, x(3), &u()).unwrap(), v);
    }
}
