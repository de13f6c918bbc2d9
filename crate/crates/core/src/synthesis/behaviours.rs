//! Exact realizability for expression grammars over finite domains.
//!
//! An expression's outcome on every input is a function of its operator and
//! its operands' outcomes, so terms of a given size can be grouped by their
//! behaviour (the vector of outcomes over the domain). Layers of behaviours
//! are built by size exactly like term enumeration, without materialising
//! the terms themselves.

use alloc::{collections::BTreeSet, vec, vec::Vec};

use num_bigint::BigInt;
use thiserror::Error;

use crate::grammar::Rtg;
use crate::semantics::{arith, leaf_value, EvalOutcome, Val};
use crate::syntax::{Op, Sort, State};

use super::SynthesisProblem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviourError {
    #[error("grammar derives statements; behaviours are defined for expression grammars only")]
    StatementGrammar,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum B {
    Int(BigInt),
    Bool(bool),
    Dummy,
    Fault,
}

fn from_val(v: Val) -> B {
    match v {
        Val::Int(i) => B::Int(i),
        Val::Bool(b) => B::Bool(b),
        Val::State(_) | Val::Dummy => B::Dummy,
    }
}

fn apply(op: Op, l: Option<&B>, r: Option<&B>, sigma: &State) -> B {
    if op.arity() == 0 {
        return if op == Op::Nop { B::Dummy } else { from_val(leaf_value(op, sigma)) };
    }
    let l = l.expect("operand");
    if op == Op::Not {
        return match l {
            B::Bool(b) => B::Bool(!b),
            B::Fault => B::Fault,
            _ => B::Dummy,
        };
    }
    let r = r.expect("operand");
    match (l, r) {
        (B::Fault, _) | (_, B::Fault) => B::Fault,
        (B::Bool(a), B::Bool(b)) if op == Op::And => B::Bool(*a && *b),
        (B::Int(a), B::Int(b)) if op != Op::And => match arith(op, a, b) {
            Ok(v) => from_val(v),
            Err(_) => B::Fault,
        },
        _ => B::Dummy,
    }
}

type Layer = Vec<BTreeSet<Vec<B>>>;

/// `layers[n][nt]`: behaviours over `states` of the terms of size `n` derived by `nt`.
pub(crate) fn behaviour_layers(g: &Rtg, states: &[State], max_size: usize) -> Result<Vec<Layer>, BehaviourError> {
    let nts = g.nonterminals().len();
    if (0..nts).any(|nt| g.sort(nt) == Sort::Statement) {
        return Err(BehaviourError::StatementGrammar);
    }
    let mut layers: Vec<Layer> = vec![vec![BTreeSet::new(); nts]];
    for n in 1..=max_size {
        let mut layer: Layer = vec![BTreeSet::new(); nts];
        for (nt, out) in layer.iter_mut().enumerate() {
            for p in g.productions(nt) {
                let mut emit = |l: Option<&Vec<B>>, r: Option<&Vec<B>>| {
                    let b: Vec<B> = states
                        .iter()
                        .enumerate()
                        .map(|(i, s)| apply(p.op, l.map(|v| &v[i]), r.map(|v| &v[i]), s))
                        .collect();
                    out.insert(b);
                };
                match p.args[..] {
                    [] if n == 1 => emit(None, None),
                    [a] if n >= 2 => layers[n - 1][a].iter().for_each(|l| emit(Some(l), None)),
                    [a, b] if n >= 3 => {
                        for s in 1..n - 1 {
                            for l in &layers[s][a] {
                                for r in &layers[n - 1 - s][b] {
                                    emit(Some(l), Some(r));
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        layers.push(layer);
    }
    Ok(layers)
}

fn outcome(b: &B) -> Option<EvalOutcome> {
    match b {
        B::Int(i) => Some(EvalOutcome::Value(i.clone())),
        B::Bool(v) => Some(EvalOutcome::Bool(*v)),
        B::Dummy | B::Fault => None,
    }
}

/// Sizes `n <= max_size` at which some term of the grammar of size exactly
/// `n` satisfies the specification on every state of the domain.
pub fn realizable_sizes(problem: &SynthesisProblem, max_size: usize) -> Result<Vec<usize>, BehaviourError> {
    let states: Vec<State> = problem.domain.states().collect();
    let layers = behaviour_layers(&problem.grammar, &states, max_size)?;
    let start = problem.grammar.start();
    Ok((1..=max_size)
        .filter(|&n| {
            layers[n][start].iter().any(|b| {
                b.iter().zip(&states).all(|(v, s)| match outcome(v) {
                    Some(out) => problem.spec.holds(s, n, &out),
                    None => false,
                })
            })
        })
        .collect())
}
