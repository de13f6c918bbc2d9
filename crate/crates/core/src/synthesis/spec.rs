//! Specification predicates over an input state, a candidate and its output.

use alloc::{boxed::Box, vec::Vec};
use core::fmt;

use num_bigint::BigInt;

use crate::semantics::EvalOutcome;
use crate::syntax::{State, VarId, VarUniverse};

/// Integer or Boolean term of the predicate language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpecExpr {
    Int(BigInt),
    Bool(bool),
    /// Value of a variable in the input state.
    Input(VarId),
    /// The whole output: a value for expression programs.
    Out,
    /// A variable of the output state of a statement program.
    OutVar(VarId),
    /// Syntax size of the candidate.
    Size,
    Add(Box<SpecExpr>, Box<SpecExpr>),
    Sub(Box<SpecExpr>, Box<SpecExpr>),
    Mul(Box<SpecExpr>, Box<SpecExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn from_name(s: &str) -> Option<CmpOp> {
        [CmpOp::Eq, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge].into_iter().find(|c| c.name() == s)
    }
}

/// A decidable predicate. Comparisons between values of different kinds, or
/// involving a missing value (`out` of a statement, `(out x)` of an
/// expression), are false.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Spec {
    True,
    False,
    Cmp(CmpOp, SpecExpr, SpecExpr),
    And(Vec<Spec>),
    Or(Vec<Spec>),
    Not(Box<Spec>),
    Implies(Box<Spec>, Box<Spec>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sv {
    Int(BigInt),
    Bool(bool),
}

struct Env<'a> {
    sigma: &'a State,
    size: usize,
    out: &'a EvalOutcome,
}

impl SpecExpr {
    fn eval(&self, env: &Env<'_>) -> Option<Sv> {
        let int = |e: &SpecExpr| match e.eval(env)? {
            Sv::Int(i) => Some(i),
            Sv::Bool(_) => None,
        };
        Some(match self {
            SpecExpr::Int(i) => Sv::Int(i.clone()),
            SpecExpr::Bool(b) => Sv::Bool(*b),
            SpecExpr::Input(v) => Sv::Int(env.sigma.get(*v)?.clone()),
            SpecExpr::Out => match env.out {
                EvalOutcome::Value(i) => Sv::Int(i.clone()),
                EvalOutcome::Bool(b) => Sv::Bool(*b),
                _ => return None,
            },
            SpecExpr::OutVar(v) => match env.out {
                EvalOutcome::StateOut(s) => Sv::Int(s.get(*v)?.clone()),
                _ => return None,
            },
            SpecExpr::Size => Sv::Int(env.size.into()),
            SpecExpr::Add(a, b) => Sv::Int(int(a)? + int(b)?),
            SpecExpr::Sub(a, b) => Sv::Int(int(a)? - int(b)?),
            SpecExpr::Mul(a, b) => Sv::Int(int(a)? * int(b)?),
        })
    }

    fn vars(&self, acc: &mut Vec<VarId>) {
        match self {
            SpecExpr::Input(v) | SpecExpr::OutVar(v) => acc.push(*v),
            SpecExpr::Add(a, b) | SpecExpr::Sub(a, b) | SpecExpr::Mul(a, b) => {
                a.vars(acc);
                b.vars(acc);
            }
            _ => {}
        }
    }

    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> SpecDisplay<'a> {
        SpecDisplay { node: Node::Expr(self), universe }
    }
}

impl Spec {
    /// Evaluates the predicate for one input, a candidate of the given size,
    /// and the candidate's outcome on that input.
    pub fn holds(&self, sigma: &State, size: usize, out: &EvalOutcome) -> bool {
        self.check(&Env { sigma, size, out })
    }

    fn check(&self, env: &Env<'_>) -> bool {
        match self {
            Spec::True => true,
            Spec::False => false,
            Spec::Cmp(op, a, b) => match (a.eval(env), b.eval(env)) {
                (Some(Sv::Int(x)), Some(Sv::Int(y))) => match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                },
                (Some(Sv::Bool(x)), Some(Sv::Bool(y))) => *op == CmpOp::Eq && x == y,
                _ => false,
            },
            Spec::And(ps) => ps.iter().all(|p| p.check(env)),
            Spec::Or(ps) => ps.iter().any(|p| p.check(env)),
            Spec::Not(p) => !p.check(env),
            Spec::Implies(a, b) => !a.check(env) || b.check(env),
        }
    }

    /// Variables mentioned anywhere in the predicate.
    pub fn vars(&self) -> Vec<VarId> {
        let mut acc = Vec::new();
        self.collect(&mut acc);
        acc.sort();
        acc.dedup();
        acc
    }

    fn collect(&self, acc: &mut Vec<VarId>) {
        match self {
            Spec::True | Spec::False => {}
            Spec::Cmp(_, a, b) => {
                a.vars(acc);
                b.vars(acc);
            }
            Spec::And(ps) | Spec::Or(ps) => ps.iter().for_each(|p| p.collect(acc)),
            Spec::Not(p) => p.collect(acc),
            Spec::Implies(a, b) => {
                a.collect(acc);
                b.collect(acc);
            }
        }
    }

    /// `(= out e)`.
    pub fn out_equals(e: SpecExpr) -> Spec {
        Spec::Cmp(CmpOp::Eq, SpecExpr::Out, e)
    }

    pub fn display<'a>(&'a self, universe: &'a VarUniverse) -> SpecDisplay<'a> {
        SpecDisplay { node: Node::Spec(self), universe }
    }
}

enum Node<'a> {
    Spec(&'a Spec),
    Expr(&'a SpecExpr),
}

/// S-expression rendering, e.g. `(and (= (out x) y) (= (out y) y))`.
pub struct SpecDisplay<'a> {
    node: Node<'a>,
    universe: &'a VarUniverse,
}

impl fmt::Display for SpecDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = self.universe;
        match self.node {
            Node::Expr(e) => match e {
                SpecExpr::Int(i) => write!(f, "{i}"),
                SpecExpr::Bool(b) => write!(f, "{b}"),
                SpecExpr::Input(v) => f.write_str(u.name(*v)),
                SpecExpr::Out => f.write_str("out"),
                SpecExpr::OutVar(v) => write!(f, "(out {})", u.name(*v)),
                SpecExpr::Size => f.write_str("size"),
                SpecExpr::Add(a, b) => write!(f, "(+ {} {})", a.display(u), b.display(u)),
                SpecExpr::Sub(a, b) => write!(f, "(- {} {})", a.display(u), b.display(u)),
                SpecExpr::Mul(a, b) => write!(f, "(* {} {})", a.display(u), b.display(u)),
            },
            Node::Spec(s) => match s {
                Spec::True => f.write_str("true"),
                Spec::False => f.write_str("false"),
                Spec::Cmp(op, a, b) => write!(f, "({} {} {})", op.name(), a.display(u), b.display(u)),
                Spec::And(ps) | Spec::Or(ps) => {
                    f.write_str(if matches!(s, Spec::And(_)) { "(and" } else { "(or" })?;
                    for p in ps {
                        write!(f, " {}", p.display(u))?;
                    }
                    f.write_str(")")
                }
                Spec::Not(p) => write!(f, "(not {})", p.display(u)),
                Spec::Implies(a, b) => write!(f, "(=> {} {})", a.display(u), b.display(u)),
            },
        }
    }
}
