//! Synthesis problems and bounded realizability engines.
//!
//! A problem asks for a term of a grammar whose outcome satisfies a
//! specification on every state of a domain. Engines search the grammar in
//! enumeration order and never claim unrealizability unless the whole
//! (finite) language was checked.

mod behaviours;
mod cegis;
mod classify;
mod domain;
mod pbe;
mod spec;

use alloc::{string::String, vec, vec::Vec};

use thiserror::Error;

use crate::grammar::Rtg;
use crate::semantics::{eval, EvalOutcome, Fuel};
use crate::syntax::{Op, State, Term, VarId, VarUniverse};

pub use behaviours::{realizable_sizes, BehaviourError};
pub use cegis::{cegis, cegis_with, largest_constant, CegisOutcome, CegisRound, CegisState};
pub use classify::{classify, HierarchyClass, Variant};
pub use domain::{Domain, States};
pub use pbe::{synthesize_loop_free, synthesize_loop_free_with, synthesize_pbe, synthesize_pbe_with, PbeConfig};
pub use spec::{CmpOp, Spec, SpecDisplay, SpecExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The specification must hold on an actual output.
    Total,
    /// Runs that do not finish within the fuel count as satisfied.
    Partial,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Total => "total",
            Mode::Partial => "partial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("domain lists a state twice")]
    DuplicateState,
    #[error("domain state does not match the variable universe")]
    StateShape,
    #[error("grammar and problem use different variable universes")]
    UniverseMismatch,
    #[error("specification mentions a variable outside the universe")]
    SpecVariable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("this engine needs a finite list of examples")]
    NotFinite,
    #[error("grammar has a `while` production")]
    HasLoops,
}

#[derive(Clone, Debug)]
pub struct SynthesisProblem {
    pub grammar: Rtg,
    pub domain: Domain,
    pub spec: Spec,
    pub mode: Mode,
}

impl SynthesisProblem {
    pub fn new(grammar: Rtg, domain: Domain, spec: Spec, mode: Mode) -> Result<Self, ProblemError> {
        let u = grammar.universe();
        if spec.vars().iter().any(|v| v.index() >= u.len()) {
            return Err(ProblemError::SpecVariable);
        }
        let arity = match &domain {
            Domain::Finite(s) => s[0].values().map_or(0, <[_]>::len),
            Domain::BoundedBox(b) => b.len(),
        };
        if arity != u.len() {
            return Err(ProblemError::UniverseMismatch);
        }
        Ok(SynthesisProblem { grammar, domain, spec, mode })
    }

    pub fn universe(&self) -> &VarUniverse {
        self.grammar.universe()
    }

    /// Outcome of `f` on one input, judged against the specification.
    pub fn check(&self, f: &Term, sigma: &State, fuel: Fuel) -> Check {
        match eval(f, sigma, fuel) {
            EvalOutcome::FuelExhausted => match self.mode {
                Mode::Total => Check::Unknown,
                Mode::Partial => Check::Pass,
            },
            EvalOutcome::Fault(_) | EvalOutcome::Dummy => Check::Fail,
            out if self.spec.holds(sigma, f.size(), &out) => Check::Pass,
            _ => Check::Fail,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Verified,
    CounterexampleFound(State),
    Unknown,
}

/// Checks `f` on the whole domain in canonical order and returns the first
/// counterexample; `Unknown` if none was found but some run ran out of fuel.
pub fn verify(f: &Term, problem: &SynthesisProblem, fuel: Fuel) -> Verification {
    verify_on(f, problem, problem.domain.states(), fuel)
}

pub(crate) fn verify_on(
    f: &Term,
    problem: &SynthesisProblem,
    states: impl IntoIterator<Item = State>,
    fuel: Fuel,
) -> Verification {
    let mut unknown = false;
    for sigma in states {
        match problem.check(f, &sigma, fuel) {
            Check::Pass => {}
            Check::Fail => return Verification::CounterexampleFound(sigma),
            Check::Unknown => unknown = true,
        }
    }
    if unknown {
        Verification::Unknown
    } else {
        Verification::Verified
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SynthStats {
    /// Distinct candidates drawn from the enumerator.
    pub candidates: usize,
    /// Single-input evaluations performed.
    pub evaluations: u64,
    /// Dovetail rounds (one for engines that do not dovetail).
    pub rounds: u32,
    /// Largest per-run fuel used.
    pub max_fuel: Fuel,
    /// Largest size whose candidates were all drawn.
    pub completed_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExhaustReason {
    /// Every candidate within the size budget was rejected, but the language is infinite.
    SizeBudget,
    /// Some candidate was still undecided at the largest fuel allowed.
    FuelCap,
    /// The candidate or term-storage cap was reached.
    WorkCap,
    /// CEGIS used all its rounds.
    Rounds,
    /// CEGIS could not verify or refute a candidate within the fuel.
    VerificationUnknown,
}

impl ExhaustReason {
    pub fn name(self) -> &'static str {
        match self {
            ExhaustReason::SizeBudget => "size-budget",
            ExhaustReason::FuelCap => "fuel-cap",
            ExhaustReason::WorkCap => "work-cap",
            ExhaustReason::Rounds => "rounds",
            ExhaustReason::VerificationUnknown => "verification-unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthesisResult {
    Realized { term: Term, stats: SynthStats },
    /// The language is finite, fits the size budget, and every member failed.
    Unrealizable { language_size: usize, stats: SynthStats },
    BudgetExhausted { reason: ExhaustReason, stats: SynthStats },
}

impl SynthesisResult {
    pub fn stats(&self) -> &SynthStats {
        match self {
            SynthesisResult::Realized { stats, .. }
            | SynthesisResult::Unrealizable { stats, .. }
            | SynthesisResult::BudgetExhausted { stats, .. } => stats,
        }
    }

    pub fn term(&self) -> Option<&Term> {
        match self {
            SynthesisResult::Realized { term, .. } => Some(term),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            SynthesisResult::Realized { .. } => "realized",
            SynthesisResult::Unrealizable { .. } => "unrealizable",
            SynthesisResult::BudgetExhausted { .. } => "budget-exhausted",
        }
    }
}

/// The if-then chain problem: assignments of sums of constants to `x`,
/// guarded by equality with `y`, where `x` must end equal to `y`.
///
/// ```text
/// S ::= x := E | if E == y then S | S; S
/// E ::= 0 | 1 | E + E
/// ```
/// over the domain `x = 0`, `0 <= y <= bound`.
pub fn if_chain_problem(bound: u64) -> SynthesisProblem {
    let u = VarUniverse::new(["x", "y"]).unwrap();
    let (x, y) = (VarId(0), VarId(1));
    let g = Rtg::new(
        u.clone(),
        "S",
        &[
            ("S", Op::Assign, vec!["X", "E"]),
            ("S", Op::If, vec!["B", "S"]),
            ("S", Op::Seq, vec!["S", "S"]),
            ("B", Op::Eq, vec!["E", "Y"]),
            ("E", Op::Zero, vec![]),
            ("E", Op::One, vec![]),
            ("E", Op::Plus, vec!["E", "E"]),
            ("X", Op::Var(x), vec![]),
            ("Y", Op::Var(y), vec![]),
        ],
    )
    .expect("fixed grammar is well formed");
    let domain = Domain::bounded_box(vec![(0.into(), 0.into()), (0.into(), bound.into())], &u).unwrap();
    let spec = Spec::And(vec![
        Spec::Cmp(CmpOp::Eq, SpecExpr::OutVar(x), SpecExpr::Input(y)),
        Spec::Cmp(CmpOp::Eq, SpecExpr::OutVar(y), SpecExpr::Input(y)),
    ]);
    SynthesisProblem::new(g, domain, spec, Mode::Total).unwrap()
}

/// Restricts a problem to an explicit example list.
pub fn with_examples(problem: &SynthesisProblem, examples: Vec<State>) -> Result<SynthesisProblem, ProblemError> {
    let domain = Domain::finite(examples, problem.universe())?;
    Ok(SynthesisProblem { domain, ..problem.clone() })
}

/// Human-readable description of a result, for logs.
pub fn describe(result: &SynthesisResult, universe: &VarUniverse) -> String {
    use alloc::format;
    match result {
        SynthesisResult::Realized { term, .. } => format!("realized: {}", crate::parse::print_term(term, universe)),
        SynthesisResult::Unrealizable { language_size, .. } => {
            format!("unrealizable: all {language_size} terms of the language fail")
        }
        SynthesisResult::BudgetExhausted { reason, .. } => format!("budget exhausted ({})", reason.name()),
    }
}
