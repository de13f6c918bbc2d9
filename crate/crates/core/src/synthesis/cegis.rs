//! Counterexample-guided synthesis over a growing example set.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::semantics::{eval, EvalOutcome, Fuel};
use crate::syntax::{Sort, State, Term};

use super::pbe::{synthesize_pbe_with, PbeConfig};
use super::{
    verify, with_examples, ExhaustReason, SynthStats, SynthesisError, SynthesisProblem, SynthesisResult,
    Verification,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CegisRound {
    pub candidate: Term,
    pub counterexample: State,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CegisState {
    pub examples: Vec<State>,
    pub candidate: Option<Term>,
    pub history: Vec<CegisRound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CegisOutcome {
    pub result: SynthesisResult,
    pub state: CegisState,
}

/// Alternates example-driven search with verification on the whole domain.
///
/// Each round synthesizes a candidate for the current examples; a
/// counterexample found on the domain is appended and the loop repeats.
/// Stops with the verified candidate, with the inner search's verdict if it
/// fails, or with `BudgetExhausted` after `round_budget` refuted candidates.
pub fn cegis(
    problem: &SynthesisProblem,
    seed_examples: Vec<State>,
    round_budget: usize,
    size_budget: usize,
    fuel: Fuel,
) -> Result<CegisOutcome, SynthesisError> {
    cegis_with(problem, seed_examples, round_budget, &PbeConfig::new(size_budget), fuel)
}

pub fn cegis_with(
    problem: &SynthesisProblem,
    seed_examples: Vec<State>,
    round_budget: usize,
    cfg: &PbeConfig,
    fuel: Fuel,
) -> Result<CegisOutcome, SynthesisError> {
    let mut state = CegisState { examples: seed_examples, ..CegisState::default() };
    let mut total = SynthStats::default();
    let exhausted = |reason, stats, state| Ok(CegisOutcome { result: SynthesisResult::BudgetExhausted { reason, stats }, state });
    for _ in 0..round_budget {
        let sub = with_examples(problem, state.examples.clone()).map_err(|_| SynthesisError::NotFinite)?;
        let inner = synthesize_pbe_with(&sub, cfg)?;
        accumulate(&mut total, inner.stats());
        let candidate = match inner {
            SynthesisResult::Realized { term, .. } => term,
            SynthesisResult::Unrealizable { language_size, .. } => {
                return Ok(CegisOutcome { result: SynthesisResult::Unrealizable { language_size, stats: total }, state })
            }
            SynthesisResult::BudgetExhausted { reason, .. } => return exhausted(reason, total, state),
        };
        state.candidate = Some(candidate.clone());
        match verify(&candidate, problem, fuel) {
            Verification::Verified => {
                return Ok(CegisOutcome { result: SynthesisResult::Realized { term: candidate, stats: total }, state })
            }
            Verification::Unknown => return exhausted(ExhaustReason::VerificationUnknown, total, state),
            Verification::CounterexampleFound(x) => {
                state.examples.push(x.clone());
                state.history.push(CegisRound { candidate, counterexample: x });
            }
        }
    }
    exhausted(ExhaustReason::Rounds, total, state)
}

fn accumulate(total: &mut SynthStats, s: &SynthStats) {
    total.candidates += s.candidates;
    total.evaluations += s.evaluations;
    total.rounds += s.rounds;
    total.max_fuel = total.max_fuel.max(s.max_fuel);
    total.completed_size = total.completed_size.max(s.completed_size);
}

/// Largest value of a variable-free expression subterm, if any.
pub fn largest_constant(f: &Term) -> Option<BigInt> {
    f.preorder()
        .into_iter()
        .filter(|t| t.sort() == Sort::Expression && t.max_var().is_none() && !t.has_dummy_syntax())
        .filter_map(|t| match eval(t, &State::Vals(Vec::new()), t.size() as Fuel) {
            EvalOutcome::Value(v) => Some(v),
            _ => None,
        })
        .max()
}
