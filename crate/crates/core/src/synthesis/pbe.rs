//! Enumerative engines: dovetailed search over examples and the loop-free path.

use alloc::vec::Vec;

use crate::semantics::Fuel;
use crate::syntax::{Op, State, Term};

use super::{Check, Domain, ExhaustReason, Mode, SynthStats, SynthesisError, SynthesisProblem, SynthesisResult};

/// Budgets for the enumerative engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PbeConfig {
    /// Largest candidate size.
    pub size_budget: usize,
    /// Per-run fuel stops doubling here; a candidate still undecided at this fuel ends the search.
    pub max_fuel: Fuel,
    /// Cap on distinct candidates drawn.
    pub max_candidates: usize,
    /// Cap on terms the enumerator may store.
    pub store_limit: usize,
    /// Per-run fuel in partial mode, where running out counts as success.
    pub partial_fuel: Fuel,
}

impl PbeConfig {
    pub fn new(size_budget: usize) -> Self {
        PbeConfig {
            size_budget,
            max_fuel: 1 << 20,
            max_candidates: 4_000_000,
            store_limit: 8_000_000,
            partial_fuel: 10_000,
        }
    }
}

struct Candidate {
    term: Term,
    /// Examples already passed, in order.
    passed: usize,
    dead: bool,
}

fn finished(problem: &SynthesisProblem, cfg: &PbeConfig, drawn: usize, stats: SynthStats) -> SynthesisResult {
    match problem.grammar.max_term_size() {
        Some(m) if m <= cfg.size_budget => SynthesisResult::Unrealizable { language_size: drawn, stats },
        _ => SynthesisResult::BudgetExhausted { reason: ExhaustReason::SizeBudget, stats },
    }
}

/// Searches the grammar for a term satisfying the specification on every
/// example of a finite domain.
///
/// In total mode the search dovetails: round `r` runs the first `2^r`
/// candidates with fuel `2^r` each, resuming where they stopped, so a
/// diverging candidate never blocks later ones. The first candidate (in
/// enumeration order) to pass every example within a round is returned.
/// In partial mode each candidate runs once with [`PbeConfig::partial_fuel`].
pub fn synthesize_pbe(problem: &SynthesisProblem, size_budget: usize) -> Result<SynthesisResult, SynthesisError> {
    synthesize_pbe_with(problem, &PbeConfig::new(size_budget))
}

pub fn synthesize_pbe_with(problem: &SynthesisProblem, cfg: &PbeConfig) -> Result<SynthesisResult, SynthesisError> {
    let Domain::Finite(examples) = &problem.domain else {
        return Err(SynthesisError::NotFinite);
    };
    Ok(match problem.mode {
        Mode::Total => dovetail(problem, examples, cfg),
        Mode::Partial => single_pass(problem, examples.as_slice(), |_| cfg.partial_fuel, cfg),
    })
}

fn dovetail(problem: &SynthesisProblem, examples: &[State], cfg: &PbeConfig) -> SynthesisResult {
    let mut en = problem.grammar.enumerate(cfg.size_budget).with_limit(cfg.store_limit);
    let mut cands: Vec<Candidate> = Vec::new();
    let mut drained = false;
    let mut stats = SynthStats::default();
    for r in 0u32.. {
        let fuel: Fuel = (1 << r.min(62)).min(cfg.max_fuel);
        let width = 1usize.checked_shl(r).unwrap_or(usize::MAX);
        while !drained && cands.len() < width && cands.len() < cfg.max_candidates {
            match en.next() {
                Some(term) => cands.push(Candidate { term, passed: 0, dead: false }),
                None => drained = true,
            }
        }
        stats.rounds = r + 1;
        stats.max_fuel = fuel;
        stats.candidates = cands.len();
        stats.completed_size = en.completed_size();
        let mut undecided = false;
        for c in cands.iter_mut().take(width).filter(|c| !c.dead) {
            while c.passed < examples.len() {
                stats.evaluations += 1;
                match problem.check(&c.term, &examples[c.passed], fuel) {
                    Check::Pass => c.passed += 1,
                    Check::Fail => {
                        c.dead = true;
                        break;
                    }
                    Check::Unknown => {
                        undecided = true;
                        break;
                    }
                }
            }
            if c.passed == examples.len() {
                return SynthesisResult::Realized { term: c.term.clone(), stats };
            }
        }
        let capped = en.truncated() || (!drained && cands.len() >= cfg.max_candidates);
        if width >= cands.len() && (drained || capped) {
            if undecided {
                if fuel == cfg.max_fuel {
                    return SynthesisResult::BudgetExhausted { reason: ExhaustReason::FuelCap, stats };
                }
            } else if capped {
                return SynthesisResult::BudgetExhausted { reason: ExhaustReason::WorkCap, stats };
            } else {
                return finished(problem, cfg, cands.len(), stats);
            }
        }
    }
    unreachable!("every candidate is eventually decided or the fuel cap is reached")
}

fn single_pass<S>(problem: &SynthesisProblem, states: &S, fuel_of: impl Fn(&Term) -> Fuel, cfg: &PbeConfig) -> SynthesisResult
where
    S: StateSource + ?Sized,
{
    let mut en = problem.grammar.enumerate(cfg.size_budget).with_limit(cfg.store_limit);
    let mut stats = SynthStats { rounds: 1, ..SynthStats::default() };
    let mut drained = true;
    for term in en.by_ref() {
        if stats.candidates >= cfg.max_candidates {
            drained = false;
            break;
        }
        stats.candidates += 1;
        let fuel = fuel_of(&term);
        stats.max_fuel = stats.max_fuel.max(fuel);
        let mut ok = true;
        for sigma in states.states() {
            stats.evaluations += 1;
            if problem.check(&term, &sigma, fuel) != Check::Pass {
                ok = false;
                break;
            }
        }
        if ok {
            stats.completed_size = en.completed_size();
            return SynthesisResult::Realized { term, stats };
        }
    }
    stats.completed_size = en.completed_size();
    if en.truncated() || !drained {
        return SynthesisResult::BudgetExhausted { reason: ExhaustReason::WorkCap, stats };
    }
    let drawn = stats.candidates;
    finished(problem, cfg, drawn, stats)
}

trait StateSource {
    fn states(&self) -> impl Iterator<Item = State> + '_;
}

impl StateSource for [State] {
    fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.iter().cloned()
    }
}

impl StateSource for Domain {
    fn states(&self) -> impl Iterator<Item = State> + '_ {
        Domain::states(self)
    }
}

/// Search for grammars without loops: every run terminates within
/// `size(term)` steps, so each candidate is checked once on the whole domain
/// (box domains included) and there is no unknown outcome.
pub fn synthesize_loop_free(problem: &SynthesisProblem, size_budget: usize) -> Result<SynthesisResult, SynthesisError> {
    synthesize_loop_free_with(problem, &PbeConfig::new(size_budget))
}

pub fn synthesize_loop_free_with(problem: &SynthesisProblem, cfg: &PbeConfig) -> Result<SynthesisResult, SynthesisError> {
    if problem.grammar.uses_op(|o| o == Op::While) {
        return Err(SynthesisError::HasLoops);
    }
    Ok(single_pass(problem, &problem.domain, |t| t.size() as Fuel, cfg))
}
