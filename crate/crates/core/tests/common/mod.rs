#![allow(dead_code)]

use impsynth_core::{Op, Sort, Term, VarId, VarUniverse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn xy() -> VarUniverse {
    VarUniverse::new(["x", "y"]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bin(op: Op, l: Term, r: Term) -> Term {
    Term::binary(op, l, r).unwrap()
}

fn var(rng: &mut ChaCha8Rng, vars: u32) -> Term {
    Term::var(VarId(rng.gen_range(0..vars)))
}

/// Random well-sorted term of roughly `budget` nodes over `vars` variables.
pub fn random_term(rng: &mut ChaCha8Rng, sort: Sort, budget: usize, vars: u32) -> Term {
    let split = |rng: &mut ChaCha8Rng, b: usize| {
        let l = rng.gen_range(1..b.max(2));
        (l, b.saturating_sub(l + 1).max(1))
    };
    match sort {
        Sort::Expression | Sort::Variable => {
            if budget <= 2 || rng.gen_bool(0.25) {
                return match rng.gen_range(0..4) {
                    0 => Term::zero(),
                    1 => Term::one(),
                    _ => var(rng, vars),
                };
            }
            let op = [Op::Plus, Op::Plus, Op::Minus, Op::Times, Op::Div][rng.gen_range(0..5)];
            let (l, r) = split(rng, budget);
            bin(op, random_term(rng, Sort::Expression, l, vars), random_term(rng, Sort::Expression, r, vars))
        }
        Sort::Boolean => {
            if budget <= 2 || rng.gen_bool(0.15) {
                return Term::leaf(if rng.gen_bool(0.5) { Op::True } else { Op::False }).unwrap();
            }
            match rng.gen_range(0..5) {
                0 => Term::new(Op::Not, vec![random_term(rng, Sort::Boolean, budget - 1, vars)]).unwrap(),
                1 => {
                    let (l, r) = split(rng, budget);
                    bin(Op::And, random_term(rng, Sort::Boolean, l, vars), random_term(rng, Sort::Boolean, r, vars))
                }
                k => {
                    let (l, r) = split(rng, budget);
                    let op = if k == 2 { Op::Eq } else { Op::Lt };
                    bin(op, random_term(rng, Sort::Expression, l, vars), random_term(rng, Sort::Expression, r, vars))
                }
            }
        }
        Sort::Statement => {
            let k = if budget <= 4 { 0 } else { rng.gen_range(0..5) };
            match k {
                0 | 1 => bin(Op::Assign, var(rng, vars), random_term(rng, Sort::Expression, budget.saturating_sub(2).max(1), vars)),
                2 => {
                    let (l, r) = split(rng, budget);
                    bin(Op::Seq, random_term(rng, Sort::Statement, l.max(3), vars), random_term(rng, Sort::Statement, r.max(3), vars))
                }
                3 => {
                    let (l, r) = split(rng, budget);
                    bin(Op::If, random_term(rng, Sort::Boolean, l, vars), random_term(rng, Sort::Statement, r.max(3), vars))
                }
                _ => {
                    let (l, r) = split(rng, budget);
                    bin(Op::While, random_term(rng, Sort::Boolean, l, vars), random_term(rng, Sort::Statement, r.max(3), vars))
                }
            }
        }
        Sort::Null => Term::null(),
    }
}

pub fn random_any(rng: &mut ChaCha8Rng, budget: usize) -> Term {
    let sort = [Sort::Expression, Sort::Boolean, Sort::Statement][rng.gen_range(0..3)];
    random_term(rng, sort, budget, 2)
}

/// Numeral `k` as a sum of ones (`0` for `k = 0`).
pub fn numeral(k: u32) -> Term {
    match k {
        0 => Term::zero(),
        _ => (1..k).fold(Term::one(), |acc, _| bin(Op::Plus, acc, Term::one())),
    }
}

/// `while x < k do body` where the body ends with `x := x + c`, `c >= 1`,
/// after assignments to `y` only. Terminates from every state.
pub fn terminating_loop(rng: &mut ChaCha8Rng, k: u32) -> (Term, Term, Term) {
    let x = Term::var(VarId(0));
    let y = Term::var(VarId(1));
    let guard = bin(Op::Lt, x.clone(), numeral(k));
    let step = bin(Op::Plus, x.clone(), numeral(rng.gen_range(1..=2)));
    let mut body = bin(Op::Assign, x.clone(), step);
    for _ in 0..rng.gen_range(0..3) {
        let e = match rng.gen_range(0..3) {
            0 => bin(Op::Plus, y.clone(), x.clone()),
            1 => bin(Op::Times, y.clone(), numeral(2)),
            _ => bin(Op::Minus, x.clone(), y.clone()),
        };
        body = bin(Op::Seq, bin(Op::Assign, y.clone(), e), body);
    }
    let w = bin(Op::While, guard.clone(), body.clone());
    (w, guard, body)
}
