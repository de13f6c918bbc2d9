//! Seeded randomized checks behind `impsynth selfcheck`.

use impsynth_core::codec::{decode_seq, decode_state, encode_seq, encode_state};
use impsynth_core::semantics::{eval_counted, loop_trace};
use impsynth_core::value_tree::{build_value_tree, decode_value_tree, encode_value_tree, validate, Verdict};
use impsynth_core::{binform::embed, eval, parse_term, print_term, EvalOutcome, Op, State, Term, VarId, VarUniverse};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{CheckResult, SelfcheckReport};

fn bin(op: Op, l: Term, r: Term) -> Term {
    Term::binary(op, l, r).expect("well sorted")
}

fn numeral(k: u32) -> Term {
    (1..k.max(1)).fold(if k == 0 { Term::zero() } else { Term::one() }, |t, _| bin(Op::Plus, t, Term::one()))
}

fn operand(rng: &mut ChaCha8Rng) -> Term {
    match rng.gen_range(0..3) {
        0 => numeral(rng.gen_range(0..3)),
        1 => Term::var(VarId(0)),
        _ => Term::var(VarId(1)),
    }
}

/// `while x < k do (y-updates; x := x + step)`, always terminating.
fn random_loop(rng: &mut ChaCha8Rng) -> Term {
    let (x, y) = (Term::var(VarId(0)), Term::var(VarId(1)));
    let guard = bin(Op::Lt, x.clone(), numeral(rng.gen_range(0..=5)));
    let step = bin(Op::Assign, x.clone(), bin(Op::Plus, x, numeral(rng.gen_range(1..=2))));
    let mut body = step;
    for _ in 0..rng.gen_range(0..=2) {
        let op = [Op::Plus, Op::Minus, Op::Times][rng.gen_range(0..3)];
        let rhs = bin(op, operand(rng), operand(rng));
        body = bin(Op::Seq, bin(Op::Assign, y.clone(), rhs), body);
    }
    bin(Op::While, guard, body)
}

fn check(name: &str, cases: usize, mut case: impl FnMut() -> bool) -> CheckResult {
    let failures = (0..cases).filter(|_| !case()).count();
    CheckResult { name: name.into(), cases, failures }
}

pub(crate) fn run(seed: u64, cases: usize) -> SelfcheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = VarUniverse::new(["x", "y"]).expect("valid names");
    let mut checks = Vec::new();

    checks.push(check("beta-sequences", cases, || {
        let len = rng.gen_range(1..=8);
        let s: Vec<BigUint> = (0..len).map(|_| BigUint::from(rng.gen_range(0..=100u32))).collect();
        encode_seq(&s).is_ok_and(|p| decode_seq(&p) == s)
    }));

    checks.push(check("state-codes", cases, || {
        let s = State::from_ints(&[rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000)]);
        decode_state(&encode_state(&s), &u) == s
    }));

    checks.push(check("print-parse", cases, || {
        let t = random_loop(&mut rng);
        parse_term(&print_term(&t, &u), &u).is_ok_and(|back| back == t)
    }));

    checks.push(check("loop-traces", cases, || {
        let t = random_loop(&mut rng);
        let sigma = State::from_ints(&[rng.gen_range(0..=3), rng.gen_range(0..=3)]);
        let [b, s] = t.children() else { return false };
        let (out, used) = eval_counted(&t, &sigma, 100_000);
        let agrees = match (loop_trace(b, s, &sigma, 100_000), &out) {
            (Ok(trace), EvalOutcome::StateOut(end)) => trace.last() == Some(end),
            _ => false,
        };
        agrees && eval(&t, &sigma, used) == out && eval(&t, &sigma, used.saturating_sub(1)).is_exhausted()
    }));

    checks.push(check("certificates", cases, || {
        let Ok(f) = embed(&random_loop(&mut rng)) else { return false };
        let sigma = State::from_ints(&[rng.gen_range(0..=3), rng.gen_range(0..=3)]);
        let Ok(v) = build_value_tree(&f, &sigma, 100_000) else { return false };
        let valid = validate(&f, &sigma, &v) == Ok(Verdict::Valid);
        let round_trip = encode_value_tree(&v)
            .ok()
            .and_then(|enc| decode_value_tree(&enc, sigma.clone(), &u).ok())
            .is_some_and(|back| back == v);
        valid && round_trip && v.output() == Some(eval(&f, &sigma, 100_000))
    }));

    SelfcheckReport { command: "selfcheck".into(), seed, checks }
}
