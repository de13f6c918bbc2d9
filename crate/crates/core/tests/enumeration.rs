//! Enumeration against brute-force membership over every small term.

use impsynth_core::fixtures::grammar_e;
use impsynth_core::synthesis::if_chain_problem;
use impsynth_core::{Op, Rtg, Term, VarId};
use std::collections::BTreeSet;

/// Every term of exactly `n` nodes built from the given operators.
fn all_terms(ops: &[Op], n: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![vec![]];
    for k in 1..=n {
        let mut layer = Vec::new();
        for &op in ops {
            if op.arity() < 2 && k >= 3 {
                for s in 1..k - 1 {
                    for l in &by_size[s] {
                        for r in &by_size[k - 1 - s] {
                            layer.extend(Term::binary(op, l.clone(), r.clone()).ok());
                        }
                    }
                }
            }
            match op.arity() {
                0 if k == 1 => layer.extend(Term::leaf(op).ok()),
                1 if k >= 2 => {
                    for c in &by_size[k - 1] {
                        layer.extend(Term::new(op, vec![c.clone()]).ok());
                    }
                }
                2 if k >= 3 => {
                    for s in 1..k - 1 {
                        for l in &by_size[s] {
                            for r in &by_size[k - 1 - s] {
                                layer.extend(Term::binary(op, l.clone(), r.clone()).ok());
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        by_size.push(layer);
    }
    by_size.concat()
}

fn check(g: &Rtg, ops: &[Op], n: usize) {
    let enumerated: Vec<Term> = g.enumerate(n).collect();
    let set: BTreeSet<String> = enumerated.iter().map(|t| t.prefix(g.universe()).to_string()).collect();
    assert_eq!(set.len(), enumerated.len(), "duplicates");
    let keys: Vec<(usize, String)> = enumerated.iter().map(|t| (t.size(), t.prefix(g.universe()).to_string())).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "not in (size, prefix) order");
    let mut members = 0;
    for t in all_terms(ops, n) {
        let m = g.member(&t);
        assert_eq!(m, set.contains(&t.prefix(g.universe()).to_string()), "{}", t.prefix(g.universe()));
        members += m as usize;
    }
    assert_eq!(members, enumerated.len());
}

#[test]
fn grammar_e_up_to_seven() {
    let x = Op::Var(VarId(0));
    check(&grammar_e(), &[Op::One, Op::Zero, x, Op::Plus, Op::Times], 7);
}

#[test]
fn binform_up_to_seven() {
    let x = Op::Var(VarId(0));
    check(&grammar_e().to_bin_form().unwrap(), &[Op::One, x, Op::Plus, Op::Nop, Op::Null], 7);
}

#[test]
fn statement_grammar_up_to_seven() {
    let g = if_chain_problem(1).grammar;
    let ops = [Op::Assign, Op::If, Op::Seq, Op::Eq, Op::Zero, Op::One, Op::Plus, Op::Var(VarId(0)), Op::Var(VarId(1))];
    check(&g, &ops, 7);
}
