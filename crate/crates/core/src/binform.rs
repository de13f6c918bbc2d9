//! Complete binary forms of terms: padding with dummy syntax and removing it.

use alloc::vec;

use crate::grammar::{GrammarError, Rtg};
use crate::syntax::{Op, Term};

/// Complete binary tree of dummy syntax with the given height.
pub fn filler(height: usize) -> Term {
    let mut t = Term::null();
    for _ in 0..height {
        t = Term::binary(Op::Nop, t.clone(), t).unwrap();
    }
    t
}

fn pad(t: &Term, height: usize) -> Term {
    debug_assert!(height >= 1);
    let below = height - 1;
    let children = match t.children() {
        [l, r] => vec![pad(l, below), pad(r, below)],
        [c] => vec![pad(c, below), filler(below)],
        [] => vec![filler(below), filler(below)],
        _ => unreachable!("arity is at most 2"),
    };
    Term::new(t.op(), children).expect("padding preserves sorts")
}

/// Embeds a dummy-free term into a complete binary tree of height `height(t) + 1`.
///
/// Operators of arity below two are widened with dummy operands; padding is
/// `nop` at internal positions and `•` at the leaves.
pub fn embed(t: &Term) -> Result<Term, GrammarError> {
    if t.has_dummy_syntax() {
        return Err(GrammarError::DummySyntax);
    }
    Ok(pad(t, t.height() + 1))
}

/// Removes all dummy syntax, narrowing widened operators back to their arity.
pub fn strip(t: &Term) -> Result<Term, GrammarError> {
    if t.op().is_dummy() {
        return Err(GrammarError::DummyRoot);
    }
    let children = t.children()[..t.op().arity()]
        .iter()
        .map(strip)
        .collect::<Result<_, _>>()?;
    Ok(Term::new(t.op(), children).expect("sorts are unchanged by stripping"))
}

/// A complete binary member of `g_bin` with the same meaning as `t`.
pub fn complete_binary_witness(g_bin: &Rtg, t: &Term) -> Result<Term, GrammarError> {
    if !g_bin.is_binform() {
        return Err(GrammarError::NotBinform);
    }
    if !g_bin.member(t) {
        return Err(GrammarError::NotMember);
    }
    let w = embed(&strip(t)?)?;
    if g_bin.member(&w) {
        Ok(w)
    } else {
        // Only possible when `g_bin` widens some but not all low-arity operators.
        Err(GrammarError::NotMember)
    }
}
