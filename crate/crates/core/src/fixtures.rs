//! Small grammars used across tests, the CLI corpus and the acceptance suite.

use alloc::vec;

use crate::grammar::Rtg;
use crate::syntax::{Op, VarId, VarUniverse};

/// `E ::= 1 | x | E + E` over the universe `[x]`.
pub fn grammar_e() -> Rtg {
    let u = VarUniverse::new(["x"]).unwrap();
    Rtg::new(
        u,
        "E",
        &[
            ("E", Op::One, vec![]),
            ("E", Op::Var(VarId(0)), vec![]),
            ("E", Op::Plus, vec!["E", "E"]),
        ],
    )
    .unwrap()
}
