//! IMP programs, regular tree grammars over them, and bounded synthesis.
//!
//! Everything here is pure computation over `alloc`; file formats and the
//! command-line driver live in the `impsynth` crate.
//!
//! * [`syntax`], [`parse`]: terms, variable universes, states, concrete syntax.
//! * [`grammar`], [`binform`]: regular tree grammars, enumeration, complete binary forms.
//! * [`semantics`]: fuel-bounded interpreter.
//! * [`codec`]: beta-function sequence codec, pairing, state and term numbering.
//! * [`value_tree`]: per-node evaluation certificates and their checker.
//! * [`synthesis`]: problems, verification, PBE, CEGIS and the variant table.

#![no_std]

extern crate alloc;

pub mod binform;
pub mod codec;
pub mod fixtures;
pub mod grammar;
pub mod parse;
pub mod semantics;
pub mod synthesis;
pub mod syntax;
pub mod value_tree;

pub use grammar::{GrammarError, Rtg};
pub use parse::{parse_term, print_term, ParseError};
pub use semantics::{eval, EvalOutcome, Fuel};
pub use syntax::{Op, Sort, State, Term, VarId, VarUniverse};
