//! Input domains: explicit state lists and bounded integer boxes.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::syntax::{State, VarUniverse};

use super::ProblemError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Non-empty, duplicate-free list of states, in the given order.
    Finite(Vec<State>),
    /// Inclusive interval per variable; every state inside the box.
    BoundedBox(Vec<(BigInt, BigInt)>),
}

impl Domain {
    pub fn finite(states: Vec<State>, universe: &VarUniverse) -> Result<Domain, ProblemError> {
        if states.is_empty() {
            return Err(ProblemError::EmptyDomain);
        }
        for (i, s) in states.iter().enumerate() {
            if s.values().map(<[BigInt]>::len) != Some(universe.len()) {
                return Err(ProblemError::StateShape);
            }
            if states[..i].contains(s) {
                return Err(ProblemError::DuplicateState);
            }
        }
        Ok(Domain::Finite(states))
    }

    pub fn bounded_box(bounds: Vec<(BigInt, BigInt)>, universe: &VarUniverse) -> Result<Domain, ProblemError> {
        if bounds.len() != universe.len() {
            return Err(ProblemError::StateShape);
        }
        if bounds.is_empty() || bounds.iter().any(|(lo, hi)| lo > hi) {
            return Err(ProblemError::EmptyDomain);
        }
        Ok(Domain::BoundedBox(bounds))
    }

    pub fn is_finite_list(&self) -> bool {
        matches!(self, Domain::Finite(_))
    }

    /// Number of states.
    pub fn cardinality(&self) -> BigUint {
        match self {
            Domain::Finite(s) => BigUint::from(s.len()),
            Domain::BoundedBox(b) => b
                .iter()
                .map(|(lo, hi)| (hi - lo + 1u32).to_biguint().unwrap_or_default())
                .fold(BigUint::one(), |a, n| a * n),
        }
    }

    pub fn contains(&self, sigma: &State) -> bool {
        match self {
            Domain::Finite(s) => s.contains(sigma),
            Domain::BoundedBox(b) => match sigma.values() {
                Some(vs) if vs.len() == b.len() => vs.iter().zip(b).all(|(v, (lo, hi))| lo <= v && v <= hi),
                _ => false,
            },
        }
    }

    /// States in canonical order: list order, or lexicographic with the first
    /// variable most significant.
    pub fn states(&self) -> States<'_> {
        match self {
            Domain::Finite(s) => States::List(s.iter()),
            Domain::BoundedBox(b) => States::Box { bounds: b, next: Some(b.iter().map(|(lo, _)| lo.clone()).collect()) },
        }
    }
}

pub enum States<'a> {
    List(core::slice::Iter<'a, State>),
    Box { bounds: &'a [(BigInt, BigInt)], next: Option<Vec<BigInt>> },
}

impl Iterator for States<'_> {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        match self {
            States::List(it) => it.next().cloned(),
            States::Box { bounds, next } => {
                let cur = next.take()?;
                let mut succ = cur.clone();
                for i in (0..succ.len()).rev() {
                    if succ[i] < bounds[i].1 {
                        succ[i] += 1;
                        *next = Some(succ);
                        break;
                    }
                    succ[i] = bounds[i].0.clone();
                }
                Some(State::Vals(cur))
            }
        }
    }
}

impl Domain {
    /// Whether every variable is pinned, i.e. the domain has one state.
    pub fn is_singleton(&self) -> bool {
        self.cardinality().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn box_order() {
        let u = VarUniverse::new(["x", "y"]).unwrap();
        let d = Domain::bounded_box(vec![(0.into(), 1.into()), (5.into(), 7.into())], &u).unwrap();
        let got: Vec<State> = d.states().collect();
        let want: Vec<State> = [[0, 5], [0, 6], [0, 7], [1, 5], [1, 6], [1, 7]]
            .iter()
            .map(|v| State::from_ints(v))
            .collect();
        assert_eq!(got, want);
        assert_eq!(d.cardinality(), BigUint::from(6u32));
        assert!(d.contains(&State::from_ints(&[1, 6])));
        assert!(!d.contains(&State::from_ints(&[2, 6])));
    }

    #[test]
    fn validation() {
        let u = VarUniverse::new(["x"]).unwrap();
        assert_eq!(Domain::finite(vec![], &u), Err(ProblemError::EmptyDomain));
        let s = State::from_ints(&[1]);
        assert_eq!(Domain::finite(vec![s.clone(), s.clone()], &u), Err(ProblemError::DuplicateState));
        assert_eq!(Domain::finite(vec![State::from_ints(&[1, 2])], &u), Err(ProblemError::StateShape));
        assert_eq!(Domain::bounded_box(vec![(2.into(), 1.into())], &u), Err(ProblemError::EmptyDomain));
        assert!(Domain::finite(vec![s], &u).unwrap().is_singleton());
    }
}
