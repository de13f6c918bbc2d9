//! Position of each synthesis variant in the arithmetical hierarchy.

use alloc::{format, string::String};
use core::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    General,
    FiniteExamples,
    LoopFree,
    PartialCorrectness,
    Generalization,
    /// Specifications that are themselves `Σn` formulas.
    SpecSigmaN(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown variant `{0}`; expected general, finite-examples, loop-free, partial-correctness, generalization or spec-sigma-N")]
pub struct UnknownVariant(pub String);

impl FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "general" => Variant::General,
            "finite-examples" => Variant::FiniteExamples,
            "loop-free" => Variant::LoopFree,
            "partial-correctness" => Variant::PartialCorrectness,
            "generalization" => Variant::Generalization,
            _ => match s.strip_prefix("spec-sigma-").and_then(|n| n.parse().ok()) {
                Some(n) => Variant::SpecSigmaN(n),
                None => return Err(UnknownVariant(s.into())),
            },
        })
    }
}

impl Variant {
    pub fn tag(self) -> String {
        match self {
            Variant::General => "general".into(),
            Variant::FiniteExamples => "finite-examples".into(),
            Variant::LoopFree => "loop-free".into(),
            Variant::PartialCorrectness => "partial-correctness".into(),
            Variant::Generalization => "generalization".into(),
            Variant::SpecSigmaN(n) => format!("spec-sigma-{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyClass {
    pub label: String,
    pub rationale: String,
}

pub fn classify(variant: Variant) -> HierarchyClass {
    let (label, rationale): (String, &str) = match variant {
        Variant::General => (
            "Σ3-complete".into(),
            "exists a term such that for all inputs there is a finite certificate of the run: \
             three alternations; cofiniteness reduces to it",
        ),
        Variant::FiniteExamples => (
            "Σ1-complete".into(),
            "the universal over inputs becomes a finite conjunction; a dovetailed search \
             semidecides it and the halting problem reduces to it",
        ),
        Variant::Generalization => (
            "Σ2-complete".into(),
            "deciding whether a candidate correct on the examples is correct on every input",
        ),
        Variant::LoopFree => (
            "Σ2-complete".into(),
            "without loops the semantics is decidable, removing the existential over run \
             certificates",
        ),
        Variant::PartialCorrectness => (
            "in Σ2".into(),
            "the specification only has to hold when the run terminates; the implication \
             becomes a disjunction with non-termination",
        ),
        Variant::SpecSigmaN(n) => (
            format!("in Σ{}", n + 3),
            "a Σn specification adds n alternations on top of the general problem",
        ),
    };
    HierarchyClass { label, rationale: rationale.into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        let l = |v| classify(v).label;
        assert_eq!(l(Variant::General), "Σ3-complete");
        assert_eq!(l(Variant::FiniteExamples), "Σ1-complete");
        assert_eq!(l(Variant::Generalization), "Σ2-complete");
        assert_eq!(l(Variant::LoopFree), "Σ2-complete");
        assert_eq!(l(Variant::PartialCorrectness), "in Σ2");
        assert_eq!(l(Variant::SpecSigmaN(2)), "in Σ5");
    }

    #[test]
    fn tags_round_trip() {
        for v in [Variant::General, Variant::LoopFree, Variant::SpecSigmaN(4), Variant::PartialCorrectness] {
            assert_eq!(v.tag().parse::<Variant>(), Ok(v));
        }
        assert!("sigma".parse::<Variant>().is_err());
    }
}
