//! Text formats: prefix terms, grammar files, problem files, certificates.
//!
//! ```text
//! (grammar (vars x) (start E) (rule E 1) (rule E x) (rule E (+ E E)))
//! (problem (grammar-file e.rtg) (mode total) (domain (finite (state x 3))) (spec (= out 5)))
//! ```

use std::fmt::Write as _;
use std::path::Path;

use impsynth_core::codec::{BetaPair, EncodedTree};
use impsynth_core::synthesis::{CmpOp, Domain, Mode, ProblemError, Spec, SpecExpr, SynthesisProblem};
use impsynth_core::{GrammarError, Op, Rtg, State, Term, VarUniverse};
use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::sexp::{self, Sexp, SexpError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Sexp(#[from] SexpError),
    #[error("expected {expected}, found `{found}`")]
    Expected { expected: &'static str, found: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn expected(what: &'static str, found: &Sexp) -> FormatError {
    FormatError::Expected { expected: what, found: found.to_string() }
}

fn leaf_op(name: &str, universe: &VarUniverse) -> Option<Op> {
    match name {
        "•" => Some(Op::Null),
        _ => Op::from_prefix_name(name).or_else(|| universe.lookup(name).map(Op::Var)),
    }
}

/// Reads a term in prefix form, e.g. `(+ (+ 1 x) 1)` or `(1 null null)`.
pub fn term_from_sexp(s: &Sexp, universe: &VarUniverse) -> Result<Term, FormatError> {
    let op_of = |name: &str| leaf_op(name, universe).ok_or_else(|| FormatError::UnknownVariable(name.into()));
    let bad = |e: impsynth_core::syntax::SortError| FormatError::Invalid(format!("`{s}`: {e}"));
    match s {
        Sexp::Atom(a) => Term::leaf(op_of(a)?).map_err(bad),
        Sexp::List(items) => {
            let (head, args) = items.split_first().ok_or_else(|| expected("a term", s))?;
            let op = op_of(head.atom().ok_or_else(|| expected("an operator", head))?)?;
            let kids = args.iter().map(|a| term_from_sexp(a, universe)).collect::<Result<Vec<_>, _>>()?;
            Term::new(op, kids).map_err(bad)
        }
    }
}

pub fn parse_prefix_term(text: &str, universe: &VarUniverse) -> Result<Term, FormatError> {
    term_from_sexp(&sexp::parse(text)?, universe)
}

fn atoms(items: &[Sexp], what: &'static str) -> Result<Vec<String>, FormatError> {
    items.iter().map(|i| i.atom().map(str::to_string).ok_or_else(|| expected(what, i))).collect()
}

fn section<'a>(items: &'a [Sexp], name: &str) -> Option<&'a [Sexp]> {
    items.iter().find_map(|i| i.form().filter(|(h, _)| *h == name).map(|(_, rest)| rest))
}

fn only<'a>(items: Option<&'a [Sexp]>, what: &'static str, whole: &Sexp) -> Result<&'a Sexp, FormatError> {
    match items {
        Some([one]) => Ok(one),
        _ => Err(expected(what, whole)),
    }
}

pub fn grammar_from_sexp(s: &Sexp) -> Result<Rtg, FormatError> {
    let (head, items) = s.form().filter(|(h, _)| *h == "grammar").ok_or_else(|| expected("(grammar ...)", s))?;
    debug_assert_eq!(head, "grammar");
    let vars = atoms(section(items, "vars").unwrap_or(&[]), "a variable name")?;
    let universe = VarUniverse::new(vars).map_err(|e| FormatError::Invalid(e.to_string()))?;
    let start = only(section(items, "start"), "(start NT)", s)?.atom().ok_or_else(|| expected("(start NT)", s))?;
    let rule_forms: Vec<&[Sexp]> =
        items.iter().filter_map(|i| i.form().filter(|(h, _)| *h == "rule").map(|(_, r)| r)).collect();
    let lhs_names: Vec<&str> = rule_forms.iter().filter_map(|r| r.first()?.atom()).collect();
    let mut rules: Vec<(String, Op, Vec<String>)> = Vec::new();
    for r in &rule_forms {
        let [lhs, rhs] = r else {
            return Err(FormatError::Invalid(format!("rule needs a left and a right side: `(rule {})`", join(r))));
        };
        let lhs = lhs.atom().ok_or_else(|| expected("a nonterminal", lhs))?;
        let (op_name, args) = match rhs {
            Sexp::Atom(a) => (a.as_str(), Vec::new()),
            Sexp::List(parts) => match parts.split_first() {
                Some((h, rest)) => (h.atom().ok_or_else(|| expected("an operator", h))?, atoms(rest, "a nonterminal")?),
                None => return Err(expected("an operator", rhs)),
            },
        };
        if lhs_names.contains(&op_name) {
            return Err(FormatError::Invalid(format!("chain rule `{lhs} ::= {op_name}` is not allowed")));
        }
        let op = leaf_op(op_name, &universe).ok_or_else(|| FormatError::UnknownVariable(op_name.into()))?;
        rules.push((lhs.to_string(), op, args));
    }
    Ok(Rtg::new(universe, start, &rules)?)
}

fn join(items: &[Sexp]) -> String {
    items.iter().map(Sexp::to_string).collect::<Vec<_>>().join(" ")
}

pub fn parse_grammar(text: &str) -> Result<Rtg, FormatError> {
    grammar_from_sexp(&sexp::parse(text)?)
}

fn op_text(op: Op, u: &VarUniverse) -> String {
    match op {
        Op::Var(v) => u.name(v).to_string(),
        op => op.prefix_name().unwrap().to_string(),
    }
}

/// Grammar file text, one rule per line.
pub fn write_grammar(g: &Rtg) -> String {
    let u = g.universe();
    let mut out = String::from("(grammar\n");
    let _ = writeln!(out, "  (vars{})", u.names().iter().map(|n| format!(" {n}")).collect::<String>());
    let _ = writeln!(out, "  (start {})", g.name(g.start()));
    for nt in 0..g.nonterminals().len() {
        for p in g.productions(nt) {
            let op = op_text(p.op, u);
            if p.args.is_empty() {
                let _ = write!(out, "  (rule {} {op})", g.name(nt));
            } else {
                let args: String = p.args.iter().map(|&a| format!(" {}", g.name(a))).collect();
                let _ = write!(out, "  (rule {} ({op}{args}))", g.name(nt));
            }
            out.push('\n');
        }
    }
    out.pop();
    out.push_str(")\n");
    out
}

fn integer(s: &Sexp) -> Result<BigInt, FormatError> {
    s.atom().and_then(|a| a.parse().ok()).ok_or_else(|| expected("an integer", s))
}

/// `(state x 3 y 0)`: every variable, any order.
pub fn state_from_sexp(s: &Sexp, universe: &VarUniverse) -> Result<State, FormatError> {
    let (_, rest) = s.form().filter(|(h, _)| *h == "state").ok_or_else(|| expected("(state var value ...)", s))?;
    if rest.len() % 2 != 0 {
        return Err(expected("(state var value ...)", s));
    }
    let mut vals: Vec<Option<BigInt>> = vec![None; universe.len()];
    for kv in rest.chunks(2) {
        let name = kv[0].atom().ok_or_else(|| expected("a variable", &kv[0]))?;
        let v = universe.lookup(name).ok_or_else(|| FormatError::UnknownVariable(name.into()))?;
        if vals[v.index()].replace(integer(&kv[1])?).is_some() {
            return Err(FormatError::Invalid(format!("`{s}` assigns `{name}` twice")));
        }
    }
    let vals = vals
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| FormatError::Invalid(format!("`{s}` does not assign `{}`", universe.names()[i]))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(State::Vals(vals))
}

fn spec_expr(s: &Sexp, u: &VarUniverse) -> Result<SpecExpr, FormatError> {
    match s {
        Sexp::Atom(a) => Ok(match a.as_str() {
            "out" => SpecExpr::Out,
            "size" => SpecExpr::Size,
            "true" => SpecExpr::Bool(true),
            "false" => SpecExpr::Bool(false),
            a => match a.parse::<BigInt>() {
                Ok(i) => SpecExpr::Int(i),
                Err(_) => SpecExpr::Input(u.lookup(a).ok_or_else(|| FormatError::UnknownVariable(a.into()))?),
            },
        }),
        Sexp::List(_) => {
            let (head, args) = s.form().ok_or_else(|| expected("a specification term", s))?;
            let var = |a: &Sexp| {
                let n = a.atom().ok_or_else(|| expected("a variable", a))?;
                u.lookup(n).ok_or_else(|| FormatError::UnknownVariable(n.into()))
            };
            match (head, args) {
                ("out", [v]) => Ok(SpecExpr::OutVar(var(v)?)),
                ("+" | "-" | "*", [a, b]) => {
                    let (a, b) = (Box::new(spec_expr(a, u)?), Box::new(spec_expr(b, u)?));
                    Ok(match head {
                        "+" => SpecExpr::Add(a, b),
                        "-" => SpecExpr::Sub(a, b),
                        _ => SpecExpr::Mul(a, b),
                    })
                }
                _ => Err(expected("a specification term", s)),
            }
        }
    }
}

pub fn spec_from_sexp(s: &Sexp, u: &VarUniverse) -> Result<Spec, FormatError> {
    match s {
        Sexp::Atom(a) if a == "true" => Ok(Spec::True),
        Sexp::Atom(a) if a == "false" => Ok(Spec::False),
        _ => {
            let (head, args) = s.form().ok_or_else(|| expected("a predicate", s))?;
            let all = |args: &[Sexp]| args.iter().map(|a| spec_from_sexp(a, u)).collect::<Result<Vec<_>, _>>();
            match (head, args) {
                ("and", args) => Ok(Spec::And(all(args)?)),
                ("or", args) => Ok(Spec::Or(all(args)?)),
                ("not", [p]) => Ok(Spec::Not(Box::new(spec_from_sexp(p, u)?))),
                ("=>", [a, b]) => Ok(Spec::Implies(Box::new(spec_from_sexp(a, u)?), Box::new(spec_from_sexp(b, u)?))),
                (op, [a, b]) => match CmpOp::from_name(op) {
                    Some(c) => Ok(Spec::Cmp(c, spec_expr(a, u)?, spec_expr(b, u)?)),
                    None => Err(expected("a predicate", s)),
                },
                _ => Err(expected("a predicate", s)),
            }
        }
    }
}

fn domain_from_sexp(s: &Sexp, u: &VarUniverse) -> Result<Domain, FormatError> {
    match s.form() {
        Some(("finite", states)) => {
            let states = states.iter().map(|st| state_from_sexp(st, u)).collect::<Result<Vec<_>, _>>()?;
            Ok(Domain::finite(states, u)?)
        }
        Some(("box", ranges)) => {
            let mut bounds: Vec<Option<(BigInt, BigInt)>> = vec![None; u.len()];
            for r in ranges {
                let Some([name, lo, hi]) = r.list() else { return Err(expected("(var low high)", r)) };
                let name = name.atom().ok_or_else(|| expected("a variable", name))?;
                let v = u.lookup(name).ok_or_else(|| FormatError::UnknownVariable(name.into()))?;
                bounds[v.index()] = Some((integer(lo)?, integer(hi)?));
            }
            let bounds = bounds
                .into_iter()
                .enumerate()
                .map(|(i, b)| b.ok_or_else(|| FormatError::Invalid(format!("box has no range for `{}`", u.names()[i]))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Domain::bounded_box(bounds, u)?)
        }
        _ => Err(expected("(finite (state ...) ...) or (box (var low high) ...)", s)),
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// Reads a problem; `(grammar-file F)` is resolved relative to `base`.
pub fn parse_problem(text: &str, base: &Path) -> Result<SynthesisProblem, FormatError> {
    let s = sexp::parse(text)?;
    let (_, items) = s.form().filter(|(h, _)| *h == "problem").ok_or_else(|| expected("(problem ...)", &s))?;
    let grammar = if let Some(file) = section(items, "grammar-file") {
        let name = only(Some(file), "(grammar-file PATH)", &s)?.atom().ok_or_else(|| expected("a path", &s))?;
        parse_grammar(&read_file(&base.join(name))?)?
    } else {
        let inline = items
            .iter()
            .find(|i| i.form().is_some_and(|(h, _)| h == "grammar"))
            .ok_or_else(|| FormatError::Invalid("problem needs (grammar-file PATH) or (grammar ...)".into()))?;
        grammar_from_sexp(inline)?
    };
    let u = grammar.universe().clone();
    let mode = match section(items, "mode").map(|m| atoms(m, "total or partial")).transpose()?.as_deref() {
        None => Mode::Total,
        Some([m]) if m == "total" => Mode::Total,
        Some([m]) if m == "partial" => Mode::Partial,
        Some(other) => return Err(FormatError::Invalid(format!("unknown mode `{}`", other.join(" ")))),
    };
    let domain = domain_from_sexp(only(section(items, "domain"), "(domain ...)", &s)?, &u)?;
    let spec = spec_from_sexp(only(section(items, "spec"), "(spec PREDICATE)", &s)?, &u)?;
    Ok(SynthesisProblem::new(grammar, domain, spec, mode)?)
}

/// Certificate file: `a b len` on one line.
pub fn parse_cert(text: &str) -> Result<EncodedTree, FormatError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let [a, b, len] = parts[..] else {
        return Err(FormatError::Invalid("certificate must be three integers: a b len".into()));
    };
    let num = |s: &str| s.parse::<BigUint>().map_err(|_| FormatError::Invalid(format!("`{s}` is not a natural number")));
    let len = len.parse::<usize>().map_err(|_| FormatError::Invalid(format!("`{len}` is not a length")))?;
    EncodedTree::from_pair(BetaPair { a: num(a)?, b: num(b)?, len }).map_err(|e| FormatError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use impsynth_core::fixtures::grammar_e;

    #[test]
    fn grammar_round_trip() {
        let g = parse_grammar("(grammar (vars x) (start E) (rule E 1) (rule E x) (rule E (+ E E)))").unwrap();
        assert_eq!(g.bnf().to_string(), grammar_e().bnf().to_string());
        let bin = g.to_bin_form().unwrap();
        let text = write_grammar(&bin);
        assert!(text.contains("(rule E (1 NullNT NullNT))"));
        assert!(text.contains("(rule NullNT null)"));
        assert!(text.contains("(rule NullNT (nop NullNT NullNT))"));
        let again = parse_grammar(&text).unwrap();
        assert!(again.is_binform());
        assert_eq!(write_grammar(&again), text);
    }

    #[test]
    fn chain_rules_rejected() {
        let err = parse_grammar("(grammar (vars x) (start E) (rule E F) (rule F 1))").unwrap_err();
        assert!(err.to_string().contains("chain rule"));
    }

    #[test]
    fn prefix_terms() {
        let u = VarUniverse::new(["x"]).unwrap();
        let t = parse_prefix_term("(+ (+ 1 x) 1)", &u).unwrap();
        assert_eq!(t.prefix(&u).to_string(), "(+ (+ 1 x) 1)");
        let w = parse_prefix_term("(x null (nop null null))", &u).unwrap();
        assert_eq!(w.prefix(&u).to_string(), "(x null (nop null null))");
        assert!(matches!(parse_prefix_term("(+ 1 z)", &u), Err(FormatError::UnknownVariable(_))));
        assert!(matches!(parse_prefix_term("(+ 1)", &u), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn problems() {
        let text = "(problem (grammar (vars x) (start E) (rule E 1) (rule E x) (rule E (+ E E)))
                     (mode partial) (domain (finite (state x 3) (state x 4))) (spec (= out (+ x 2))))";
        let p = parse_problem(text, Path::new(".")).unwrap();
        assert_eq!(p.mode, Mode::Partial);
        assert_eq!(p.spec.display(p.universe()).to_string(), "(= out (+ x 2))");
        let boxed = "(problem (grammar (vars x y) (start S) (rule S (:= X E)) (rule E 1) (rule X x))
                      (domain (box (y 0 3) (x 0 0))) (spec (= (out x) y)))";
        let p = parse_problem(boxed, Path::new(".")).unwrap();
        assert_eq!(p.domain.states().count(), 4);
        assert!(parse_problem("(problem (domain (finite)))", Path::new(".")).is_err());
    }

    #[test]
    fn certs() {
        let c = parse_cert("79 6 2\n");
        assert!(c.is_err(), "length 2 is not a complete binary tree");
        let c = parse_cert("5 6 3").unwrap();
        assert_eq!(c.height, 1);
        assert!(parse_cert("1 2").is_err());
    }
}
