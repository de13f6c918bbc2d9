//! Regular tree grammars over IMP operators.

use alloc::{
    collections::BTreeSet,
    format,
    string::{String, ToString},
    vec,
    vec::Vec,
};
use core::fmt;

use thiserror::Error;

use crate::syntax::{is_identifier, Op, Slot, Sort, Term, VarUniverse, RESERVED};

pub type NtId = usize;

/// Name given to the dummy nonterminal of a complete binary form.
pub const NULL_NT: &str = "NullNT";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Production {
    pub op: Op,
    pub args: Vec<NtId>,
}

/// Marks a grammar as a complete binary form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinformTag {
    pub null_nt: NtId,
    /// Operators that were widened to two operands.
    pub widened: BTreeSet<Op>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("grammar has no rules")]
    Empty,
    #[error("nonterminal `{0}` is used but has no rules")]
    Undeclared(String),
    #[error("start symbol `{0}` has no rules")]
    UnknownStart(String),
    #[error("`{0}` cannot name a nonterminal")]
    BadName(String),
    #[error("rule for `{nt}`: `{op}` takes {expected} operand(s), got {found}")]
    Arity { nt: String, op: String, expected: usize, found: usize },
    #[error("rule for `{nt}`: operand {slot} of `{op}` must be {expected}, but `{arg}` derives {found}")]
    Slot { nt: String, op: String, slot: usize, expected: Slot, arg: String, found: Sort },
    #[error("nonterminal `{0}` mixes terms of different sorts")]
    MixedSorts(String),
    #[error("dummy syntax requires a single `{NULL_NT}` nonterminal with rules `null | nop({NULL_NT}, {NULL_NT})`")]
    MalformedBinform,
    #[error("grammar is already a complete binary form")]
    AlreadyBinform,
    #[error("grammar is not a complete binary form")]
    NotBinform,
    #[error("nonterminal name `{NULL_NT}` is already in use")]
    NullNtTaken,
    #[error("term contains dummy syntax")]
    DummySyntax,
    #[error("term has a dummy root")]
    DummyRoot,
    #[error("term is not in the grammar's language")]
    NotMember,
}

/// A regular tree grammar whose productions are single IMP operators applied
/// to nonterminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rtg {
    universe: VarUniverse,
    names: Vec<String>,
    start: NtId,
    rules: Vec<Vec<Production>>,
    sorts: Vec<Sort>,
    binform: Option<BinformTag>,
}

fn op_name(op: Op, u: &VarUniverse) -> String {
    match op {
        Op::Var(v) => u.name(v).to_string(),
        op => op.prefix_name().unwrap().to_string(),
    }
}

/// Whether `name` may label a nonterminal of a grammar over `universe`.
pub fn valid_nonterminal_name(name: &str, universe: &VarUniverse) -> bool {
    is_identifier(name) && !RESERVED.contains(&name) && universe.lookup(name).is_none()
}

impl Rtg {
    /// Builds a grammar from `(lhs, op, args)` rules. Nonterminals are the
    /// left-hand sides, in order of first appearance.
    pub fn new<S: AsRef<str>>(
        universe: VarUniverse,
        start: &str,
        rules: &[(S, Op, Vec<S>)],
    ) -> Result<Rtg, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::Empty);
        }
        let mut names: Vec<String> = Vec::new();
        for (lhs, _, _) in rules {
            let lhs = lhs.as_ref();
            if !names.iter().any(|n| n == lhs) {
                if !valid_nonterminal_name(lhs, &universe) {
                    return Err(GrammarError::BadName(lhs.to_string()));
                }
                names.push(lhs.to_string());
            }
        }
        let id = |n: &str| names.iter().position(|m| m == n);
        let start_id = id(start).ok_or_else(|| GrammarError::UnknownStart(start.to_string()))?;
        let mut table: Vec<Vec<Production>> = vec![Vec::new(); names.len()];
        for (lhs, op, args) in rules {
            let args = args
                .iter()
                .map(|a| id(a.as_ref()).ok_or_else(|| GrammarError::Undeclared(a.as_ref().to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let prod = Production { op: *op, args };
            let slot = &mut table[id(lhs.as_ref()).unwrap()];
            if !slot.contains(&prod) {
                slot.push(prod);
            }
        }
        Rtg::from_parts(universe, names, start_id, table)
    }

    fn from_parts(
        universe: VarUniverse,
        names: Vec<String>,
        start: NtId,
        rules: Vec<Vec<Production>>,
    ) -> Result<Rtg, GrammarError> {
        let mut sorts = Vec::with_capacity(names.len());
        for (nt, prods) in rules.iter().enumerate() {
            let mut sort: Option<Sort> = None;
            for p in prods {
                let s = p.op.sort();
                sort = Some(match (sort, s) {
                    (None, s) => s,
                    (Some(a), b) if a == b => a,
                    (Some(Sort::Variable), Sort::Expression) | (Some(Sort::Expression), Sort::Variable) => {
                        Sort::Expression
                    }
                    _ => return Err(GrammarError::MixedSorts(names[nt].clone())),
                });
            }
            sorts.push(sort.expect("every nonterminal has a rule"));
        }
        let mut dummy = false;
        for (nt, prods) in rules.iter().enumerate() {
            for p in prods {
                let slots = p.op.slots();
                let widened = p.args.len() == 2 && p.op.is_widenable();
                if p.args.len() != slots.len() && !widened {
                    return Err(GrammarError::Arity {
                        nt: names[nt].clone(),
                        op: op_name(p.op, &universe),
                        expected: slots.len(),
                        found: p.args.len(),
                    });
                }
                dummy |= widened || p.op.is_dummy();
                for (i, &a) in p.args.iter().enumerate() {
                    let slot = slots.get(i).copied().unwrap_or(Slot::Null);
                    if !slot.accepts(sorts[a]) {
                        return Err(GrammarError::Slot {
                            nt: names[nt].clone(),
                            op: op_name(p.op, &universe),
                            slot: i,
                            expected: slot,
                            arg: names[a].clone(),
                            found: sorts[a],
                        });
                    }
                }
                if let Op::Var(v) = p.op {
                    if v.index() >= universe.len() {
                        return Err(GrammarError::BadName(format!("v{}", v.0)));
                    }
                }
            }
        }
        let binform = if dummy { Some(detect_binform(&names, &rules, &sorts)?) } else { None };
        Ok(Rtg { universe, names, start, rules, sorts, binform })
    }

    pub fn universe(&self) -> &VarUniverse {
        &self.universe
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, nt: NtId) -> &str {
        &self.names[nt]
    }

    pub fn lookup(&self, name: &str) -> Option<NtId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn productions(&self, nt: NtId) -> &[Production] {
        &self.rules[nt]
    }

    pub fn sort(&self, nt: NtId) -> Sort {
        self.sorts[nt]
    }

    pub fn binform_tag(&self) -> Option<&BinformTag> {
        self.binform.as_ref()
    }

    pub fn is_binform(&self) -> bool {
        self.binform.is_some()
    }

    /// Whether any production uses `op` (variables compared by identity).
    pub fn uses_op(&self, pred: impl Fn(Op) -> bool) -> bool {
        self.rules.iter().flatten().any(|p| pred(p.op))
    }

    /// Nonterminals deriving `t`, as a membership vector.
    fn labels(&self, t: &Term) -> Vec<bool> {
        let kids: Vec<Vec<bool>> = t.children().iter().map(|c| self.labels(c)).collect();
        self.rules
            .iter()
            .map(|prods| {
                prods.iter().any(|p| {
                    p.op == t.op()
                        && p.args.len() == kids.len()
                        && p.args.iter().zip(&kids).all(|(&a, k)| k[a])
                })
            })
            .collect()
    }

    /// Bottom-up membership test.
    pub fn member(&self, t: &Term) -> bool {
        self.labels(t)[self.start]
    }

    /// Whether `nt` derives `t`.
    pub fn derives(&self, nt: NtId, t: &Term) -> bool {
        self.labels(t)[nt]
    }

    fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.names.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for (nt, rules) in self.rules.iter().enumerate() {
                if !prod[nt] && rules.iter().any(|p| p.args.iter().all(|&a| prod[a])) {
                    prod[nt] = true;
                    changed = true;
                }
            }
        }
        prod
    }

    /// Productive nonterminals reachable from the start through productive rules.
    fn useful(&self) -> (Vec<bool>, Vec<bool>) {
        let productive = self.productive();
        let mut reach = vec![false; self.names.len()];
        if !productive[self.start] {
            return (productive, reach);
        }
        let mut stack = vec![self.start];
        reach[self.start] = true;
        while let Some(nt) = stack.pop() {
            for p in &self.rules[nt] {
                if p.args.iter().all(|&a| productive[a]) {
                    for &a in &p.args {
                        if !reach[a] {
                            reach[a] = true;
                            stack.push(a);
                        }
                    }
                }
            }
        }
        (productive, reach)
    }

    pub fn is_empty(&self) -> bool {
        !self.productive()[self.start]
    }

    /// Size of the largest term of a finite language; `None` if the language is infinite.
    pub fn max_term_size(&self) -> Option<usize> {
        let (productive, reach) = self.useful();
        if !productive[self.start] {
            return Some(0);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.names.len()];
        let mut best = vec![0usize; self.names.len()];
        fn visit(g: &Rtg, nt: NtId, productive: &[bool], state: &mut [u8], best: &mut [usize]) -> bool {
            state[nt] = 1;
            let mut m = 0;
            for p in &g.rules[nt] {
                if !p.args.iter().all(|&a| productive[a]) {
                    continue;
                }
                let mut size = 1;
                for &a in &p.args {
                    let seen = state[a];
                    if seen == 1 || (seen == 0 && !visit(g, a, productive, state, best)) {
                        return false;
                    }
                    size += best[a];
                }
                m = m.max(size);
            }
            state[nt] = 2;
            best[nt] = m;
            true
        }
        debug_assert!(reach[self.start]);
        visit(self, self.start, &productive, &mut state, &mut best).then(|| best[self.start])
    }

    pub fn is_finite(&self) -> bool {
        self.max_term_size().is_some()
    }

    /// Size-ordered enumeration of `L(self)` up to `max_size` nodes.
    pub fn enumerate(&self, max_size: usize) -> Enumerator<'_> {
        Enumerator::new(self, max_size)
    }

    /// Rules in BNF, one nonterminal per line.
    pub fn bnf(&self) -> Bnf<'_> {
        Bnf(self)
    }

    /// The complete binary form: every operator of arity < 2 gains `NullNT`
    /// operands, and `NullNT ::= • | nop(NullNT, NullNT)` is added.
    pub fn to_bin_form(&self) -> Result<Rtg, GrammarError> {
        if self.is_binform() {
            return Err(GrammarError::AlreadyBinform);
        }
        if self.lookup(NULL_NT).is_some() {
            return Err(GrammarError::NullNtTaken);
        }
        let null = self.names.len();
        let mut names = self.names.clone();
        names.push(NULL_NT.to_string());
        let mut rules: Vec<Vec<Production>> = self
            .rules
            .iter()
            .map(|prods| {
                prods
                    .iter()
                    .map(|p| {
                        let mut args = p.args.clone();
                        args.resize(2, null);
                        Production { op: p.op, args }
                    })
                    .collect()
            })
            .collect();
        rules.push(vec![
            Production { op: Op::Null, args: vec![] },
            Production { op: Op::Nop, args: vec![null, null] },
        ]);
        let g = Rtg::from_parts(self.universe.clone(), names, self.start, rules)?;
        debug_assert!(g.is_binform());
        Ok(g)
    }
}

fn detect_binform(names: &[String], rules: &[Vec<Production>], sorts: &[Sort]) -> Result<BinformTag, GrammarError> {
    let nulls: Vec<NtId> = (0..names.len()).filter(|&nt| sorts[nt] == Sort::Null).collect();
    let [null_nt] = nulls[..] else {
        return Err(GrammarError::MalformedBinform);
    };
    let expected = [
        Production { op: Op::Null, args: vec![] },
        Production { op: Op::Nop, args: vec![null_nt, null_nt] },
    ];
    let prods = &rules[null_nt];
    if prods.len() != 2 || !expected.iter().all(|e| prods.contains(e)) {
        return Err(GrammarError::MalformedBinform);
    }
    let widened = rules
        .iter()
        .flatten()
        .filter(|p| p.args.len() > p.op.arity() && !p.op.is_dummy())
        .map(|p| p.op)
        .collect();
    Ok(BinformTag { null_nt, widened })
}

pub struct Bnf<'a>(&'a Rtg);

impl fmt::Display for Bnf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0;
        for (nt, prods) in g.rules.iter().enumerate() {
            write!(f, "{} ::= ", g.names[nt])?;
            for (i, p) in prods.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                let a = |k: usize| g.names[p.args[k]].as_str();
                let widened = p.args.len() > p.op.arity();
                match (p.op, p.args.len()) {
                    (op, 0) => f.write_str(&bnf_leaf(op, &g.universe))?,
                    (Op::Not, 1) => write!(f, "!{}", a(0))?,
                    (Op::Assign, 2) => write!(f, "{} := {}", a(0), a(1))?,
                    (Op::Seq, 2) => write!(f, "{}; {}", a(0), a(1))?,
                    (Op::If, 2) => write!(f, "if {} then {}", a(0), a(1))?,
                    (Op::While, 2) => write!(f, "while {} do {}", a(0), a(1))?,
                    (op, 2) if !widened && op != Op::Nop => {
                        let sym = match op {
                            Op::And => "and",
                            op => op.prefix_name().unwrap(),
                        };
                        write!(f, "{} {} {}", a(0), sym, a(1))?
                    }
                    (op, _) => {
                        let head = match op {
                            Op::Not => "not".to_string(),
                            op => bnf_leaf(op, &g.universe),
                        };
                        write!(f, "{head}(")?;
                        for k in 0..p.args.len() {
                            if k > 0 {
                                f.write_str(", ")?;
                            }
                            f.write_str(a(k))?;
                        }
                        f.write_str(")")?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn bnf_leaf(op: Op, u: &VarUniverse) -> String {
    match op {
        Op::Null => "•".to_string(),
        op => op_name(op, u),
    }
}

/// Lazily materialises `L(g)` in (size, prefix form) order.
///
/// Terms of each size are built for every nonterminal at once from the
/// smaller layers, sorted and deduplicated. `with_limit` caps the number of
/// stored terms; hitting the cap ends the enumeration early and sets
/// [`Enumerator::truncated`].
pub struct Enumerator<'g> {
    g: &'g Rtg,
    max_size: usize,
    /// `layers[n][nt]`: terms of size `n` derived by `nt`.
    layers: Vec<Vec<Vec<Term>>>,
    queue: alloc::collections::VecDeque<Term>,
    stored: usize,
    limit: usize,
    truncated: bool,
    produced: usize,
}

impl<'g> Enumerator<'g> {
    pub fn new(g: &'g Rtg, max_size: usize) -> Self {
        Enumerator {
            g,
            max_size,
            layers: vec![vec![Vec::new(); g.names.len()]],
            queue: Default::default(),
            stored: 0,
            limit: usize::MAX,
            truncated: false,
            produced: 0,
        }
    }

    /// Caps the number of stored terms across all nonterminals.
    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    /// Whether enumeration stopped at the storage cap rather than at `max_size`.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Largest size whose layer has been completed.
    pub fn completed_size(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn produced(&self) -> usize {
        self.produced
    }

    fn build_layer(&mut self) -> bool {
        let n = self.layers.len();
        if n > self.max_size || self.truncated {
            return false;
        }
        let g = self.g;
        let mut layer: Vec<Vec<Term>> = Vec::with_capacity(g.names.len());
        for prods in &g.rules {
            let mut keyed: Vec<(String, Term)> = Vec::new();
            let push = |t: Term, keyed: &mut Vec<(String, Term)>| {
                keyed.push((t.prefix(&g.universe).to_string(), t));
            };
            for p in prods {
                match p.args[..] {
                    [] if n == 1 => push(Term::new(p.op, vec![]).unwrap(), &mut keyed),
                    [a] if n >= 2 => {
                        for c in &self.layers[n - 1][a] {
                            push(Term::new(p.op, vec![c.clone()]).unwrap(), &mut keyed);
                        }
                    }
                    [a, b] if n >= 3 => {
                        for s in 1..n - 1 {
                            for l in &self.layers[s][a] {
                                for r in &self.layers[n - 1 - s][b] {
                                    push(Term::new(p.op, vec![l.clone(), r.clone()]).unwrap(), &mut keyed);
                                }
                            }
                            if self.stored + keyed.len() > self.limit {
                                self.truncated = true;
                                return false;
                            }
                        }
                    }
                    _ => {}
                }
            }
            keyed.sort_unstable_by(|x, y| x.0.cmp(&y.0));
            keyed.dedup_by(|x, y| x.0 == y.0);
            self.stored += keyed.len();
            if self.stored > self.limit {
                self.truncated = true;
                return false;
            }
            layer.push(keyed.into_iter().map(|(_, t)| t).collect());
        }
        self.queue.extend(layer[g.start].iter().cloned());
        self.layers.push(layer);
        true
    }
}

impl Iterator for Enumerator<'_> {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        while self.queue.is_empty() {
            if !self.build_layer() {
                return None;
            }
        }
        self.produced += 1;
        self.queue.pop_front()
    }
}
