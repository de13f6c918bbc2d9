//! Gödel-style numbering: the beta function, Cantor pairing, zig-zag integers,
//! and the state and term codecs built on them.
//!
//! Operator numbering (stable): `• 0, nop 1, true 2, false 3, not 4, and 5,
//! < 6, = 7, 0 8, 1 9, + 10, - 11, * 12, / 13, := 14, seq 15, if 16, while 17`,
//! and variable `i` is `18 + i`.

use alloc::{vec, vec::Vec};
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::syntax::{Op, SortError, State, Term, VarUniverse};

/// Largest `s` for which [`encode_seq`] builds `s!`.
pub const MAX_CANONICAL_S: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("cannot encode an empty sequence")]
    EmptySequence,
    #[error("sequence needs factorial base {s}!, above the supported {MAX_CANONICAL_S}!")]
    TooLarge { s: usize },
    #[error("term is not a complete binary tree")]
    NotCompleteBinary,
    #[error("encoded tree of height {height} must have {expected} nodes, found {found}")]
    BadLength { height: usize, expected: usize, found: usize },
    #[error("decoded nodes do not form a well-sorted term: {0}")]
    InvalidTerm(SortError),
    #[error("variable code {0} is outside the universe")]
    UnknownVariable(u64),
    #[error("{0} is not the code of any value")]
    NotAnImage(BigUint),
}

/// `a mod (1 + b(i + 1))`.
pub fn beta(a: &BigUint, b: &BigUint, i: usize) -> BigUint {
    a % (b * BigUint::from(i + 1) + 1u32)
}

/// `(a, b)` together with the sequence length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BetaPair {
    pub a: BigUint,
    pub b: BigUint,
    pub len: usize,
}

impl fmt::Display for BetaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.b, self.len)
    }
}

/// Moduli `1 + b(i + 1)` for `i < len`.
pub fn moduli(b: &BigUint, len: usize) -> Vec<BigUint> {
    (0..len).map(|i| b * BigUint::from(i + 1) + 1u32).collect()
}

/// Least non-negative `a` with `a ≡ c_i (mod m_i)`, for pairwise coprime `m_i`.
fn crt(cs: &[BigUint], ms: &[BigUint]) -> BigUint {
    let mut a = BigInt::zero();
    let mut m = BigInt::one();
    for (c, mi) in cs.iter().zip(ms) {
        let mi = BigInt::from(mi.clone());
        let c = BigInt::from(c.clone());
        // a + m·t ≡ c (mod mi)  ⇒  t ≡ (c − a)·m⁻¹ (mod mi)
        let g = (m.clone() % &mi).extended_gcd(&mi);
        debug_assert!(g.gcd.is_one(), "moduli must be coprime");
        let t = ((c - &a) * g.x).mod_floor(&mi);
        a += &m * t;
        m *= mi;
    }
    a.to_biguint().expect("CRT solution is non-negative")
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Canonical construction: `s = max(len, max cs) + 1`, `b = s!`, and `a` the
/// least CRT solution modulo `1 + b(i + 1)`.
pub fn encode_seq(cs: &[BigUint]) -> Result<BetaPair, CodecError> {
    if cs.is_empty() {
        return Err(CodecError::EmptySequence);
    }
    let max = cs.iter().max().unwrap();
    let s = max.to_usize().map_or(usize::MAX, |m| m.max(cs.len()).saturating_add(1));
    if s > MAX_CANONICAL_S {
        return Err(CodecError::TooLarge { s });
    }
    let b = factorial(s);
    let a = crt(cs, &moduli(&b, cs.len()));
    Ok(BetaPair { a, b, len: cs.len() })
}

fn lcm_upto(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
}

/// Beta encoding for sequences with large entries: `b` is the least multiple
/// of `lcm(1..=len)` that is at least `max(cs)`, which keeps the moduli
/// pairwise coprime and above every entry without a factorial.
pub fn encode_seq_compact(cs: &[BigUint]) -> Result<BetaPair, CodecError> {
    if cs.is_empty() {
        return Err(CodecError::EmptySequence);
    }
    let l = lcm_upto(cs.len());
    let max = cs.iter().max().unwrap();
    let k = Integer::div_ceil(max, &l).max(BigUint::one());
    let b = l * k;
    let a = crt(cs, &moduli(&b, cs.len()));
    Ok(BetaPair { a, b, len: cs.len() })
}

/// `⟨beta(a, b, 0), …, beta(a, b, len − 1)⟩`.
pub fn decode_seq(p: &BetaPair) -> Vec<BigUint> {
    (0..p.len).map(|i| beta(&p.a, &p.b, i)).collect()
}

/// Cantor pairing `(x + y)(x + y + 1)/2 + y`.
pub fn pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    ((&s * (&s + 1u32)) >> 1) + y
}

pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let disc: BigUint = (z << 3u32) + 1u32;
    let w = (Roots::sqrt(&disc) - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// Zig-zag: `k ≥ 0 ↦ 2k`, `k < 0 ↦ −2k − 1`.
pub fn int_to_nat(k: &BigInt) -> BigUint {
    match k.sign() {
        Sign::Minus => (k.magnitude() << 1) - 1u32,
        _ => k.magnitude() << 1,
    }
}

pub fn nat_to_int(n: &BigUint) -> BigInt {
    let half = BigInt::from(n >> 1);
    if n.is_odd() {
        -half - 1
    } else {
        half
    }
}

/// Right fold of `pair` over the entries: `[v] ↦ v`, `v :: rest ↦ pair(v, fold rest)`.
pub fn pair_fold(vs: &[BigUint]) -> BigUint {
    match vs.split_last() {
        None => BigUint::zero(),
        Some((last, init)) => init.iter().rev().fold(last.clone(), |acc, v| pair(v, &acc)),
    }
}

pub fn pair_unfold(mut z: BigUint, len: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(len);
    for _ in 1..len {
        let (h, t) = unpair(&z);
        out.push(h);
        z = t;
    }
    if len > 0 {
        out.push(z);
    }
    out
}

/// `∅ ↦ 0`; otherwise `1 +` the pair fold of the zig-zagged values.
pub fn encode_state(s: &State) -> BigUint {
    match s {
        State::Empty => BigUint::zero(),
        State::Vals(vals) => pair_fold(&vals.iter().map(int_to_nat).collect::<Vec<_>>()) + 1u32,
    }
}

/// Inverse of [`encode_state`] for states over `universe`; every natural is a code.
pub fn decode_state(code: &BigUint, universe: &VarUniverse) -> State {
    if code.is_zero() {
        return State::Empty;
    }
    State::Vals(pair_unfold(code - 1u32, universe.len()).iter().map(nat_to_int).collect())
}

/// Nodes of a complete binary tree in heap order: the children of node `i`
/// are `2i + 1` and `2i + 2`.
pub fn heap_order(t: &Term) -> Option<Vec<Term>> {
    if !t.is_complete_binary() {
        return None;
    }
    let mut out = vec![t.clone()];
    let mut i = 0;
    while i < out.len() {
        let kids = out[i].children().to_vec();
        out.extend(kids);
        i += 1;
    }
    Some(out)
}

/// Number of nodes of a complete binary tree of the given height.
pub fn nodes_at_height(height: usize) -> usize {
    (1usize << (height + 1)) - 1
}

/// Height of a complete binary tree with `len` nodes.
pub fn height_for(len: usize) -> Result<usize, CodecError> {
    if len == 0 || !(len + 1).is_power_of_two() {
        let height = (usize::BITS - (len + 1).leading_zeros()) as usize - 1;
        return Err(CodecError::BadLength { height, expected: nodes_at_height(height), found: len });
    }
    Ok((len + 1).trailing_zeros() as usize - 1)
}

/// A beta-encoded heap-order listing of a complete binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EncodedTree {
    pub pair: BetaPair,
    pub height: usize,
}

impl fmt::Display for EncodedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.pair.fmt(f)
    }
}

impl EncodedTree {
    /// Height is implied by the length of a complete binary tree.
    pub fn from_pair(pair: BetaPair) -> Result<Self, CodecError> {
        let height = height_for(pair.len)?;
        Ok(EncodedTree { pair, height })
    }
}

/// Heap-order operator codes of a complete binary term.
pub fn term_codes(t: &Term) -> Result<Vec<BigUint>, CodecError> {
    let nodes = heap_order(t).ok_or(CodecError::NotCompleteBinary)?;
    Ok(nodes.iter().map(|n| BigUint::from(n.op().code())).collect())
}

pub fn encode_term(t: &Term) -> Result<EncodedTree, CodecError> {
    Ok(EncodedTree { pair: encode_seq(&term_codes(t)?)?, height: t.height() })
}

/// Rebuilds a term from heap-order operator codes.
pub fn term_from_codes(codes: &[BigUint], universe: &VarUniverse) -> Result<Term, CodecError> {
    let n = codes.len();
    height_for(n)?;
    let ops = codes
        .iter()
        .map(|c| {
            let code = c.to_u32().ok_or_else(|| CodecError::UnknownVariable(c.to_u64().unwrap_or(u64::MAX)))?;
            let op = Op::from_code(code);
            match op {
                Op::Var(v) if v.index() >= universe.len() => Err(CodecError::UnknownVariable(code as u64)),
                op => Ok(op),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let first_leaf = n / 2;
    let mut built: Vec<Option<Term>> = vec![None; n];
    for i in (0..n).rev() {
        let children = if i < first_leaf {
            vec![built[2 * i + 1].take().unwrap(), built[2 * i + 2].take().unwrap()]
        } else {
            Vec::new()
        };
        built[i] = Some(Term::new(ops[i], children).map_err(CodecError::InvalidTerm)?);
    }
    Ok(built[0].take().unwrap())
}

pub fn decode_term(enc: &EncodedTree, universe: &VarUniverse) -> Result<Term, CodecError> {
    let expected = nodes_at_height(enc.height);
    if enc.pair.len != expected {
        return Err(CodecError::BadLength { height: enc.height, expected, found: enc.pair.len });
    }
    term_from_codes(&decode_seq(&enc.pair), universe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binform::embed;
    use crate::parse::parse_term;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn ns(vs: &[u64]) -> Vec<BigUint> {
        vs.iter().map(|&v| n(v)).collect()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(&n(5), &n(2), 0), n(2));
        assert_eq!(beta(&n(7), &n(0), 9), n(0));
        for b in 0..5 {
            for i in 0..5 {
                assert_eq!(beta(&n(0), &n(b), i), n(0));
            }
        }
        assert_eq!(decode_seq(&BetaPair { a: n(0), b: n(1), len: 4 }), ns(&[0, 0, 0, 0]));
        assert_eq!(decode_seq(&BetaPair { a: n(5), b: n(2), len: 2 }), ns(&[2, 0]));
    }

    /// Least solution found by scanning, independent of the gcd-based CRT.
    fn brute_least(cs: &[u64], b: u64) -> u64 {
        let ms: Vec<u64> = (0..cs.len() as u64).map(|i| 1 + b * (i + 1)).collect();
        (0..ms.iter().product::<u64>()).find(|a| cs.iter().zip(&ms).all(|(c, m)| a % m == *c)).unwrap()
    }

    #[test]
    fn canonical_construction() {
        let p = encode_seq(&ns(&[0])).unwrap();
        assert_eq!((p.a.clone(), p.b.clone(), p.len), (n(0), n(2), 1));
        let p = encode_seq(&ns(&[2, 1])).unwrap();
        // s = 3, b = 6, moduli 7 and 13
        assert_eq!(p.b, n(6));
        assert_eq!(p.a, n(brute_least(&[2, 1], 6)));
        assert_eq!(p.a, n(79));
        assert_eq!(decode_seq(&p), ns(&[2, 1]));
        let p = encode_seq(&ns(&[1, 0, 2])).unwrap();
        assert_eq!(p.b, n(24));
        assert_eq!(p.a, n(brute_least(&[1, 0, 2], 24)));
        for cs in [vec![5, 0, 7, 3], vec![1, 2, 3]] {
            assert_eq!(decode_seq(&encode_seq(&ns(&cs)).unwrap()), ns(&cs));
        }
        assert_eq!(encode_seq(&[]), Err(CodecError::EmptySequence));
        assert!(matches!(encode_seq(&ns(&[10_000])), Err(CodecError::TooLarge { .. })));
    }

    #[test]
    fn canonical_moduli_are_coprime() {
        let p = encode_seq(&ns(&[3, 1, 4, 1, 5, 9, 2, 6])).unwrap();
        let ms = moduli(&p.b, p.len);
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                assert!(ms[i].gcd(&ms[j]).is_one());
            }
        }
    }

    #[test]
    fn compact_construction() {
        let big = BigUint::from(10u32).pow(40);
        let cs = vec![big.clone(), n(0), big.clone() - 1u32, n(17)];
        let p = encode_seq_compact(&cs).unwrap();
        assert_eq!(decode_seq(&p), cs);
        assert!(p.b >= big);
        assert!((&p.b % n(12)).is_zero());
    }

    #[test]
    fn pairing() {
        assert_eq!(pair(&n(0), &n(0)), n(0));
        assert_eq!(pair(&n(1), &n(0)), n(1));
        assert_eq!(pair(&n(0), &n(1)), n(2));
        for z in 0..2000u64 {
            let (x, y) = unpair(&n(z));
            assert_eq!(pair(&x, &y), n(z));
        }
    }

    #[test]
    fn zigzag() {
        let cases = [(0, 0), (1, 2), (-1, 1), (-5, 9), (7, 14)];
        for (k, v) in cases {
            assert_eq!(int_to_nat(&BigInt::from(k)), n(v));
            assert_eq!(nat_to_int(&n(v)), BigInt::from(k));
        }
    }

    #[test]
    fn states() {
        let u = VarUniverse::new(["x"]).unwrap();
        assert_eq!(encode_state(&State::Empty), n(0));
        assert_eq!(encode_state(&State::from_ints(&[0])), n(1));
        assert_eq!(encode_state(&State::from_ints(&[-1])), n(2));
        assert_eq!(decode_state(&n(0), &u), State::Empty);
        let u3 = VarUniverse::new(["x", "y", "z"]).unwrap();
        let s = State::from_ints(&[3, -4, 0]);
        // 1 + pair(6, pair(7, 0))
        assert_eq!(encode_state(&s), pair(&n(6), &pair(&n(7), &n(0))) + 1u32);
        assert_eq!(decode_state(&encode_state(&s), &u3), s);
    }

    #[test]
    fn terms() {
        let u = VarUniverse::new(["x"]).unwrap();
        let leaf = parse_term("1(•, •)", &u).unwrap();
        assert_eq!(term_codes(&leaf).unwrap(), ns(&[9, 0, 0]));
        let plus = parse_term("1 + x", &u).unwrap();
        assert_eq!(term_codes(&plus).unwrap(), ns(&[10, 9, 18]));
        let e = embed(&parse_term("1 + x + 1", &u).unwrap()).unwrap();
        assert_eq!(term_codes(&e).unwrap(), ns(&[10, 10, 9, 9, 18, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0]));
        let enc = encode_term(&e).unwrap();
        assert_eq!(enc.height, 3);
        assert_eq!(decode_term(&enc, &u).unwrap(), e);
        assert_eq!(EncodedTree::from_pair(enc.pair.clone()).unwrap(), enc);
        assert_eq!(encode_term(&parse_term("1 + x + 1", &u).unwrap()), Err(CodecError::NotCompleteBinary));
        // heap order: children of node i sit at 2i+1 and 2i+2
        let nodes = heap_order(&e).unwrap();
        for i in 0..nodes.len() / 2 {
            assert_eq!(nodes[i].children()[0], nodes[2 * i + 1]);
            assert_eq!(nodes[i].children()[1], nodes[2 * i + 2]);
        }
    }

    #[test]
    fn term_decode_errors() {
        let u = VarUniverse::new(["x"]).unwrap();
        assert!(matches!(term_from_codes(&ns(&[10, 9]), &u), Err(CodecError::BadLength { .. })));
        assert!(matches!(term_from_codes(&ns(&[19]), &u), Err(CodecError::UnknownVariable(19))));
        assert!(matches!(term_from_codes(&ns(&[10, 2, 9]), &u), Err(CodecError::InvalidTerm(_))));
        assert!(EncodedTree::from_pair(BetaPair { a: n(0), b: n(1), len: 4 }).is_err());
    }
}
