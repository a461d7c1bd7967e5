//! Hirzebruch–Jung strings and their arithmetic.
//!
//! A chain `[e1, .., en]` of curves with self-intersections `-ei` corresponds to the
//! continued fraction `r/a = e1 - 1/(e2 - 1/(...))`.

use crate::rational::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HjError {
    #[error("chain entry {0} is below 2")]
    EntryTooSmall(u32),
    #[error("pair ({r},{a}) is not coprime with r > a >= 1")]
    BadPair { r: u64, a: u64 },
    #[error("determinant does not fit in 64 bits")]
    Overflow,
}

/// A chain of weights, each at least 2. The empty chain stands for a smooth side.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct HjSeq(Vec<u32>);

impl HjSeq {
    pub fn new(entries: Vec<u32>) -> Result<Self, HjError> {
        if let Some(&e) = entries.iter().find(|&&e| e < 2) {
            return Err(HjError::EntryTooSmall(e));
        }
        Ok(HjSeq(entries))
    }

    pub fn empty() -> Self {
        HjSeq(Vec::new())
    }

    pub fn twos(n: usize) -> Self {
        HjSeq(vec![2; n])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        HjSeq(self.0.iter().rev().copied().collect())
    }

    /// Concatenation; both halves are already valid.
    pub fn concat(&self, other: &HjSeq) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        HjSeq(v)
    }

    pub fn det(&self) -> BigInt {
        det_hj(&self.0)
    }
}

impl TryFrom<Vec<u32>> for HjSeq {
    type Error = HjError;
    fn try_from(v: Vec<u32>) -> Result<Self, HjError> {
        HjSeq::new(v)
    }
}

impl From<HjSeq> for Vec<u32> {
    fn from(s: HjSeq) -> Vec<u32> {
        s.0
    }
}

impl std::ops::Deref for HjSeq {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for HjSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// `(r, a)` with `r > a >= 1` coprime, or the smooth pair `(1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoprimePair {
    pub r: u64,
    pub a: u64,
}

impl CoprimePair {
    pub fn new(r: u64, a: u64) -> Result<Self, HjError> {
        if (r, a) == (1, 0) || (a >= 1 && r > a && r.gcd(&a) == 1) {
            Ok(CoprimePair { r, a })
        } else {
            Err(HjError::BadPair { r, a })
        }
    }
}

impl fmt::Display for CoprimePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.a)
    }
}

/// Determinant of the chain: `det[] = 1`, `det[e] = e`,
/// `det[e1..en] = e1 * det[e2..en] - det[e3..en]`.
pub fn det_hj(seq: &[u32]) -> BigInt {
    // run from the right end so each step uses the two previous suffix values
    let mut hi = BigInt::one(); // det of the current suffix
    let mut lo = BigInt::zero(); // det of the suffix one shorter; det of "[] minus one" is 0
    for &e in seq.iter().rev() {
        let next = BigInt::from(e) * &hi - &lo;
        lo = std::mem::replace(&mut hi, next);
    }
    hi
}

/// `det[e1..ej]` for `j = 0..=n`.
pub fn prefix_dets(seq: &[u32]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(BigInt::one());
    let mut prev = BigInt::zero();
    for &e in seq {
        let cur = out.last().unwrap().clone();
        let next = BigInt::from(e) * &cur - &prev;
        prev = cur;
        out.push(next);
    }
    out
}

/// `det[ej..en]` for `j = 0..=n` (index `n` is the empty suffix).
pub fn suffix_dets(seq: &[u32]) -> Vec<BigInt> {
    let rev: Vec<u32> = seq.iter().rev().copied().collect();
    let mut p = prefix_dets(&rev);
    p.reverse();
    p
}

/// Expansion of `r/a` as a chain.
pub fn seq_from_pair(p: CoprimePair) -> HjSeq {
    let (mut r, mut a) = (p.r, p.a);
    let mut out = Vec::new();
    if a == 0 {
        return HjSeq(out);
    }
    while a > 1 {
        let e = r.div_ceil(a);
        out.push(e as u32);
        (r, a) = (a, e * a - r);
    }
    out.push(r as u32);
    HjSeq(out)
}

/// `(det seq, det tail)` as a machine-word pair.
pub fn pair_from_seq(seq: &HjSeq) -> Result<CoprimePair, HjError> {
    if seq.is_empty() {
        return Ok(CoprimePair { r: 1, a: 0 });
    }
    // (det of suffix, det of the suffix one shorter), run from the right
    let (mut hi, mut lo) = (1u64, 0u64);
    let mut tail = 1u64;
    for (i, &e) in seq.iter().enumerate().rev() {
        if i == 0 {
            tail = hi;
        }
        let next = (e as u64).checked_mul(hi).ok_or(HjError::Overflow)? - lo;
        lo = std::mem::replace(&mut hi, next);
    }
    Ok(CoprimePair { r: hi, a: tail })
}

/// Contracts a chain hanging off a curve with self-intersection `s`.
/// Returns the new self-intersection `s + q/r` and the multiplicity `q/r`.
pub fn contract_ehjs(s_y_sq: &Q, seq: &[u32]) -> (Q, Q) {
    if seq.is_empty() {
        return (s_y_sq.clone(), Q::zero());
    }
    let m = Q::new(det_hj(&seq[1..]), det_hj(seq));
    (s_y_sq + &m, m)
}
