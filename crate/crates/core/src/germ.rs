//! klt surface germs: cyclic chains and star-shaped forks.
//!
//! Curves of a fork are numbered center first, then each branch read outward from
//! the center. Every invariant here is exact.

use crate::hj::{det_hj, pair_from_seq, prefix_dets, seq_from_pair, suffix_dets, CoprimePair, HjSeq};
use crate::rational::{q, qi, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GermError {
    #[error("cyclic chain is empty")]
    EmptyChain,
    #[error("fork branch {0} is empty")]
    EmptyBranch(usize),
    #[error("fork center weight {0} is below 2")]
    CenterTooSmall(u32),
    #[error("fork branches {0:?} are not a spherical triple (not klt)")]
    NotSpherical([(u64, u64); 3]),
    #[error("fork intersection matrix is not negative definite")]
    NotNegativeDefinite,
    #[error("fork order 4e/chi^2 = {0} is not a positive integer")]
    NonIntegralOrder(String),
    #[error(transparent)]
    Hj(#[from] crate::hj::HjError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GermTag {
    DuVal,
    A,
    #[serde(rename = "D-I")]
    DI,
    #[serde(rename = "D-II")]
    DII,
    #[serde(rename = "E-I")]
    EI,
    #[serde(rename = "E-II")]
    EII,
}

impl fmt::Display for GermTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GermTag::DuVal => "DuVal",
            GermTag::A => "A",
            GermTag::DI => "D-I",
            GermTag::DII => "D-II",
            GermTag::EI => "E-I",
            GermTag::EII => "E-II",
        };
        f.write_str(s)
    }
}

/// A klt surface germ given by its minimal resolution graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "GermRepr", into = "GermRepr")]
pub enum Germ {
    Cyclic(HjSeq),
    /// Branches are sorted by their `(r, q)` pairs.
    Fork {
        e0: u32,
        branches: [HjSeq; 3],
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum GermRepr {
    #[serde(rename = "A")]
    A { seq: Vec<u32> },
    #[serde(rename = "fork")]
    Fork { e0: u32, branches: [[u64; 2]; 3] },
}

impl TryFrom<GermRepr> for Germ {
    type Error = GermError;
    fn try_from(r: GermRepr) -> Result<Self, GermError> {
        match r {
            GermRepr::A { seq } => Germ::cyclic(seq),
            GermRepr::Fork { e0, branches } => {
                let mut pairs = [CoprimePair { r: 1, a: 0 }; 3];
                for (i, [r, a]) in branches.into_iter().enumerate() {
                    pairs[i] = CoprimePair::new(r, a)?;
                }
                Germ::fork_from_pairs(e0, pairs)
            }
        }
    }
}

impl From<Germ> for GermRepr {
    fn from(g: Germ) -> Self {
        match g {
            Germ::Cyclic(s) => GermRepr::A { seq: s.into_vec() },
            Germ::Fork { e0, .. } => {
                let p = g.branch_pairs();
                GermRepr::Fork { e0, branches: p.map(|c| [c.r, c.a]) }
            }
        }
    }
}

/// Where a special divisorial valuation sits in the resolution graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialPosition {
    /// 1-based chain index.
    Chain(usize),
    ForkCenter,
    /// 1-based index along the third branch of a D-II fork.
    DiiBranch(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialValuation {
    pub position: SpecialPosition,
    #[serde(with = "crate::rational::serde_q")]
    pub c: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub e: Q,
    /// Orders of the two cyclic points left on `E` after contracting the rest (chains only).
    pub side_orders: Option<(u64, u64)>,
}

impl SpecialValuation {
    /// Interior to a chain of length `n`: both sides nonempty.
    pub fn is_interior(&self, n: usize) -> bool {
        matches!(self.position, SpecialPosition::Chain(k) if k > 1 && k < n)
    }
}

/// Cached scalar invariants of a germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermInvariants {
    pub order: BigInt,
    pub mld: Q,
    pub gamma: Q,
}

/// Discrepancy coefficients `b_i` with the weights they belong to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyData {
    pub b: Vec<Q>,
    pub weights: Vec<u32>,
}

/// Curve weights plus adjacency of the minimal resolution graph.
pub struct Graph {
    pub weights: Vec<u32>,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Negative of the intersection matrix: `e_i` on the diagonal, `-1` on edges.
    pub fn neg_intersection_matrix(&self) -> Vec<Vec<Q>> {
        let n = self.weights.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        for (i, &e) in self.weights.iter().enumerate() {
            m[i][i] = qi(e as i64);
        }
        for &(i, j) in &self.edges {
            m[i][j] = qi(-1);
            m[j][i] = qi(-1);
        }
        m
    }
}

impl Germ {
    pub fn cyclic(seq: Vec<u32>) -> Result<Self, GermError> {
        if seq.is_empty() {
            return Err(GermError::EmptyChain);
        }
        Ok(Germ::Cyclic(HjSeq::new(seq)?))
    }

    pub fn fork(e0: u32, branches: [HjSeq; 3]) -> Result<Self, GermError> {
        if e0 < 2 {
            return Err(GermError::CenterTooSmall(e0));
        }
        for (i, b) in branches.iter().enumerate() {
            if b.is_empty() {
                return Err(GermError::EmptyBranch(i + 1));
            }
        }
        let mut bs = branches;
        bs.sort_by_key(|b| pair_from_seq(b).map(|p| (p.r, p.a)).unwrap_or((u64::MAX, 0)));
        let pairs = [pair_from_seq(&bs[0])?, pair_from_seq(&bs[1])?, pair_from_seq(&bs[2])?];
        let (chi, e) = seifert(e0, &pairs);
        if !chi.is_positive() {
            return Err(GermError::NotSpherical(pairs.map(|p| (p.r, p.a))));
        }
        if !e.is_positive() {
            return Err(GermError::NotNegativeDefinite);
        }
        let ord = qi(4) * &e / (&chi * &chi);
        if !ord.is_integer() {
            return Err(GermError::NonIntegralOrder(crate::rational::fmt_q(&ord)));
        }
        Ok(Germ::Fork { e0, branches: bs })
    }

    pub fn fork_from_pairs(e0: u32, pairs: [CoprimePair; 3]) -> Result<Self, GermError> {
        Germ::fork(e0, pairs.map(seq_from_pair))
    }

    /// Lexicographically smaller of the chain and its reverse; forks are already canonical.
    pub fn canonical(&self) -> Germ {
        match self {
            Germ::Cyclic(s) => {
                let r = s.reversed();
                Germ::Cyclic(if r < *s { r } else { s.clone() })
            }
            f => f.clone(),
        }
    }

    pub fn branch_pairs(&self) -> [CoprimePair; 3] {
        match self {
            Germ::Fork { branches, .. } => branches.clone().map(|b| pair_from_seq(&b).expect("branch fits in u64")),
            Germ::Cyclic(_) => panic!("branch_pairs on a cyclic germ"),
        }
    }

    pub fn graph(&self) -> Graph {
        match self {
            Germ::Cyclic(s) => Graph { weights: s.to_vec(), edges: (1..s.len()).map(|i| (i - 1, i)).collect() },
            Germ::Fork { e0, branches } => {
                let mut weights = vec![*e0];
                let mut edges = Vec::new();
                for b in branches {
                    let mut prev = 0;
                    for &w in b.iter() {
                        weights.push(w);
                        let cur = weights.len() - 1;
                        edges.push((prev, cur));
                        prev = cur;
                    }
                }
                Graph { weights, edges }
            }
        }
    }

    pub fn n_curves(&self) -> usize {
        match self {
            Germ::Cyclic(s) => s.len(),
            Germ::Fork { branches, .. } => 1 + branches.iter().map(|b| b.len()).sum::<usize>(),
        }
    }

    /// `Σ (e_i - 2)` over all curves.
    pub fn excess(&self) -> u64 {
        self.graph().weights.iter().map(|&w| (w - 2) as u64).sum()
    }

    /// `(χ, e)` for forks.
    pub fn seifert(&self) -> Option<(Q, Q)> {
        match self {
            Germ::Fork { e0, .. } => Some(seifert(*e0, &self.branch_pairs())),
            Germ::Cyclic(_) => None,
        }
    }

    /// Order, mld and `γ` from a single discrepancy solve.
    pub fn invariants(&self) -> GermInvariants {
        let a = self.log_discrepancies();
        let w = self.graph().weights;
        let du_val = w.iter().all(|&x| x == 2);
        let mut gamma = qi(a.len() as i64);
        for (ai, &wi) in a.iter().zip(&w) {
            if wi > 2 {
                gamma -= (Q::one() - ai) * qi(wi as i64 - 2);
            }
        }
        GermInvariants {
            order: self.order(),
            mld: if du_val { Q::one() } else { a.iter().min().unwrap().clone() },
            gamma,
        }
    }

    /// Log discrepancies `a_i = 1 - b_i` from the closed chain formulas.
    pub fn log_discrepancies(&self) -> Vec<Q> {
        match self {
            Germ::Cyclic(s) => {
                let p = prefix_dets(s);
                let sf = suffix_dets(s);
                let r = &p[s.len()];
                (0..s.len()).map(|j| Q::new(&p[j] + &sf[j + 1], r.clone())).collect()
            }
            Germ::Fork { branches, .. } => {
                let (chi, e) = self.seifert().unwrap();
                let a0 = chi / e;
                let mut out = vec![a0.clone()];
                for b in branches {
                    out.extend(chain_log_discrepancies(b, &a0, &Q::one()));
                }
                out
            }
        }
    }

    pub fn discrepancies(&self) -> DiscrepancyData {
        DiscrepancyData {
            b: self.log_discrepancies().into_iter().map(|a| Q::one() - a).collect(),
            weights: self.graph().weights,
        }
    }

    pub fn is_du_val(&self) -> bool {
        self.graph().weights.iter().all(|&w| w == 2)
    }

    pub fn tag(&self) -> GermTag {
        if self.is_du_val() {
            return GermTag::DuVal;
        }
        match self {
            Germ::Cyclic(_) => GermTag::A,
            Germ::Fork { e0, .. } => {
                let r2 = self.branch_pairs()[1].r;
                match (*e0 >= 3, r2 == 2) {
                    (true, true) => GermTag::DI,
                    (false, true) => GermTag::DII,
                    (true, false) => GermTag::EI,
                    (false, false) => GermTag::EII,
                }
            }
        }
    }

    pub fn mld(&self) -> Q {
        if self.is_du_val() {
            return Q::one();
        }
        self.log_discrepancies().into_iter().min().unwrap()
    }

    /// `γ = n - Σ b_i (e_i - 2)`.
    pub fn gamma(&self) -> Q {
        let d = self.discrepancies();
        let mut g = qi(d.b.len() as i64);
        for (b, &w) in d.b.iter().zip(&d.weights) {
            if w > 2 {
                g -= b * qi(w as i64 - 2);
            }
        }
        g
    }

    /// Order of the local fundamental group. Forks use `4e/χ²`.
    pub fn order(&self) -> BigInt {
        match self {
            Germ::Cyclic(s) => det_hj(s),
            Germ::Fork { .. } => {
                let (chi, e) = self.seifert().unwrap();
                let o = qi(4) * e / (&chi * &chi);
                assert!(o.is_integer() && o.is_positive(), "fork order not integral");
                o.to_integer()
            }
        }
    }

    /// Order of the local first homology, `|det|` of the intersection matrix.
    pub fn h1_order(&self) -> BigInt {
        match self {
            Germ::Cyclic(s) => det_hj(s),
            Germ::Fork { .. } => {
                let (_, e) = self.seifert().unwrap();
                let prod: BigInt = self.branch_pairs().iter().map(|p| BigInt::from(p.r)).product();
                let h = e * Q::from_integer(prod);
                assert!(h.is_integer());
                h.to_integer()
            }
        }
    }

    /// Special divisorial valuations; empty for Du Val germs.
    pub fn special_valuations(&self) -> Vec<SpecialValuation> {
        if self.is_du_val() {
            return Vec::new();
        }
        let b = self.discrepancies().b;
        match self {
            Germ::Cyclic(s) => (0..s.len())
                .filter(|&k| s[k] >= 3)
                .map(|k| {
                    let left: Vec<u32> = s[..k].iter().rev().copied().collect();
                    let right = &s[k + 1..];
                    let (x, _) = crate::hj::contract_ehjs(&-qi(s[k] as i64), &left);
                    let (x, _) = crate::hj::contract_ehjs(&x, right);
                    let side = |c: &[u32]| det_hj(c).to_u64().expect("side order fits");
                    SpecialValuation {
                        position: SpecialPosition::Chain(k + 1),
                        c: b[k].clone(),
                        e: -x,
                        side_orders: Some((side(&left), side(right))),
                    }
                })
                .collect(),
            Germ::Fork { branches, .. } => {
                if self.tag() == GermTag::DII {
                    let p = self.branch_pairs()[2];
                    let m = p.r - p.a;
                    let qp = p.r % m;
                    let idx = branches[2].iter().position(|&w| w >= 3).expect("D-II has a heavy curve");
                    vec![SpecialValuation {
                        position: SpecialPosition::DiiBranch(idx + 1),
                        c: Q::one() - q(1, m as i64),
                        e: q(m as i64, qp as i64),
                        side_orders: None,
                    }]
                } else {
                    let (_, e) = self.seifert().unwrap();
                    vec![SpecialValuation {
                        position: SpecialPosition::ForkCenter,
                        c: b[0].clone(),
                        e,
                        side_orders: None,
                    }]
                }
            }
        }
    }

    /// Blache correction `δ_n` as the quadratic form in the fractional parts `{n b_i}`.
    pub fn delta_n(&self, n: u64) -> Q {
        DeltaForm::new(self).delta(n)
    }
}

/// `χ = Σ 1/r_i - 1`, `e = e0 - Σ q_i/r_i`.
fn seifert(e0: u32, pairs: &[CoprimePair; 3]) -> (Q, Q) {
    let mut chi = qi(-1);
    let mut e = qi(e0 as i64);
    for p in pairs {
        chi += q(1, p.r as i64);
        e -= q(p.a as i64, p.r as i64);
    }
    (chi, e)
}

/// Log discrepancies along a chain with boundary values `alpha` before the first
/// curve and `beta` after the last one.
fn chain_log_discrepancies(seq: &[u32], alpha: &Q, beta: &Q) -> Vec<Q> {
    let p = prefix_dets(seq);
    let s = suffix_dets(seq);
    let d = Q::from_integer(p[seq.len()].clone());
    (0..seq.len())
        .map(|j| (alpha * Q::from_integer(s[j + 1].clone()) + beta * Q::from_integer(p[j].clone())) / &d)
        .collect()
}

/// Integer data for fast evaluation of `δ_n`: `b_i = beta_i / den`.
#[derive(Clone, Debug)]
pub struct DeltaForm {
    den: i128,
    beta: Vec<i128>,
    weights: Vec<i128>,
    edges: Vec<(usize, usize)>,
}

impl DeltaForm {
    pub fn new(g: &Germ) -> Self {
        let d = g.discrepancies();
        let den = d.b.iter().fold(BigInt::one(), |acc, b| acc.lcm(b.denom()));
        let den_i = den.to_i128().expect("discrepancy denominator fits");
        let beta = d.b.iter().map(|b| (b * Q::from_integer(den.clone())).to_integer().to_i128().unwrap()).collect();
        DeltaForm { den: den_i, beta, weights: d.weights.iter().map(|&w| w as i128).collect(), edges: g.graph().edges }
    }

    /// Numerator over `2 den²`.
    pub fn delta_numer(&self, n: u64) -> i128 {
        let d = self.den;
        let n = (n as i128).rem_euclid(d);
        let phi: Vec<i128> = self.beta.iter().map(|&b| (n * b).rem_euclid(d)).collect();
        let mut lin = 0i128;
        let mut quad = 0i128;
        for (i, &f) in phi.iter().enumerate() {
            lin += f * (self.weights[i] - 2);
            quad -= self.weights[i] * f * f;
        }
        for &(i, j) in &self.edges {
            quad += 2 * phi[i] * phi[j];
        }
        d * lin + quad
    }

    pub fn delta_denom(&self) -> i128 {
        2 * self.den * self.den
    }

    pub fn delta(&self, n: u64) -> Q {
        Q::new(BigInt::from(self.delta_numer(n)), BigInt::from(self.delta_denom()))
    }
}

/// `(μ, τ)` of a valuation whose contraction leaves cyclic points of orders `r1, r2`.
/// `μ` is absent when `1 - 1/r1 - 1/r2 <= 0`.
pub fn mu_tau_from_sides(r1: u64, r2: u64) -> (Option<Q>, Q) {
    let one = Q::one();
    let t1 = &one - q(1, r1 as i64);
    let t2 = &one - q(1, r2 as i64);
    let tau = t1.min(t2);
    let base = one - q(1, r1 as i64) - q(1, r2 as i64);
    if !base.is_positive() {
        return (None, tau);
    }
    let r = (base.recip()).floor().to_integer() + 1;
    let mu = base - Q::new(BigInt::one(), r);
    (Some(mu), tau)
}

pub fn mu_tau(v: &SpecialValuation) -> Option<(Option<Q>, Q)> {
    v.side_orders.map(|(a, b)| mu_tau_from_sides(a, b))
}

/// A row of the small-`c` E-II table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Row {
    pub germ: Germ,
    pub e: Q,
    pub c: Q,
}

/// Smallest `e_E` an E-II fork can have.
pub fn e2_min_e() -> Q {
    q(7, 30)
}

/// E-II forks whose special valuation could still carry volume at most `bound_vol`
/// given `n_E >= n_cap`, i.e. `(c - n_cap)² · 7/30 <= bound_vol`.
pub fn enumerate_e2_small(bound_vol: &Q, n_cap: &Q) -> Vec<E2Row> {
    if !bound_vol.is_positive() {
        return Vec::new();
    }
    let mut rows = Vec::new();
    for (r3, q3s) in [(3u64, &[1u64, 2][..]), (4, &[1, 3]), (5, &[1, 2, 3, 4])] {
        for q2 in [1u64, 2] {
            for &q3 in q3s {
                let pairs = [CoprimePair { r: 2, a: 1 }, CoprimePair { r: 3, a: q2 }, CoprimePair { r: r3, a: q3 }];
                let Ok(g) = Germ::fork_from_pairs(2, pairs) else { continue };
                if g.is_du_val() {
                    continue;
                }
                let (chi, e) = g.seifert().unwrap();
                let c = Q::one() - &chi / &e;
                let gap = (&c - n_cap).max(Q::zero());
                if &gap * &gap * e2_min_e() <= *bound_vol {
                    rows.push(E2Row { germ: g, e, c });
                }
            }
        }
    }
    rows.sort_by(|x, y| x.c.cmp(&y.c).then(y.e.cmp(&x.e)));
    rows.dedup_by(|a, b| a.germ == b.germ);
    rows
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Germ::Cyclic(s) => write!(f, "{s}"),
            Germ::Fork { e0, .. } => {
                let p = self.branch_pairs();
                write!(f, "[{e0};{};{};{}]", p[0], p[1], p[2])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(v: &[u32]) -> Germ {
        Germ::cyclic(v.to_vec()).unwrap()
    }

    fn fork(e0: u32, p: [(u64, u64); 3]) -> Germ {
        Germ::fork_from_pairs(e0, p.map(|(r, a)| CoprimePair::new(r, a).unwrap())).unwrap()
    }

    #[test]
    fn tags() {
        assert_eq!(cyc(&[2, 2, 2]).tag(), GermTag::DuVal);
        assert_eq!(fork(2, [(2, 1), (3, 2), (5, 3)]).tag(), GermTag::EII);
        assert_eq!(fork(3, [(2, 1), (2, 1), (5, 2)]).tag(), GermTag::DI);
        assert_eq!(fork(2, [(2, 1), (2, 1), (7, 4)]).tag(), GermTag::DII);
        assert_eq!(fork(3, [(2, 1), (3, 1), (4, 1)]).tag(), GermTag::EI);
        assert_eq!(fork(2, [(2, 1), (3, 2), (5, 4)]).tag(), GermTag::DuVal);
    }

    #[test]
    fn discrepancy_values() {
        let b = cyc(&[2, 7, 2, 2, 2]).discrepancies().b;
        assert_eq!(b, vec![q(10, 23), q(20, 23), q(15, 23), q(10, 23), q(5, 23)]);
        assert_eq!(cyc(&[2, 2]).discrepancies().b, vec![qi(0), qi(0)]);
        assert_eq!(cyc(&[3, 2, 2]).discrepancies().b, vec![q(3, 7), q(2, 7), q(1, 7)]);
    }

    #[test]
    fn mld_and_gamma() {
        let g = cyc(&[2, 7, 2, 2, 2]);
        assert_eq!(g.mld(), q(3, 23));
        assert_eq!(g.gamma(), q(15, 23));
        assert_eq!(g.order(), BigInt::from(46));
        assert_eq!(cyc(&[2, 2, 2, 2]).mld(), qi(1));
        assert_eq!(cyc(&[2, 2, 2, 2]).gamma(), qi(4));
        assert_eq!(cyc(&[3, 2, 2]).gamma(), q(18, 7));
        for (r, a) in [(5u64, 2u64), (7, 4), (9, 2), (11, 7)] {
            let g = fork(2, [(2, 1), (2, 1), (r, a)]);
            assert_eq!(g.mld(), q(1, (r - a) as i64));
        }
    }

    #[test]
    fn fork_orders() {
        assert_eq!(fork(2, [(2, 1), (3, 2), (5, 4)]).order(), BigInt::from(120));
        assert_eq!(fork(2, [(2, 1), (3, 2), (4, 3)]).order(), BigInt::from(48));
        assert_eq!(fork(2, [(2, 1), (3, 2), (3, 2)]).order(), BigInt::from(24));
        for n in 4..20u64 {
            let g = fork(2, [(2, 1), (2, 1), (n - 2, n - 3)]);
            assert_eq!(g.order(), BigInt::from(4 * (n - 2)));
            assert_eq!(g.h1_order(), BigInt::from(4));
        }
        assert_eq!(fork(3, [(2, 1), (2, 1), (3, 1)]).order(), BigInt::from(60));
        assert_eq!(fork(3, [(2, 1), (2, 1), (3, 1)]).h1_order(), BigInt::from(20));
    }

    #[test]
    fn special_values() {
        let v = cyc(&[2, 7, 2, 2, 2]).special_valuations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].position, SpecialPosition::Chain(2));
        assert_eq!(v[0].c, q(20, 23));
        assert_eq!(v[0].e, q(23, 4));
        assert_eq!(v[0].side_orders, Some((2, 4)));
        let f = fork(2, [(2, 1), (3, 2), (3, 1)]).special_valuations();
        assert_eq!((f[0].e.clone(), f[0].c.clone()), (q(1, 2), q(2, 3)));
        assert!(cyc(&[2, 2, 2]).special_valuations().is_empty());
    }

    #[test]
    fn dii_special_matches_center_contraction() {
        // e_E from the formula against a dense Schur complement of the graph
        for (r, a) in [(7u64, 4u64), (5, 2), (11, 8), (13, 5), (17, 11)] {
            let g = fork(2, [(2, 1), (2, 1), (r, a)]);
            let v = &g.special_valuations()[0];
            let SpecialPosition::DiiBranch(m) = v.position else { panic!() };
            let gr = g.graph();
            let idx = 3 + m - 1; // center, two (2)-leaves, then branch 3
            assert!(gr.weights[idx] >= 3);
            let full = gr.neg_intersection_matrix();
            let others: Vec<usize> = (0..full.len()).filter(|&i| i != idx).collect();
            let sub: Vec<Vec<Q>> =
                others.iter().map(|&i| others.iter().map(|&j| full[i][j].clone()).collect()).collect();
            let col: Vec<Q> = others.iter().map(|&i| full[i][idx].clone()).collect();
            let x = crate::linalg::solve(&sub, &col).unwrap();
            let corr: Q = col.iter().zip(&x).map(|(c, y)| c * y).sum();
            assert_eq!(&full[idx][idx] - corr, v.e, "({r},{a})");
            assert_eq!(g.discrepancies().b[idx], v.c);
        }
    }

    #[test]
    fn mu_tau_examples() {
        assert_eq!(mu_tau_from_sides(2, 4), (Some(q(1, 20)), q(1, 2)));
        assert_eq!(mu_tau_from_sides(2, 3), (Some(q(1, 42)), q(1, 2)));
        assert_eq!(mu_tau_from_sides(2, 2), (None, q(1, 2)));
    }

    #[test]
    fn delta_vanishes() {
        assert_eq!(cyc(&[2, 2, 2]).delta_n(5), qi(0));
        let g = cyc(&[2, 7, 2, 2, 2]);
        assert_eq!(g.delta_n(46), qi(0));
        assert_eq!(g.delta_n(0), qi(0));
    }

    #[test]
    fn delta_brute_force() {
        // straight from the quadratic form with rational fractional parts
        let g = cyc(&[3, 2, 2]);
        let d = g.discrepancies();
        let gr = g.graph();
        let m = gr.neg_intersection_matrix();
        let f: Vec<Q> = d.b.iter().map(|b| crate::rational::frac(&(b * qi(2)))).collect();
        let mut v = Q::zero();
        for i in 0..f.len() {
            v += &f[i] * qi(d.weights[i] as i64 - 2);
            for j in 0..f.len() {
                v -= &f[i] * &f[j] * &m[i][j];
            }
        }
        assert_eq!(g.delta_n(2), v / qi(2));
    }

    #[test]
    fn e2_table() {
        let rows = enumerate_e2_small(&q(1, 6351), &q(5, 6));
        let got: Vec<(String, Q, Q)> = rows.iter().map(|r| (r.germ.to_string(), r.e.clone(), r.c.clone())).collect();
        let want = vec![
            ("[2;(2,1);(3,1);(3,2)]".to_string(), q(1, 2), q(2, 3)),
            ("[2;(2,1);(3,1);(3,1)]".to_string(), q(5, 6), q(4, 5)),
            ("[2;(2,1);(3,1);(4,3)]".to_string(), q(5, 12), q(4, 5)),
            ("[2;(2,1);(3,2);(4,1)]".to_string(), q(7, 12), q(6, 7)),
            ("[2;(2,1);(3,2);(5,3)]".to_string(), q(7, 30), q(6, 7)),
        ];
        assert_eq!(got, want);
        assert!(enumerate_e2_small(&qi(0), &q(5, 6)).is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let g: Germ = serde_json::from_str(r#"{"type":"fork","e0":2,"branches":[[5,3],[2,1],[3,2]]}"#).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"type":"fork","e0":2,"branches":[[2,1],[3,2],[5,3]]}"#);
        let a: Germ = serde_json::from_str(r#"{"type":"A","seq":[2,7,2,2,2]}"#).unwrap();
        assert_eq!(a, cyc(&[2, 7, 2, 2, 2]));
        assert!(serde_json::from_str::<Germ>(r#"{"type":"fork","e0":2,"branches":[[2,1],[3,1],[7,1]]}"#).is_err());
        assert!(serde_json::from_str::<Germ>(r#"{"type":"A","seq":[]}"#).is_err());
    }
}
