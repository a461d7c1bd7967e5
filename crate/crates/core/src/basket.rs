//! The finite germ universe and enumeration of candidate baskets.
//!
//! A basket is an unordered multiset of at most six germs with
//! `K² = 9 - Σγ ∈ (0, vol_cap]` and `Σ (r-1)/r <= 3`.

use crate::classifier::{classify_mld, length_cap, ClassifierError, ClassifierOutput};
use crate::germ::Germ;
use crate::rational::{q, qi, to_f64, Q};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Slack for the floating point prefilter; every hit is rechecked exactly.
const EPS: f64 = 1e-9;

pub const MAX_BASKET: usize = 6;

/// A germ with cached invariants.
#[derive(Clone, Debug)]
pub struct UGerm {
    pub germ: Germ,
    /// Order of the local fundamental group.
    pub r: BigInt,
    /// Order of local first homology.
    pub h1: BigInt,
    pub gamma: Q,
    pub mld: Q,
    gamma_f: f64,
    inv_r_f: f64,
}

impl UGerm {
    pub fn new(germ: Germ) -> Self {
        let germ = germ.canonical();
        let inv = germ.invariants();
        let (r, gamma) = (inv.order, inv.gamma);
        UGerm {
            h1: germ.h1_order(),
            mld: inv.mld,
            gamma_f: to_f64(&gamma),
            inv_r_f: 1.0 / r.to_f64().unwrap(),
            r,
            gamma,
            germ,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GermUniverse {
    pub a: Q,
    pub vol_cap: Q,
    /// Maximal number of curves kept for family members.
    pub length_cap: usize,
    /// Sorted by `γ`, ties by germ.
    pub germs: Vec<UGerm>,
}

impl GermUniverse {
    pub fn from_germs(a: Q, vol_cap: Q, length_cap: usize, germs: impl IntoIterator<Item = Germ>) -> Self {
        let set: BTreeSet<Germ> = germs.into_iter().map(|g| g.canonical()).collect();
        let mut germs: Vec<UGerm> = set.into_par_iter().map(UGerm::new).collect();
        germs.sort_by(|x, y| x.gamma.cmp(&y.gamma).then_with(|| x.germ.cmp(&y.germ)));
        GermUniverse { a, vol_cap, length_cap, germs }
    }

    pub fn len(&self) -> usize {
        self.germs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.germs.is_empty()
    }

    pub fn index_of(&self, g: &Germ) -> Option<usize> {
        let c = g.canonical();
        self.germs.iter().position(|u| u.germ == c)
    }

    /// Indices whose `γ` lies in `[lo, hi)` up to the prefilter slack.
    fn gamma_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let s = self.germs.partition_point(|u| u.gamma_f < lo - EPS);
        let e = self.germs.partition_point(|u| u.gamma_f < hi + EPS);
        s..e.max(s)
    }
}

/// Whether germs with `mld` exactly equal to the threshold are kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MldBound {
    /// `mld > a`; reproduces the published stage counts.
    #[default]
    Strict,
    /// `mld >= a`.
    Inclusive,
}

/// Universe of all germs with `mld > a`, families cut at `9 + 6N` curves.
pub fn build_universe(a: &Q, vol_cap: &Q) -> Result<GermUniverse, ClassifierError> {
    build_universe_with(a, vol_cap, MldBound::Strict)
}

pub fn build_universe_with(a: &Q, vol_cap: &Q, bound: MldBound) -> Result<GermUniverse, ClassifierError> {
    let out = classify_mld(a)?;
    Ok(universe_from_classifier(&out, vol_cap, bound))
}

pub fn universe_from_classifier(out: &ClassifierOutput, vol_cap: &Q, bound: MldBound) -> GermUniverse {
    let cap = length_cap(out);
    let mut germs: Vec<Germ> = out.isolated.clone();
    for f in &out.families {
        let base = f.base_curves();
        for s in 0..=cap.saturating_sub(base) {
            germs.push(f.member(s));
        }
    }
    let mut u = GermUniverse::from_germs(out.a.clone(), vol_cap.clone(), cap, germs);
    u.germs.retain(|g| match bound {
        MldBound::Strict => g.mld > out.a,
        MldBound::Inclusive => g.mld >= out.a,
    });
    u
}

/// A canonical multiset of germs, stored as sorted universe indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basket {
    pub idx: Vec<usize>,
}

impl Basket {
    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        Basket { idx }
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn germs<'a>(&'a self, u: &'a GermUniverse) -> impl Iterator<Item = &'a UGerm> + 'a {
        self.idx.iter().map(move |&i| &u.germs[i])
    }

    pub fn gamma_sum(&self, u: &GermUniverse) -> Q {
        self.germs(u).map(|g| g.gamma.clone()).sum()
    }

    pub fn k2(&self, u: &GermUniverse) -> Q {
        qi(9) - self.gamma_sum(u)
    }

    /// Germs sorted by their own order, the form used in reports.
    pub fn sorted_germs(&self, u: &GermUniverse) -> Vec<Germ> {
        let mut v: Vec<Germ> = self.germs(u).map(|g| g.germ.clone()).collect();
        v.sort();
        v
    }

    pub fn display<'a>(&'a self, u: &'a GermUniverse) -> BasketDisplay<'a> {
        BasketDisplay(self, u)
    }
}

pub struct BasketDisplay<'a>(&'a Basket, &'a GermUniverse);

impl fmt::Display for BasketDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0.sorted_germs(self.1);
        write!(f, "{{")?;
        for (i, x) in g.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Exact γ window: `Σγ ∈ [9 - cap, 9)`.
pub fn in_gamma_window(sum: &Q, cap: &Q) -> bool {
    let nine = qi(9);
    *sum < nine && *sum >= nine - cap
}

/// Exact Bogomolov bound `Σ (r-1)/r <= 3`.
pub fn bogomolov(rs: &[&BigInt]) -> bool {
    let s: Q = rs.iter().map(|r| Q::one() - Q::new(BigInt::one(), (*r).clone())).sum();
    s <= qi(3)
}

fn accept(u: &GermUniverse, idx: &[usize]) -> bool {
    let sum: Q = idx.iter().map(|&i| u.germs[i].gamma.clone()).sum();
    in_gamma_window(&sum, &u.vol_cap) && bogomolov(&idx.iter().map(|&i| &u.germs[i].r).collect::<Vec<_>>())
}

/// All baskets of size `n` passing the γ window and the Bogomolov bound, sorted.
pub fn enumerate_size(u: &GermUniverse, n: usize) -> Vec<Basket> {
    if u.is_empty() || n == 0 || n > MAX_BASKET {
        return Vec::new();
    }
    let cap = to_f64(&u.vol_cap);
    let mut out: Vec<Basket> = match n {
        1 => u.gamma_range(9.0 - cap, 9.0).filter(|&i| accept(u, &[i])).map(|i| Basket::new(vec![i])).collect(),
        2 | 3 => enumerate_gamma_ordered(u, n, cap),
        _ => enumerate_r_ordered(u, n, cap),
    };
    out.sort();
    out.dedup();
    out
}

/// Indices in γ order `i <= j <= k`; the last one comes from a range query.
fn enumerate_gamma_ordered(u: &GermUniverse, n: usize, cap: f64) -> Vec<Basket> {
    let g = |i: usize| u.germs[i].gamma_f;
    (0..u.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            // every later γ is at least γ_i
            if n as f64 * g(i) >= 9.0 + EPS {
                return found;
            }
            if n == 2 {
                let rest = 9.0 - g(i);
                for j in u.gamma_range(rest - cap, rest).filter(|&j| j >= i) {
                    if accept(u, &[i, j]) {
                        found.push(Basket::new(vec![i, j]));
                    }
                }
                return found;
            }
            for j in i..u.len() {
                if g(i) + 2.0 * g(j) >= 9.0 + EPS {
                    break;
                }
                let rest = 9.0 - g(i) - g(j);
                for k in u.gamma_range(rest - cap, rest).filter(|&k| k >= j) {
                    if accept(u, &[i, j, k]) {
                        found.push(Basket::new(vec![i, j, k]));
                    }
                }
            }
            found
        })
        .collect()
}

/// First `n-1` germs in order of `r` with Bogomolov pruning, the last by γ range query.
fn enumerate_r_ordered(u: &GermUniverse, n: usize, cap: f64) -> Vec<Basket> {
    let mut by_r: Vec<usize> = (0..u.len()).collect();
    by_r.sort_by(|&x, &y| u.germs[x].r.cmp(&u.germs[y].r).then(x.cmp(&y)));
    let mut rank = vec![0usize; u.len()];
    for (p, &i) in by_r.iter().enumerate() {
        rank[i] = p;
    }
    let need = (n - 3) as f64;
    let starts: Vec<usize> = (0..by_r.len()).collect();
    starts
        .into_par_iter()
        .flat_map_iter(|p0| {
            let mut found = Vec::new();
            let mut stack = vec![p0];
            descend(u, &by_r, &rank, n, need, cap, &mut stack, &mut found);
            found
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn descend(
    u: &GermUniverse,
    by_r: &[usize],
    rank: &[usize],
    n: usize,
    need: f64,
    cap: f64,
    stack: &mut Vec<usize>,
    found: &mut Vec<Basket>,
) {
    let depth = stack.len();
    let inv: f64 = stack.iter().map(|&p| u.germs[by_r[p]].inv_r_f).sum();
    let last = *stack.last().unwrap();
    // remaining germs have r at least r(last)
    if inv + (n - depth) as f64 * u.germs[by_r[last]].inv_r_f < need - EPS {
        return;
    }
    if depth == n - 1 {
        let gs: f64 = stack.iter().map(|&p| u.germs[by_r[p]].gamma_f).sum();
        let rest = 9.0 - gs;
        for k in u.gamma_range(rest - cap, rest) {
            if rank[k] < last {
                continue;
            }
            let mut idx: Vec<usize> = stack.iter().map(|&p| by_r[p]).collect();
            idx.push(k);
            if accept(u, &idx) {
                found.push(Basket::new(idx));
            }
        }
        return;
    }
    for p in last..by_r.len() {
        let r = u.germs[by_r[p]].inv_r_f;
        if inv + (n - depth) as f64 * r < need - EPS {
            break;
        }
        stack.push(p);
        descend(u, by_r, rank, n, need, cap, stack, found);
        stack.pop();
    }
}

/// Baskets of every size `1..=6`, grouped by size.
pub fn enumerate_baskets(u: &GermUniverse) -> Vec<Vec<Basket>> {
    (1..=MAX_BASKET).map(|n| enumerate_size(u, n)).collect()
}

/// Exhaustive reference enumeration for small universes and `n <= 3`.
pub fn brute_force(u: &GermUniverse, n: usize) -> Vec<Basket> {
    let m = u.len();
    let mut out = Vec::new();
    match n {
        1 => (0..m).for_each(|i| {
            if accept(u, &[i]) {
                out.push(Basket::new(vec![i]))
            }
        }),
        2 => {
            for i in 0..m {
                for j in i..m {
                    if accept(u, &[i, j]) {
                        out.push(Basket::new(vec![i, j]));
                    }
                }
            }
        }
        3 => {
            for i in 0..m {
                for j in i..m {
                    for k in j..m {
                        if accept(u, &[i, j, k]) {
                            out.push(Basket::new(vec![i, j, k]));
                        }
                    }
                }
            }
        }
        _ => panic!("brute force only for n <= 3"),
    }
    out.sort();
    out
}

/// Default threshold `5/46`.
pub fn default_a() -> Q {
    q(5, 46)
}

/// Default volume cap `1/6351`.
pub fn default_vol_cap() -> Q {
    q(1, 6351)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(v: &[u32]) -> Germ {
        Germ::cyclic(v.to_vec()).unwrap()
    }

    #[test]
    fn window_and_bogomolov() {
        assert!(in_gamma_window(&(qi(9) - q(1, 8533)), &q(1, 6351)));
        assert!(!in_gamma_window(&qi(9), &q(1, 6351)));
        assert!(!in_gamma_window(&(qi(9) - q(1, 6000)), &q(1, 6351)));
        let rs = [BigInt::from(46), BigInt::from(56), BigInt::from(53)];
        assert!(bogomolov(&rs.iter().collect::<Vec<_>>()));
        let seven: Vec<BigInt> = vec![BigInt::from(2); 7];
        assert!(!bogomolov(&seven.iter().collect::<Vec<_>>()));
    }

    #[test]
    fn tiny_universe() {
        let germs = [cyc(&[2, 7, 2, 2, 2]), cyc(&[2, 2, 5, 2, 3]), cyc(&[2, 2, 2, 2, 2, 3, 3, 2]), cyc(&[3])];
        let u = GermUniverse::from_germs(default_a(), default_vol_cap(), 100, germs);
        let b = enumerate_size(&u, 3);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].k2(&u), q(1, 8533));
        assert!(enumerate_size(&u, 2).is_empty());
    }

    #[test]
    fn empty_universe() {
        let u = GermUniverse::from_germs(default_a(), default_vol_cap(), 0, Vec::new());
        assert!(enumerate_baskets(&u).iter().all(|v| v.is_empty()));
    }
}
