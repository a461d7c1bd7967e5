//! Klt Calabi–Yau pairs `(X, bS)` of Picard number one with `b` close to 1.
//!
//! The singular points on `S` are cyclic quotients stored with the chain oriented so
//! that its first curve meets `S_Y`. With `t = Σ (r_i - 1)/r_i - 2` over points on `S`
//! and `G = 9 - Σ γ` over all singular points, the coefficient `b` solves
//! `t b² + G b - G = 0`.

use crate::germ::Germ;
use crate::hj::{seq_from_pair, CoprimePair};
use crate::rational::{fmt_q, q, qi, rational_sqrt, to_f64, Q};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Lower end of the classified range, `6/7 + 1/938`.
pub fn b_min() -> Q {
    q(6, 7) + q(1, 938)
}

/// `⌊7b/(7b - 6)⌋` at `b = b_min`; bounds the order of every point on `S`.
pub fn r_bound() -> u64 {
    let b = b_min();
    let x = qi(7) * &b / (qi(7) * &b - qi(6));
    x.floor().to_integer().to_u64().unwrap()
}

/// Log discrepancies must exceed this.
fn klt_floor() -> Q {
    q(1, 7)
}

/// One of the three or four singular points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LsPoint {
    /// On `S`, with `q = q_x(S)`.
    OnS(CoprimePair),
    /// Off `S`.
    OffS(Germ),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LsCase {
    /// 1: three points on `S`; 2: four on `S`; 3: three on `S` and one off.
    pub case: u8,
    pub on_s: Vec<CoprimePair>,
    pub off_s: Option<Germ>,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub gammas: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub s_y_sq: Q,
}

impl LsCase {
    /// Per-point coefficient vectors: extended ones on `S`, plain discrepancies off it.
    pub fn coefficients(&self) -> Vec<Vec<Q>> {
        let mut out: Vec<Vec<Q>> = self.on_s.iter().map(|p| extended_discrepancies(*p, &self.b)).collect();
        if let Some(g) = &self.off_s {
            out.push(g.discrepancies().b);
        }
        out
    }

    /// The off-`S` point as `(r, q)` with minimal `q`, when cyclic.
    pub fn off_s_pair(&self) -> Option<CoprimePair> {
        match self.off_s.as_ref()? {
            Germ::Cyclic(s) => {
                let p = crate::hj::pair_from_seq(s).ok()?;
                let r = crate::hj::pair_from_seq(&s.reversed()).ok()?;
                Some(if p.a <= r.a { p } else { r })
            }
            Germ::Fork { .. } => None,
        }
    }
}

impl fmt::Display for LsCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.on_s.iter().map(|p| format!("({},{})", p.r, p.a)).collect();
        if let Some(g) = &self.off_s {
            parts.push(match self.off_s_pair() {
                Some(p) => format!("({},{})", p.r, p.a),
                None => g.to_string(),
            });
        }
        write!(f, "[{}]", parts.join(","))
    }
}

/// Root in `(0, 1)` of `t b² + G b - G = 0`, if rational.
pub fn solve_b(gammas: &[Q], on_s_orders: &[u64]) -> Option<Q> {
    let g = qi(9) - gammas.iter().sum::<Q>();
    let t = on_s_orders.iter().map(|&r| Q::one() - q(1, r as i64)).sum::<Q>() - qi(2);
    if !g.is_positive() || !t.is_positive() {
        return None;
    }
    let disc = &g * &g + qi(4) * &t * &g;
    let s = rational_sqrt(&disc)?;
    let b = (s - &g) / (qi(2) * &t);
    (b.is_positive() && b < Q::one()).then_some(b)
}

/// `S_Y² = t/(1 - b) - Σ q_i/r_i`.
pub fn s_y_squared(b: &Q, on_s: &[CoprimePair]) -> Q {
    let t = on_s.iter().map(|p| Q::one() - q(1, p.r as i64)).sum::<Q>() - qi(2);
    let mut s = t / (Q::one() - b);
    for p in on_s {
        s -= q(p.a as i64, p.r as i64);
    }
    s
}

/// Coefficients `b_j` of the chain in `K_Y + b S_Y + Σ b_j E_j = f^*(K_X + bS)`.
/// Closed form: `1 - b_j = (L_j + (1 - b) R_j)/r` where `L_j`, `R_j` are the
/// determinants of the sub-chains before and after `E_j`.
pub fn extended_discrepancies(p: CoprimePair, b: &Q) -> Vec<Q> {
    let (l, r) = side_dets(p);
    let one_b = Q::one() - b;
    l.iter().zip(&r).map(|(&lj, &rj)| Q::one() - (qi(lj as i64) + &one_b * qi(rj as i64)) / qi(p.r as i64)).collect()
}

fn side_dets(p: CoprimePair) -> (Vec<u64>, Vec<u64>) {
    let s = seq_from_pair(p);
    let n = s.len();
    let mut l = vec![1u64; n + 1];
    let mut prev = 0u64;
    for j in 0..n {
        let next = s[j] as u64 * l[j] - prev;
        prev = l[j];
        l[j + 1] = next;
    }
    let mut r = vec![1u64; n + 1];
    let mut prev = 0u64;
    for j in (0..n).rev() {
        let next = s[j] as u64 * r[j + 1] - prev;
        prev = r[j + 1];
        r[j] = next;
    }
    // before E_j: l[j]; after E_j: r[j + 1]
    (l[..n].to_vec(), r[1..].to_vec())
}

/// Every log discrepancy of the chain exceeds `1/7` at this `b`.
fn on_s_klt(p: CoprimePair, b: &Q) -> bool {
    // with b = n/d: 7 (L d + (d - n) R) > r d
    let n = b.numer().to_i128().expect("small b");
    let d = b.denom().to_i128().expect("small b");
    let (l, r) = side_dets(p);
    l.iter().zip(&r).all(|(&lj, &rj)| 7 * (lj as i128 * d + (d - n) * rj as i128) > p.r as i128 * d)
}

/// Common denominator and integer numerators; `None` on a non-positive entry.
fn to_integers(vals: &[&Q]) -> (u64, Vec<u64>) {
    let d = vals.iter().fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let d64 = d.to_u64().expect("denominator fits");
    let ws = vals.iter().map(|v| (v.numer() * (&d / v.denom())).to_u64().expect("numerator fits")).collect();
    (d64, ws)
}

/// Reachable sums in `0..=target` using each positive weight any number of times.
fn reachable(target: u64, weights: &[u64]) -> Vec<bool> {
    let t = target as usize;
    let mut ok = vec![false; t + 1];
    ok[0] = true;
    for &w in weights.iter().filter(|&&w| w > 0) {
        let w = w as usize;
        for s in w..=t {
            if ok[s - w] {
                ok[s] = true;
            }
        }
    }
    ok
}

/// Whether `c b + Σ c_k b_k = 1` has a solution in non-negative integers.
/// Always `true` when `S_Y² = -1`, since the `(-1)`-curve may then be `S_Y` itself.
pub fn minus_one_filter(b: &Q, coeffs: &[Q], s_y_sq: &Q) -> bool {
    if *s_y_sq == -Q::one() {
        return true;
    }
    let mut vals: Vec<&Q> = vec![b];
    vals.extend(coeffs.iter().filter(|c| c.is_positive()));
    let (d, ws) = to_integers(&vals);
    reachable(d, &ws)[d as usize]
}

/// Whether `b λ + Σ b_k λ_k + b41 λ41 = 1` has a solution in non-negative integers
/// with `λ41 > 0` and some `λ_k > 0` on `S`.
pub fn mmp_filter(b: &Q, on_s_coeffs: &[Q], b41: &Q) -> bool {
    let pos: Vec<&Q> = on_s_coeffs.iter().filter(|c| c.is_positive()).collect();
    let mut vals: Vec<&Q> = vec![b, b41];
    vals.extend(pos.iter().copied());
    let (d, ws) = to_integers(&vals);
    let w41 = ws[1];
    if w41 > d {
        return false;
    }
    let rest = d - w41;
    let ok = reachable(rest, &ws);
    ws[2..].iter().any(|&w| w <= rest && ok[(rest - w) as usize])
}

/// A point with the data the enumeration needs.
#[derive(Clone, Debug)]
struct Cand {
    point: LsPoint,
    r: u64,
    gamma: Q,
    /// `γ + R (1 - 1/r)` for points on `S`, `γ` off it, with `R = b_min²/(1 - b_min)`.
    key: f64,
}

fn ratio() -> Q {
    let b = b_min();
    &b * &b / (Q::one() - &b)
}

/// Points on `S` that are 1/7-klt already at `b_min` (the constraint tightens as `b` grows).
fn on_s_candidates() -> Vec<Cand> {
    let bm = b_min();
    let rr = to_f64(&ratio());
    let rmax = r_bound();
    let mut out: Vec<Cand> = (2..=rmax)
        .into_par_iter()
        .flat_map_iter(|r| {
            let bm = bm.clone();
            (1..r).filter(move |&a| a.gcd(&r) == 1).filter_map(move |a| {
                let p = CoprimePair { r, a };
                if !on_s_klt(p, &bm) {
                    return None;
                }
                let gamma = Germ::Cyclic(seq_from_pair(p)).gamma();
                let key = to_f64(&gamma) + rr * (1.0 - 1.0 / r as f64);
                Some(Cand { point: LsPoint::OnS(p), r, gamma, key })
            })
        })
        .collect();
    out.sort_by(|x, y| x.key.total_cmp(&y.key).then_with(|| x.point.cmp(&y.point)));
    out
}

/// Singular germs with `r ≤ 42` whose log discrepancies all exceed `1/7`, up to isomorphism.
fn off_s_candidates() -> Vec<Cand> {
    let mut germs: Vec<Germ> = Vec::new();
    for r in 2..=42u64 {
        for a in 1..r {
            if a.gcd(&r) == 1 {
                germs.push(Germ::Cyclic(seq_from_pair(CoprimePair { r, a })).canonical());
            }
        }
    }
    let platonic: [[u64; 3]; 4] = [[2, 2, 0], [2, 3, 3], [2, 3, 4], [2, 3, 5]];
    for pr in platonic {
        let thirds: Vec<u64> = if pr[2] == 0 { (2..=42).collect() } else { vec![pr[2]] };
        for r3 in thirds {
            let rs = [pr[0], pr[1], r3];
            let qs: Vec<Vec<u64>> = rs.iter().map(|&r| (1..r).filter(|a| a.gcd(&r) == 1).collect()).collect();
            for e0 in 2..=6u32 {
                for &a1 in &qs[0] {
                    for &a2 in &qs[1] {
                        for &a3 in &qs[2] {
                            let pairs = [
                                CoprimePair { r: rs[0], a: a1 },
                                CoprimePair { r: rs[1], a: a2 },
                                CoprimePair { r: r3, a: a3 },
                            ];
                            if let Ok(g) = Germ::fork_from_pairs(e0, pairs) {
                                if g.order() <= 42.into() {
                                    germs.push(g.canonical());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    germs.sort();
    germs.dedup();
    let floor = klt_floor();
    germs
        .into_iter()
        .filter(|g| g.mld() > floor)
        .map(|g| {
            let gamma = g.gamma();
            let r = g.order().to_u64().unwrap();
            Cand { key: to_f64(&gamma), point: LsPoint::OffS(g), r, gamma }
        })
        .collect()
}

/// Floating-point screen: adjunction, Bogomolov and `b ≥ b_min` with slack.
fn plausible(pts: &[&Cand]) -> bool {
    const EPS: f64 = 1e-9;
    let mut t = -2.0;
    let mut n_on = 0.0;
    let mut inv_all = 0.0;
    let mut gsum = 0.0;
    for c in pts {
        let inv = 1.0 / c.r as f64;
        inv_all += inv;
        gsum += to_f64(&c.gamma);
        if let LsPoint::OnS(_) = c.point {
            t += 1.0 - inv;
            n_on += 1.0;
        }
    }
    let g = 9.0 - gsum;
    if t <= -EPS || g <= -EPS || n_on < 3.0 {
        return false;
    }
    if pts.len() == 4 && inv_all < 1.0 - EPS {
        return false;
    }
    let b = (-g + (g * g + 4.0 * t * g).sqrt()) / (2.0 * t);
    b >= 805.0 / 938.0 - EPS
}

/// Exact filters on a fully specified configuration.
fn finish(case: u8, pts: &[&Cand]) -> Option<LsCase> {
    if !plausible(pts) {
        return None;
    }
    let mut on_s: Vec<CoprimePair> = Vec::new();
    let mut off_s = None;
    for c in pts {
        match &c.point {
            LsPoint::OnS(p) => on_s.push(*p),
            LsPoint::OffS(g) => off_s = Some(g.clone()),
        }
    }
    // adjunction: Σ 1/r < n - 2 on S
    let inv_on: Q = on_s.iter().map(|p| q(1, p.r as i64)).sum();
    if inv_on >= qi(on_s.len() as i64 - 2) {
        return None;
    }
    // Bogomolov with four points
    if pts.len() == 4 && pts.iter().map(|c| q(1, c.r as i64)).sum::<Q>() < Q::one() {
        return None;
    }
    let gammas: Vec<Q> = pts.iter().map(|c| c.gamma.clone()).collect();
    let orders: Vec<u64> = on_s.iter().map(|p| p.r).collect();
    let b = solve_b(&gammas, &orders)?;
    if b < b_min() {
        return None;
    }
    let s_y_sq = s_y_squared(&b, &on_s);
    if !s_y_sq.is_integer() {
        return None;
    }
    if !on_s.iter().all(|p| on_s_klt(*p, &b)) {
        return None;
    }
    on_s.sort();
    Some(LsCase { case, on_s, off_s, b, gammas, s_y_sq })
}

/// Visits multisets of size `k` drawn from `cands` (sorted by key) whose key sum stays
/// within `budget`, starting at index `from`.
fn for_each_multiset<F: FnMut(&[&Cand])>(
    cands: &[Cand],
    k: usize,
    from: usize,
    budget: f64,
    acc: &mut Vec<usize>,
    f: &mut F,
) {
    if k == 0 {
        let pts: Vec<&Cand> = acc.iter().map(|&i| &cands[i]).collect();
        f(&pts);
        return;
    }
    for i in from..cands.len() {
        // the remaining k picks are all at least this key
        if cands[i].key * k as f64 > budget + 1e-9 {
            break;
        }
        acc.push(i);
        for_each_multiset(cands, k - 1, i, budget - cands[i].key, acc, f);
        acc.pop();
    }
}

/// All configurations passing the adjunction, Bogomolov, rational-`b`,
/// self-intersection and 1/7-klt filters. Sorted by case, then by points.
pub fn enumerate_ls() -> Vec<LsCase> {
    let on = on_s_candidates();
    let off = off_s_candidates();
    let rr = to_f64(&ratio());
    let mut out: Vec<LsCase> = Vec::new();
    // Σ γ + R (Σ (1 - 1/r) - 2) ≤ 9 since b ≥ b_min and b²/(1 - b) is increasing
    for (case, n_on) in [(1u8, 3usize), (2, 4)] {
        let budget = 9.0 + 2.0 * rr;
        let found: Vec<LsCase> = (0..on.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut res = Vec::new();
                let mut acc = vec![i];
                let rem = budget - on[i].key;
                if on[i].key * n_on as f64 <= budget + 1e-9 {
                    for_each_multiset(&on, n_on - 1, i, rem, &mut acc, &mut |pts| {
                        if let Some(c) = finish(case, pts) {
                            res.push(c);
                        }
                    });
                }
                res
            })
            .collect();
        out.extend(found);
    }
    let found: Vec<LsCase> = off
        .par_iter()
        .flat_map_iter(|x4| {
            let mut res = Vec::new();
            let budget = 9.0 + 2.0 * rr - x4.key;
            let mut acc = Vec::new();
            for_each_multiset(&on, 3, 0, budget, &mut acc, &mut |pts| {
                let mut all: Vec<&Cand> = pts.to_vec();
                all.push(x4);
                if let Some(c) = finish(3, &all) {
                    res.push(c);
                }
            });
            res
        })
        .collect();
    out.extend(found);
    out.sort_by(|a, b| (a.case, &a.on_s, a.off_s_pair(), &a.off_s).cmp(&(b.case, &b.on_s, b.off_s_pair(), &b.off_s)));
    out.dedup();
    out
}

/// Why a configuration is or is not ruled out by the computable filters that follow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LsVerdict {
    /// Realised by an explicit pair; retained.
    Realised,
    /// `cb + Σ c_k b_k = 1` is unsolvable.
    ExcludedMinusOne,
    /// The MMP unit equation is unsolvable.
    ExcludedMmp,
    /// `b > 10/11`: covered by the earlier classification in that range.
    ExcludedPriorRange,
    /// Survives every computable filter; needs a geometric argument.
    NeedsGeometry,
}

/// Data of the three pairs that actually occur.
pub fn realised_cases() -> [(Q, Vec<CoprimePair>); 3] {
    let p = |r, a| CoprimePair { r, a };
    [
        (q(12, 13), vec![p(3, 2), p(4, 3), p(5, 2)]),
        (q(10, 11), vec![p(2, 1), p(5, 4), p(7, 3)]),
        (q(15, 17), vec![p(3, 2), p(5, 4), p(7, 2)]),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct LsReport {
    pub case: LsCase,
    /// `None` when `S_Y² = -1`.
    pub minus_one_solvable: Option<bool>,
    /// Only when the off-`S` point is a single curve with `E² ≤ -3`.
    pub mmp_solvable: Option<bool>,
    pub verdict: LsVerdict,
}

pub fn judge(c: &LsCase) -> LsReport {
    let coeffs: Vec<Q> = c.coefficients().into_iter().flatten().collect();
    let minus_one_solvable = (c.s_y_sq != -Q::one()).then(|| minus_one_filter(&c.b, &coeffs, &c.s_y_sq));
    let mmp_solvable = match &c.off_s {
        Some(Germ::Cyclic(s)) if s.len() == 1 && s[0] >= 3 => {
            let on: Vec<Q> = c.on_s.iter().flat_map(|p| extended_discrepancies(*p, &c.b)).collect();
            let b41 = c.off_s.as_ref().unwrap().discrepancies().b[0].clone();
            Some(mmp_filter(&c.b, &on, &b41))
        }
        _ => None,
    };
    let realised = c.off_s.is_none() && realised_cases().iter().any(|(b, ps)| *b == c.b && *ps == c.on_s);
    let verdict = if realised {
        LsVerdict::Realised
    } else if minus_one_solvable == Some(false) {
        LsVerdict::ExcludedMinusOne
    } else if c.b > q(10, 11) {
        LsVerdict::ExcludedPriorRange
    } else if mmp_solvable == Some(false) {
        LsVerdict::ExcludedMmp
    } else {
        LsVerdict::NeedsGeometry
    };
    LsReport { case: c.clone(), minus_one_solvable, mmp_solvable, verdict }
}

/// `(b_{i,j})` grouped per point, over the common denominator, e.g. `(7;8;8;8)/11`.
pub fn format_coefficients(groups: &[Vec<Q>]) -> String {
    let all: Vec<&Q> = groups.iter().flatten().collect();
    let d = all.iter().fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let body: Vec<String> = groups
        .iter()
        .map(|g| g.iter().map(|v| (v.numer() * (&d / v.denom())).to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("({})/{}", body.join(";"), d)
}

impl LsReport {
    pub fn csv_row(&self) -> [String; 7] {
        [
            self.case.case.to_string(),
            self.case.to_string(),
            fmt_q(&self.case.b),
            fmt_q(&self.case.s_y_sq),
            format_coefficients(&self.case.coefficients()),
            self.minus_one_solvable.map_or("n/a".into(), |x| x.to_string()),
            format!("{:?}", self.verdict),
        ]
    }
}
