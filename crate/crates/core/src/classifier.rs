//! All klt surface germs with mld at least a given rational `a`, as a finite list of
//! isolated germs plus finitely many one-parameter families.

use crate::germ::Germ;
use crate::hj::{det_hj, seq_from_pair, CoprimePair, HjSeq};
use crate::rational::{q, qi, Q};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("threshold must satisfy 0 < a <= 1")]
    BadThreshold,
}

/// A family of germs indexed by the number `s >= 0` of inserted 2-curves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GermFamily {
    /// `A_{s+1}`.
    DuValA,
    /// `D_{s+4}`.
    DuValD,
    /// `prefix ++ [2; s]`, prefix ending in an entry `>= 3`.
    Tail { prefix: HjSeq },
    /// `prefix ++ [2; s] ++ suffix`.
    Middle { prefix: HjSeq, suffix: HjSeq },
    /// Fork `[2; (2,1), (2,1), (r,q)]` with third branch `[2; s] ++ HJseq(v+m, v)`, `m = r - q`.
    Dii { m: u32, v: u32 },
}

/// Limit of the log discrepancy where a growing run of 2s meets `side`.
fn end_limit(side: &[u32]) -> Q {
    let r = det_hj(side);
    let q = det_hj(&side[..side.len() - 1]);
    Q::new(One::one(), r - q)
}

impl GermFamily {
    pub fn member(&self, s: usize) -> Germ {
        match self {
            GermFamily::DuValA => Germ::Cyclic(HjSeq::twos(s + 1)),
            GermFamily::DuValD => {
                Germ::fork(2, [HjSeq::twos(1), HjSeq::twos(1), HjSeq::twos(s + 1)]).expect("D_n is klt")
            }
            GermFamily::Tail { prefix } => Germ::Cyclic(prefix.concat(&HjSeq::twos(s))),
            GermFamily::Middle { prefix, suffix } => Germ::Cyclic(prefix.concat(&HjSeq::twos(s)).concat(suffix)),
            GermFamily::Dii { m, v } => {
                let tail = seq_from_pair(CoprimePair { r: (v + m) as u64, a: *v as u64 });
                Germ::fork(2, [HjSeq::twos(1), HjSeq::twos(1), HjSeq::twos(s).concat(&tail)])
                    .expect("D-II family member is klt")
            }
        }
    }

    /// Number of curves of `member(0)`; `member(s)` has `s` more.
    pub fn base_curves(&self) -> usize {
        self.member(0).n_curves()
    }

    /// `lim mld(member(s))` as `s` grows.
    pub fn limit_mld(&self) -> Q {
        match self {
            GermFamily::DuValA | GermFamily::DuValD => Q::one(),
            GermFamily::Tail { prefix } => end_limit(prefix.as_slice()),
            GermFamily::Middle { prefix, suffix } => {
                let rev: Vec<u32> = suffix.as_slice().iter().rev().copied().collect();
                end_limit(prefix.as_slice()).min(end_limit(&rev))
            }
            GermFamily::Dii { m, .. } => q(1, *m as i64),
        }
    }

    /// Whether the cyclic chain (in the given orientation) is a member, and which one.
    fn member_index(&self, chain: &[u32]) -> Option<usize> {
        let all_twos = |c: &[u32]| c.iter().all(|&e| e == 2);
        match self {
            GermFamily::DuValA => all_twos(chain).then(|| chain.len() - 1),
            GermFamily::Tail { prefix } => {
                (chain.starts_with(prefix) && all_twos(&chain[prefix.len()..])).then(|| chain.len() - prefix.len())
            }
            GermFamily::Middle { prefix, suffix } => {
                let (p, s) = (prefix.len(), suffix.len());
                (chain.len() >= p + s
                    && chain.starts_with(prefix)
                    && chain.ends_with(suffix)
                    && all_twos(&chain[p..chain.len() - s]))
                .then(|| chain.len() - p - s)
            }
            _ => None,
        }
    }

    /// `Some(s)` if `g == member(s)`.
    pub fn contains(&self, g: &Germ) -> Option<usize> {
        match (self, g) {
            (GermFamily::DuValD | GermFamily::Dii { .. }, Germ::Fork { .. }) => {
                let n = g.n_curves();
                let base = self.base_curves();
                (n >= base && self.member(n - base) == *g).then(|| n - base)
            }
            (_, Germ::Cyclic(c)) => self.member_index(c).or_else(|| self.member_index(&c.reversed())),
            _ => None,
        }
    }

    /// Sum of `e_i - 2`, which does not depend on `s`.
    pub fn excess(&self) -> u64 {
        self.member(0).excess()
    }

    fn canonical(self) -> Self {
        match self {
            GermFamily::Middle { prefix, suffix } => {
                let (rp, rs) = (suffix.reversed(), prefix.reversed());
                if (&rp, &rs) < (&prefix, &suffix) {
                    GermFamily::Middle { prefix: rp, suffix: rs }
                } else {
                    GermFamily::Middle { prefix, suffix }
                }
            }
            f => f,
        }
    }
}

/// Checks `mld(member(s)) >= a` for `s = 0..=probes` and that the limit is `>= a`.
pub fn verify_family(f: &GermFamily, a: &Q, probes: usize) -> bool {
    if !a.is_positive() {
        return true;
    }
    f.limit_mld() >= *a && (0..=probes).all(|s| f.member(s).mld() >= *a)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifierOutput {
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    pub isolated: Vec<Germ>,
    pub families: Vec<GermFamily>,
    /// Isolated candidates dropped because a family already covers them.
    pub duplicates_removed: Vec<Germ>,
}

impl ClassifierOutput {
    /// Largest `Σ (e_i - 2)` over everything listed.
    pub fn max_excess(&self) -> u64 {
        let iso = self.isolated.iter().map(|g| g.excess());
        let fam = self.families.iter().map(|f| f.excess());
        iso.chain(fam).max().unwrap_or(0)
    }

    /// Whether `g` is listed, directly or as a family member.
    pub fn covers(&self, g: &Germ) -> bool {
        let c = g.canonical();
        self.isolated.iter().any(|h| h.canonical() == c) || self.families.iter().any(|f| f.contains(g).is_some())
    }
}

/// Exhaustive list of germs with `mld >= a`.
pub fn classify_mld(a: &Q) -> Result<ClassifierOutput, ClassifierError> {
    if !a.is_positive() || *a > Q::one() {
        return Err(ClassifierError::BadThreshold);
    }
    let mut families = vec![GermFamily::DuValA, GermFamily::DuValD];
    let mut isolated: BTreeSet<Germ> = BTreeSet::new();
    let inv_a = a.recip().floor().to_integer().to_u32().expect("1/a fits");

    // E6, E7, E8 and every non Du Val E or D-I fork
    for g in forks_with_mld(a) {
        isolated.insert(g);
    }
    // D-II
    for m in 2..=inv_a {
        for v in (1..m).filter(|v| v.gcd(&m) == 1) {
            families.push(GermFamily::Dii { m, v });
        }
    }

    let (iso_a, fam_a) = cyclic_candidates(a);
    isolated.extend(iso_a);
    families.extend(fam_a.into_iter().map(GermFamily::canonical));
    families.sort();
    families.dedup();

    let mut duplicates_removed = Vec::new();
    let isolated: Vec<Germ> = isolated
        .into_iter()
        .filter(|g| {
            let dup = families.iter().any(|f| f.contains(g).is_some());
            if dup {
                duplicates_removed.push(g.clone());
            }
            !dup
        })
        .collect();
    Ok(ClassifierOutput { a: a.clone(), isolated, families, duplicates_removed })
}

/// Forks of type D-I, E-I, E-II (and Du Val E) with `mld >= a`.
fn forks_with_mld(a: &Q) -> Vec<Germ> {
    let mut out = Vec::new();
    let inv_a = a.recip().floor().to_integer().to_u64().unwrap();
    let mut push_tower = |e0_min: u32, pairs: [CoprimePair; 3]| {
        // e grows with e0 and mld = χ/e shrinks, so stop at the first failure past e > 0
        for e0 in e0_min.. {
            match Germ::fork_from_pairs(e0, pairs) {
                Ok(g) => {
                    if g.mld() >= *a {
                        out.push(g);
                    } else {
                        break;
                    }
                }
                Err(crate::germ::GermError::NotNegativeDefinite) => continue,
                Err(e) => panic!("unexpected fork error {e}"),
            }
        }
    };
    let p = |r: u64, a: u64| CoprimePair { r, a };
    // D-I: mld < 1/r, so r < 1/a
    for r in 2..=inv_a {
        for qq in (1..r).filter(|x| x.gcd(&r) == 1) {
            push_tower(3, [p(2, 1), p(2, 1), p(r, qq)]);
        }
    }
    for q2 in [1, 2] {
        for (r3, q3s) in [(3u64, &[1u64, 2][..]), (4, &[1, 3]), (5, &[1, 2, 3, 4])] {
            for &q3 in q3s {
                push_tower(2, [p(2, 1), p(3, q2), p(r3, q3)]);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Non Du Val cyclic germs: isolated survivors of the finite case and the families.
fn cyclic_candidates(a: &Q) -> (Vec<Germ>, Vec<GermFamily>) {
    let mut iso = Vec::new();
    let mut fam = Vec::new();
    let inv_minus_one = a.recip() - Q::one();
    // 1/a >= 1 + (e_k - 2) q1 / 2
    let fits = |ek: u32, q1: u64| qi((ek as i64 - 2) * q1 as i64) / qi(2) <= inv_minus_one;
    for ek in 3u32.. {
        if !fits(ek, 1) {
            break;
        }
        for q1 in 1u64.. {
            if !fits(ek, q1) {
                break;
            }
            let lefts: Vec<(HjSeq, u64)> = if q1 == 1 {
                vec![(HjSeq::empty(), 0)]
            } else {
                (1..q1)
                    .filter(|x| x.gcd(&q1) == 1)
                    .map(|x| (seq_from_pair(CoprimePair { r: q1, a: x }).reversed(), x))
                    .collect()
            };
            for (left, q1p) in lefts {
                let prefix = left.concat(&HjSeq::new(vec![ek]).unwrap());
                let r1 = ek as u64 * q1 - q1p;
                let b = r1 - q1;
                if Q::one() / qi(b as i64) < *a {
                    // finitely many right sides
                    for d in 1..=b {
                        let aa = q1 + d;
                        let c = r1 * d;
                        // q2 (aB - 1) <= A - aC
                        let num = qi(aa as i64) - a * qi(c as i64);
                        let den = a * qi(b as i64) - Q::one();
                        if num.is_negative() {
                            continue;
                        }
                        let q2_max = (num / den).floor().to_integer().to_u64().unwrap();
                        for q2 in 0..=q2_max {
                            let right = if q2 == 0 {
                                if d != 1 {
                                    continue;
                                }
                                HjSeq::empty()
                            } else {
                                if q2.gcd(&d) != 1 {
                                    continue;
                                }
                                seq_from_pair(CoprimePair { r: q2 + d, a: q2 })
                            };
                            let g = Germ::Cyclic(prefix.concat(&right));
                            if g.mld() >= *a {
                                iso.push(g.canonical());
                            }
                        }
                    }
                } else {
                    fam.push(GermFamily::Tail { prefix: prefix.clone() });
                    for d in 2..=b {
                        for v in (1..d).filter(|v| v.gcd(&d) == 1) {
                            let suffix = seq_from_pair(CoprimePair { r: v + d, a: v });
                            fam.push(GermFamily::Middle { prefix: prefix.clone(), suffix });
                        }
                    }
                }
            }
        }
    }
    iso.sort();
    iso.dedup();
    (iso, fam)
}

/// Helper for callers that want `L = 9 + 6N` from the output itself.
pub fn length_cap(out: &ClassifierOutput) -> usize {
    9 + 6 * out.max_excess() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(v: &[u32]) -> Germ {
        Germ::cyclic(v.to_vec()).unwrap()
    }

    fn seq(v: &[u32]) -> HjSeq {
        HjSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn members() {
        let t = GermFamily::Tail { prefix: seq(&[3]) };
        assert_eq!(t.member(0), cyc(&[3]));
        assert_eq!(t.member(2), cyc(&[3, 2, 2]));
        let d = GermFamily::Dii { m: 3, v: 1 }.member(1);
        let p = d.branch_pairs()[2];
        assert_eq!(p.r - p.a, 3);
        assert_eq!(GermFamily::DuValD.member(0).n_curves(), 4);
        assert_eq!(GermFamily::DuValA.member(3), cyc(&[2, 2, 2, 2]));
    }

    #[test]
    fn verify() {
        let t3 = GermFamily::Tail { prefix: seq(&[3]) };
        assert!(verify_family(&t3, &q(1, 3), 10));
        assert!(!verify_family(&GermFamily::Tail { prefix: seq(&[9]) }, &q(1, 2), 10));
        assert!(verify_family(&GermFamily::Tail { prefix: seq(&[9]) }, &qi(0), 10));
        assert_eq!(t3.limit_mld(), q(1, 2));
    }

    #[test]
    fn a_one_is_du_val_only() {
        let out = classify_mld(&qi(1)).unwrap();
        assert_eq!(out.families, vec![GermFamily::DuValA, GermFamily::DuValD]);
        assert_eq!(out.isolated.len(), 3);
        assert!(out.isolated.iter().all(|g| g.is_du_val()));
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(classify_mld(&qi(0)).is_err());
        assert!(classify_mld(&q(3, 2)).is_err());
    }

    #[test]
    fn main_threshold() {
        let out = classify_mld(&q(5, 46)).unwrap();
        let ms: BTreeSet<u32> = out
            .families
            .iter()
            .filter_map(|f| match f {
                GermFamily::Dii { m, .. } => Some(*m),
                _ => None,
            })
            .collect();
        assert_eq!(ms, (2..=9).collect());
        assert!(out.covers(&cyc(&[2, 7, 2, 2, 2])));
        assert!(out.covers(&cyc(&[2, 2, 5, 2, 3])));
        assert!(out.covers(&cyc(&[2, 2, 2, 2, 2, 3, 3, 2])));
        for g in &out.isolated {
            assert!(g.mld() >= q(5, 46), "{g}");
        }
        for f in &out.families {
            assert!(verify_family(f, &q(5, 46), 20), "{f:?}");
        }
    }

    #[test]
    fn family_mld_is_monotone() {
        let out = classify_mld(&q(1, 5)).unwrap();
        for f in &out.families {
            let m: Vec<Q> = (0..=20).map(|s| f.member(s).mld()).collect();
            assert!(m.windows(2).all(|w| w[0] >= w[1]), "{f:?}");
        }
    }
}
