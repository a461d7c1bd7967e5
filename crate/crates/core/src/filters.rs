//! Filters applied to candidate baskets after the γ window and Bogomolov bound.

use crate::basket::{Basket, GermUniverse, UGerm};
use crate::germ::{mu_tau, DeltaForm, Germ};
use crate::rational::{is_integer_square, is_nonneg_integer, q, qi, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// `1/6.4886` as the exact rational `10000/64886`.
pub fn tail_threshold() -> Q {
    q(10000, 64886)
}

/// Upper end of the `p` range in the non-tail bound, `6/7 + 1/938`.
pub fn p_max() -> Q {
    q(6, 7) + q(1, 938)
}

/// Which group order enters `Π r · K²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareOrder {
    /// Local fundamental group, `4e/χ²` on forks.
    Pi1,
    /// Local first homology, `det` of the graph.
    #[default]
    H1,
}

/// Global sign in front of `Σ δ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaSign {
    Plus,
    Minus,
}

impl DeltaSign {
    fn apply(self, x: Q) -> Q {
        match self {
            DeltaSign::Plus => x,
            DeltaSign::Minus => -x,
        }
    }
}

/// `Π r · K²` is the square of an integer.
pub fn f_complete_square(u: &GermUniverse, b: &Basket, order: SquareOrder) -> bool {
    let prod: BigInt = b
        .germs(u)
        .map(|g| match order {
            SquareOrder::Pi1 => g.r.clone(),
            SquareOrder::H1 => g.h1.clone(),
        })
        .product();
    is_integer_square(&(Q::from_integer(prod) * b.k2(u)))
}

/// End curves of weight `>= 3` on a chain need log discrepancy above the threshold.
pub fn germ_tail_ok(g: &Germ) -> bool {
    let Germ::Cyclic(s) = g else { return true };
    let a = g.log_discrepancies();
    let thr = tail_threshold();
    let n = s.len();
    [0, n - 1].iter().all(|&i| s[i] < 3 || a[i] > thr)
}

pub fn f_tail(u: &GermUniverse, b: &Basket) -> bool {
    b.germs(u).all(|g| germ_tail_ok(&g.germ))
}

/// `(c - p)² / ((1 - p)/λ + 1/e)`.
pub fn kx2_from_special(c: &Q, e: &Q, lam: &Q, p: &Q) -> Q {
    let d = c - p;
    &d * &d / ((Q::one() - p) / lam + e.recip())
}

/// Closed form of the volume along the one-parameter family with `b = 10/11`.
pub fn family_volume(m: i64) -> Q {
    q((m - 9) * (m - 9), (10 * m - 13) * (7 * m + 3))
}

/// Minimum over `p ∈ [0, p_max]` of `kx2_from_special`, evaluated at the endpoints
/// and at `p = c`.
pub fn min_over_p(c: &Q, e: &Q, lam: &Q) -> Q {
    let pm = p_max();
    let clamp = c.clone().max(Q::zero()).min(pm.clone());
    [Q::zero(), pm, clamp].iter().map(|p| kx2_from_special(c, e, lam, p)).min().unwrap()
}

/// Largest lower bound on `K²` forced by interior special valuations of small log discrepancy.
pub fn nontail_bound(g: &Germ) -> Q {
    let Germ::Cyclic(s) = g else { return Q::zero() };
    let thr = tail_threshold();
    let mut best = Q::zero();
    for v in g.special_valuations() {
        if !v.is_interior(s.len()) || Q::one() - &v.c > thr {
            continue;
        }
        let (mu, tau) = mu_tau(&v).expect("chain valuations carry side orders");
        let lams = std::iter::once(tau).chain(mu);
        let bound = lams.map(|l| min_over_p(&v.c, &v.e, &l)).min().unwrap();
        best = best.max(bound);
    }
    best
}

pub fn f_nontail(u: &GermUniverse, b: &Basket) -> bool {
    let k2 = b.k2(u);
    b.germs(u).all(|g| k2 >= nontail_bound(&g.germ))
}

/// `P_n` for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlurigenusTable {
    pub k2: Q,
    pub p: Vec<Q>,
}

impl PlurigenusTable {
    /// From explicit values, e.g. an external table.
    pub fn from_values(p: Vec<Q>) -> Self {
        PlurigenusTable { k2: Q::zero(), p }
    }

    pub fn n_max(&self) -> usize {
        self.p.len().saturating_sub(1)
    }

    /// First `n` in `2..=n_max` where `P_n` is not a non-negative integer.
    pub fn first_bad(&self) -> Option<usize> {
        (2..self.p.len()).find(|&n| !is_nonneg_integer(&self.p[n]))
    }
}

/// `P_n = 1 + n(n-1)/2 · K² ± Σ δ_n`.
pub fn plurigenus_value(k2: &Q, forms: &[&DeltaForm], n: u64, sign: DeltaSign) -> Q {
    let tri = Q::from_integer(BigInt::from(n * n.saturating_sub(1) / 2));
    let delta: Q = forms.iter().map(|f| f.delta(n)).sum();
    Q::one() + tri * k2 + sign.apply(delta)
}

pub fn plurigenus_table(k2: &Q, forms: &[&DeltaForm], n_max: usize, sign: DeltaSign) -> PlurigenusTable {
    let p = (0..=n_max as u64).map(|n| if n == 0 { Q::one() } else { plurigenus_value(k2, forms, n, sign) }).collect();
    PlurigenusTable { k2: k2.clone(), p }
}

/// Every `P_n`, `2 <= n <= n_max`, is a non-negative integer. Stops at the first failure.
pub fn blache_ok(k2: &Q, forms: &[&DeltaForm], n_max: usize, sign: DeltaSign) -> bool {
    (2..=n_max as u64).all(|n| is_nonneg_integer(&plurigenus_value(k2, forms, n, sign)))
}

pub fn f_blache(t: &PlurigenusTable) -> bool {
    t.first_bad().is_none()
}

/// First pair `(a, b)` by `a + b`, then `a`, with `P_a, P_b > 0` and
/// `P_{a+b} < P_a + P_b - 1`.
pub fn f_product(t: &PlurigenusTable, n_max: usize) -> Option<(usize, usize)> {
    let top = n_max.min(t.n_max());
    let one = Q::one();
    for s in 4..=top {
        for a in 2..=s - 2 {
            let b = s - a;
            let (pa, pb) = (&t.p[a], &t.p[b]);
            if pa.is_positive() && pb.is_positive() && t.p[s] < pa + pb - &one {
                return Some((a, b));
            }
        }
    }
    None
}

/// The sign that makes every `P_n` of the given basket data integral and non-negative.
pub fn calibrate_delta_sign(k2: &Q, forms: &[&DeltaForm], n_max: usize) -> Option<DeltaSign> {
    [DeltaSign::Minus, DeltaSign::Plus].into_iter().find(|&s| blache_ok(k2, forms, n_max, s))
}

/// Per-germ data computed on first use.
pub struct GermCache<'u> {
    u: &'u GermUniverse,
    tail: Vec<OnceLock<bool>>,
    nontail: Vec<OnceLock<Q>>,
    delta: Vec<OnceLock<DeltaForm>>,
}

impl<'u> GermCache<'u> {
    pub fn new(u: &'u GermUniverse) -> Self {
        let n = u.len();
        GermCache {
            u,
            tail: (0..n).map(|_| OnceLock::new()).collect(),
            nontail: (0..n).map(|_| OnceLock::new()).collect(),
            delta: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    fn germ(&self, i: usize) -> &UGerm {
        &self.u.germs[i]
    }

    pub fn tail_ok(&self, i: usize) -> bool {
        *self.tail[i].get_or_init(|| germ_tail_ok(&self.germ(i).germ))
    }

    pub fn nontail(&self, i: usize) -> &Q {
        self.nontail[i].get_or_init(|| nontail_bound(&self.germ(i).germ))
    }

    pub fn delta(&self, i: usize) -> &DeltaForm {
        self.delta[i].get_or_init(|| DeltaForm::new(&self.germ(i).germ))
    }

    pub fn forms(&self, b: &Basket) -> Vec<&DeltaForm> {
        b.idx.iter().map(|&i| self.delta(i)).collect()
    }

    pub fn table(&self, b: &Basket, n_max: usize, sign: DeltaSign) -> PlurigenusTable {
        plurigenus_table(&b.k2(self.u), &self.forms(b), n_max, sign)
    }
}

/// Pipeline stages in cascade order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "F1-F2")]
    F12,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::F12, Stage::F3, Stage::F4, Stage::F5, Stage::F6, Stage::F7];

    pub fn name(self) -> &'static str {
        match self {
            Stage::F12 => "F1-F2",
            Stage::F3 => "F3",
            Stage::F4 => "F4",
            Stage::F5 => "F5",
            Stage::F6 => "F6",
            Stage::F7 => "F7",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|x| x.name().eq_ignore_ascii_case(s) || (s == "F2" && *x == Stage::F12))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub n_max: usize,
    pub square_order: SquareOrder,
    /// `None` calibrates the sign on the surviving baskets' reference data.
    pub delta_sign: Option<DeltaSign>,
    /// Last stage to run.
    pub last_stage: Stage,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { n_max: 500, square_order: SquareOrder::H1, delta_sign: None, last_stage: Stage::F7 }
    }
}

#[derive(Clone, Debug)]
pub struct Elimination {
    pub basket: Basket,
    pub stage: Stage,
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct StageReport {
    /// Survivors after each stage that ran, by basket size `1..=6`.
    pub counts: Vec<(Stage, [usize; 6])>,
    pub eliminated: Vec<Elimination>,
    pub survivors: Vec<Basket>,
    pub delta_sign: DeltaSign,
    pub square_order: SquareOrder,
    pub n_max: usize,
}

impl StageReport {
    pub fn count(&self, stage: Stage) -> Option<[usize; 6]> {
        self.counts.iter().find(|(s, _)| *s == stage).map(|(_, c)| *c)
    }

    pub fn eliminated_at(&self, stage: Stage) -> impl Iterator<Item = &Elimination> {
        self.eliminated.iter().filter(move |e| e.stage == stage)
    }
}

fn by_size(bs: &[Basket]) -> [usize; 6] {
    let mut c = [0; 6];
    for b in bs {
        c[b.len() - 1] += 1;
    }
    c
}

/// Residual basket chains, used to calibrate the sign of `δ`.
pub fn residual_germs() -> [Germ; 3] {
    [
        Germ::cyclic(vec![2, 7, 2, 2, 2]).unwrap(),
        Germ::cyclic(vec![2, 2, 5, 2, 3]).unwrap(),
        Germ::cyclic(vec![2, 2, 2, 2, 2, 3, 3, 2]).unwrap(),
    ]
}

/// Sign fixed by integrality of `P_n` on the residual basket.
pub fn reference_delta_sign(n_max: usize) -> Option<DeltaSign> {
    let gs = residual_germs();
    let k2 = qi(9) - gs.iter().map(|g| g.gamma()).sum::<Q>();
    let forms: Vec<DeltaForm> = gs.iter().map(DeltaForm::new).collect();
    calibrate_delta_sign(&k2, &forms.iter().collect::<Vec<_>>(), n_max)
}

/// Runs the cascade on already enumerated baskets.
pub fn run_filters(u: &GermUniverse, baskets: Vec<Basket>, cfg: &PipelineConfig) -> StageReport {
    let sign = cfg.delta_sign.or_else(|| reference_delta_sign(cfg.n_max)).unwrap_or(DeltaSign::Plus);
    let cache = GermCache::new(u);
    let mut report = StageReport {
        counts: vec![(Stage::F12, by_size(&baskets))],
        eliminated: Vec::new(),
        survivors: Vec::new(),
        delta_sign: sign,
        square_order: cfg.square_order,
        n_max: cfg.n_max,
    };
    let mut alive = baskets;
    for stage in [Stage::F3, Stage::F4, Stage::F5, Stage::F6, Stage::F7] {
        if stage > cfg.last_stage {
            break;
        }
        let verdicts: Vec<(bool, Option<(usize, usize)>)> = alive
            .par_iter()
            .map(|b| match stage {
                Stage::F3 => (f_complete_square(u, b, cfg.square_order), None),
                Stage::F4 => (b.idx.iter().all(|&i| cache.tail_ok(i)), None),
                Stage::F5 => (blache_ok(&b.k2(u), &cache.forms(b), cfg.n_max, sign), None),
                Stage::F6 => {
                    let k2 = b.k2(u);
                    (b.idx.iter().all(|&i| k2 >= *cache.nontail(i)), None)
                }
                Stage::F7 => {
                    let w = f_product(&cache.table(b, cfg.n_max, sign), cfg.n_max);
                    (w.is_none(), w)
                }
                Stage::F12 => unreachable!(),
            })
            .collect();
        let mut next = Vec::new();
        for (b, (ok, w)) in alive.into_iter().zip(verdicts) {
            if ok {
                next.push(b);
            } else {
                report.eliminated.push(Elimination { basket: b, stage, witness: w });
            }
        }
        alive = next;
        report.counts.push((stage, by_size(&alive)));
    }
    report.survivors = alive;
    report
}

/// Full cascade from a universe.
pub fn run_pipeline(u: &GermUniverse, cfg: &PipelineConfig) -> StageReport {
    let baskets: Vec<Basket> = crate::basket::enumerate_baskets(u).into_iter().flatten().collect();
    run_filters(u, baskets, cfg)
}

/// Helper for reports: `P_n` values as integers when they are.
pub fn integer_values(t: &PlurigenusTable) -> Option<Vec<i64>> {
    t.p.iter().skip(2).map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_formula() {
        assert_eq!(kx2_from_special(&q(20, 23), &q(23, 4), &q(1, 8), &q(6, 7)), q(1, 8533));
        assert_eq!(kx2_from_special(&q(1, 2), &qi(3), &q(1, 3), &q(1, 2)), qi(0));
        assert_eq!(family_volume(10), q(1, 6351));
        for m in (2..=8).chain(11..200) {
            assert!(family_volume(m) > q(1, 6351), "m={m}");
        }
    }

    #[test]
    fn sign_is_determined() {
        assert_eq!(reference_delta_sign(500), Some(DeltaSign::Plus));
        let gs = residual_germs();
        let k2 = q(1, 8533);
        let forms: Vec<DeltaForm> = gs.iter().map(DeltaForm::new).collect();
        assert!(!blache_ok(&k2, &forms.iter().collect::<Vec<_>>(), 500, DeltaSign::Minus));
    }

    #[test]
    fn residual_tables() {
        let gs = residual_germs();
        let k2 = qi(9) - gs.iter().map(|g| g.gamma()).sum::<Q>();
        assert_eq!(k2, q(1, 8533));
        let forms: Vec<DeltaForm> = gs.iter().map(DeltaForm::new).collect();
        let fr: Vec<&DeltaForm> = forms.iter().collect();
        let t = plurigenus_table(&k2, &fr, 500, DeltaSign::Plus);
        assert_eq!(t.p[0], qi(1));
        assert!(f_blache(&t));
        assert_eq!(f_product(&t, 500), None);
        assert!(gs.iter().all(germ_tail_ok));
        assert!(gs.iter().all(|g| k2 >= nontail_bound(g)));
    }

    #[test]
    fn du_val_table() {
        let g = Germ::cyclic(vec![2, 2]).unwrap();
        let f = DeltaForm::new(&g);
        let t = plurigenus_table(&qi(2), &[&f], 30, DeltaSign::Minus);
        for n in 0..=30usize {
            assert_eq!(t.p[n], qi(1) + qi((n * n.saturating_sub(1) / 2) as i64) * qi(2));
        }
        assert!(f_blache(&t));
    }

    #[test]
    fn product_filter() {
        let flat = PlurigenusTable::from_values(vec![qi(1); 50]);
        assert_eq!(f_product(&flat, 49), None);
        let mut v = vec![qi(1); 10];
        v[2] = qi(3);
        v[3] = qi(3);
        v[5] = qi(4);
        v[4] = qi(5);
        assert_eq!(f_product(&PlurigenusTable::from_values(v), 9), Some((2, 3)));
        let bad = PlurigenusTable::from_values(vec![qi(1), qi(1), q(-15, 11)]);
        assert!(!f_blache(&bad));
    }

    #[test]
    fn tail_examples() {
        assert!(germ_tail_ok(&Germ::cyclic(vec![9]).unwrap()));
        let first_bad = (3..100).find(|&k| !germ_tail_ok(&Germ::cyclic(vec![2, 2, 2, k]).unwrap())).unwrap();
        // end discrepancy of [2,2,2,k] is 5/(4k-3)
        assert_eq!(first_bad, 9);
        assert!(germ_tail_ok(&Germ::cyclic(vec![2, 5, 2]).unwrap()));
    }

    #[test]
    fn min_over_p_matches_grid() {
        let cs = [q(20, 23), q(6, 7), q(9, 10), q(1, 2), q(85, 100)];
        let es = [q(23, 4), q(3, 1), q(7, 2)];
        let lams = [q(1, 2), q(1, 20), q(1, 42)];
        for c in &cs {
            for e in &es {
                for l in &lams {
                    let m = min_over_p(c, e, l);
                    let pm = p_max();
                    let grid =
                        (0..=10_000).map(|k| q(k, 10_000) * &pm).map(|p| kx2_from_special(c, e, l, &p)).min().unwrap();
                    assert!(m <= grid);
                    if *c > pm {
                        assert_eq!(m, kx2_from_special(c, e, l, &pm));
                    } else {
                        assert_eq!(m, qi(0));
                    }
                }
            }
        }
    }

    #[test]
    fn stage_names() {
        assert_eq!(Stage::parse("F1-F2"), Some(Stage::F12));
        assert_eq!(Stage::parse("f5"), Some(Stage::F5));
        assert_eq!(Stage::parse("F9"), None);
    }
}
