//! Randomised checks of the exact invariants and the filter cascade.

mod common;

use kltbasket::basket::{brute_force, build_universe, enumerate_size, Basket, GermUniverse};
use kltbasket::classifier::classify_mld;
use kltbasket::filters::{f_complete_square, f_nontail, f_tail, min_over_p, SquareOrder};
use kltbasket::germ::Germ;
use kltbasket::hj::{det_hj, pair_from_seq, seq_from_pair, CoprimePair, HjSeq};
use kltbasket::ls::{minus_one_filter, mmp_filter};
use kltbasket::rational::{fmt_q, parse_q, q, qi, Q};
use num_integer::Integer;
use proptest::prelude::*;
use std::sync::OnceLock;

fn chain() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(2u32..=6, 1..=8)
}

fn coprime_pair() -> impl Strategy<Value = CoprimePair> {
    (2u64..100_000)
        .prop_flat_map(|r| (Just(r), 1..r))
        .prop_filter_map("coprime", |(r, a)| (a.gcd(&r) == 1).then_some(CoprimePair { r, a }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn det_is_reversal_invariant(s in chain()) {
        let r: Vec<u32> = s.iter().rev().copied().collect();
        prop_assert_eq!(det_hj(&s), det_hj(&r));
    }

    #[test]
    fn det_ratio_is_the_continued_fraction(s in chain()) {
        let mut cf = qi(*s.last().unwrap() as i64);
        for &e in s.iter().rev().skip(1) {
            cf = qi(e as i64) - cf.recip();
        }
        prop_assert_eq!(cf, Q::new(det_hj(&s), det_hj(&s[1..])));
    }

    #[test]
    fn hj_roundtrip(p in coprime_pair()) {
        prop_assert_eq!(pair_from_seq(&seq_from_pair(p)).unwrap(), p);
    }

    #[test]
    fn discrepancies_match_dense_solve(s in chain()) {
        let g = Germ::cyclic(s).unwrap();
        prop_assert!(common::discrepancy_oracle(&g).is_ok());
    }

    #[test]
    fn fork_discrepancies_match_dense_solve(
        e0 in 2u32..=4,
        a in prop::collection::vec(2u32..=4, 1..=2),
        b in prop::collection::vec(2u32..=4, 1..=3),
        c in prop::collection::vec(2u32..=6, 1..=6),
    ) {
        let br = [HjSeq::new(a).unwrap(), HjSeq::new(b).unwrap(), HjSeq::new(c).unwrap()];
        if let Ok(g) = Germ::fork(e0, br) {
            prop_assert!(common::discrepancy_oracle(&g).is_ok());
        }
    }

    #[test]
    fn inserting_a_curve_does_not_raise_mld(s in chain(), k in 0usize..=8, e in 2u32..=6) {
        let k = k.min(s.len());
        prop_assert!(common::mld_insertion(&s, k, e).is_ok());
    }

    #[test]
    fn delta_is_periodic(s in prop::collection::vec(2u32..=5, 1..=5), n in 0u64..200) {
        let g = Germ::cyclic(s).unwrap();
        prop_assert!(common::delta_periodic(&g, n).is_ok());
    }

    #[test]
    fn rational_text_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = q(n, d);
        prop_assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn nontail_bound_is_monotone(
        c in 1i64..100, e in 1i64..100, l in 1i64..100, dl in 0i64..50, de in 0i64..50,
    ) {
        let (c, e, l) = (q(c, 100), q(e, 10), q(l, 10));
        let base = min_over_p(&c, &e, &l);
        prop_assert!(min_over_p(&c, &e, &(&l + q(dl, 10))) >= base);
        prop_assert!(min_over_p(&c, &(&e + q(de, 10)), &l) >= base);
    }

    #[test]
    fn knapsacks_match_brute_force(
        d in 1i64..60, w0 in 1i64..30, w41 in 1i64..30, ws in prop::collection::vec(1i64..30, 0..4),
    ) {
        let b = q(w0, d);
        let coeffs: Vec<Q> = ws.iter().map(|&w| q(w, d)).collect();
        let mut all = vec![w0];
        all.extend(&ws);
        prop_assert_eq!(minus_one_filter(&b, &coeffs, &qi(0)), reachable(&all, d));
        prop_assert!(minus_one_filter(&b, &coeffs, &qi(-1)));
        all.push(w41);
        let mmp = ws.iter().any(|&w| d >= w41 + w && reachable(&all, d - w41 - w));
        prop_assert_eq!(mmp_filter(&b, &coeffs, &q(w41, d)), mmp);
    }
}

fn reachable(xs: &[i64], t: i64) -> bool {
    let mut ok = vec![false; t as usize + 1];
    ok[0] = true;
    for v in 1..=t as usize {
        ok[v] = xs.iter().any(|&x| x as usize <= v && ok[v - x as usize]);
    }
    ok[t as usize]
}

#[test]
fn families_are_monotone() {
    let out = classify_mld(&q(1, 5)).unwrap();
    for f in &out.families {
        let mlds: Vec<Q> = (0..12).map(|s| f.member(s).mld()).collect();
        assert!(mlds.windows(2).all(|w| w[0] >= w[1]), "{f:?}");
        assert!(mlds.iter().all(|m| *m >= f.limit_mld()), "{f:?}");
    }
}

fn small_universe() -> &'static GermUniverse {
    static U: OnceLock<GermUniverse> = OnceLock::new();
    U.get_or_init(|| {
        let full = build_universe(&q(1, 3), &q(1, 2)).unwrap();
        let germs: Vec<Germ> = full.germs.iter().take(200).map(|g| g.germ.clone()).collect();
        GermUniverse::from_germs(q(1, 3), q(1, 2), usize::MAX, germs)
    })
}

#[test]
fn enumeration_matches_brute_force() {
    let u = small_universe();
    assert!(u.len() >= 20);
    for n in 1..=3 {
        let mut a = enumerate_size(u, n);
        let mut b = brute_force(u, n);
        a.sort();
        b.sort();
        assert_eq!(a, b, "size {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filter_order_is_irrelevant(perm in Just([0usize, 1, 2]).prop_shuffle(), seed in 0usize..1000) {
        let u = small_universe();
        let mut all: Vec<Basket> = (1..=3).flat_map(|n| enumerate_size(u, n)).collect();
        let k = seed % all.len().max(1);
        all.rotate_left(k);
        let filters: [fn(&GermUniverse, &Basket) -> bool; 3] = [
            |u, b| f_complete_square(u, b, SquareOrder::H1),
            f_tail,
            f_nontail,
        ];
        let mut alive = all.clone();
        for &i in &perm {
            alive.retain(|b| filters[i](u, b));
        }
        let mut reference: Vec<Basket> = all.into_iter().filter(|b| filters.iter().all(|f| f(u, b))).collect();
        alive.sort();
        reference.sort();
        prop_assert_eq!(alive, reference);
    }
}
