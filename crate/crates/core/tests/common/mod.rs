//! Checks shared by the property suite and the acceptance runner.
#![allow(dead_code)]

use kltbasket::classifier::classify_mld;
use kltbasket::germ::Germ;
use kltbasket::hj::{det_hj, pair_from_seq, prefix_dets, seq_from_pair, suffix_dets, CoprimePair};
use kltbasket::linalg;
use kltbasket::rational::{qi, Q};
use num_integer::Integer;

/// All chains with `1..=max_len` entries in `2..=max_entry`.
pub fn chains(max_len: usize, max_entry: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for c in &layer {
            for e in 2..=max_entry {
                let mut d = c.clone();
                d.push(e);
                next.push(d);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `seq_from_pair` then `pair_from_seq` is the identity for every coprime `0 < a < r ≤ r_max`.
/// Returns the number of pairs checked.
pub fn hj_roundtrip_upto(r_max: u64) -> Result<u64, String> {
    let mut n = 0;
    for r in 2..=r_max {
        for a in 1..r {
            if a.gcd(&r) != 1 {
                continue;
            }
            let p = CoprimePair { r, a };
            let s = seq_from_pair(p);
            let back = pair_from_seq(&s).map_err(|e| format!("{r}/{a}: {e}"))?;
            if back != p {
                return Err(format!("{r}/{a} -> {s} -> {}/{}", back.r, back.a));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Log discrepancies of a chain from prefix and suffix determinants.
pub fn closed_form_log_discrepancies(seq: &[u32]) -> Vec<Q> {
    let p = prefix_dets(seq);
    let s = suffix_dets(seq);
    let d = det_hj(seq);
    (0..seq.len()).map(|j| Q::new(&p[j] + &s[j + 1], d.clone())).collect()
}

/// Discrepancies from a dense solve of `N b = (e_i - 2)` with `N = -(E_i · E_j)`.
pub fn dense_discrepancies(g: &Germ) -> Vec<Q> {
    let gr = g.graph();
    let m = gr.neg_intersection_matrix();
    let rhs: Vec<Q> = gr.weights.iter().map(|&w| qi(w as i64 - 2)).collect();
    linalg::solve(&m, &rhs).expect("negative definite")
}

/// Discrepancies agree with the dense solve and, for chains, with the closed form.
pub fn discrepancy_oracle(g: &Germ) -> Result<(), String> {
    let b = g.discrepancies().b;
    if b != dense_discrepancies(g) {
        return Err(format!("{g}: dense solve disagrees"));
    }
    if let Germ::Cyclic(s) = g {
        let a: Vec<Q> = b.iter().map(|x| Q::from_integer(1.into()) - x).collect();
        if a != closed_form_log_discrepancies(s.as_slice()) {
            return Err(format!("{g}: closed form disagrees"));
        }
    }
    Ok(())
}

/// Inserting `e` at position `k` does not raise the mld.
pub fn mld_insertion(seq: &[u32], k: usize, e: u32) -> Result<(), String> {
    let g = Germ::cyclic(seq.to_vec()).unwrap();
    let mut t = seq.to_vec();
    t.insert(k, e);
    let h = Germ::cyclic(t).unwrap();
    if h.mld() > g.mld() {
        return Err(format!("{g} -> {h}: mld rose"));
    }
    Ok(())
}

/// `δ_{n + r} = δ_n`.
pub fn delta_periodic(g: &Germ, n: u64) -> Result<(), String> {
    let r: u64 = g.h1_order().try_into().unwrap();
    if g.delta_n(n) != g.delta_n(n + r) {
        return Err(format!("{g}: δ_{n} != δ_{}", n + r));
    }
    Ok(())
}

/// Fork orders of the Du Val D and E graphs, and `order = det` on chains.
pub fn du_val_orders() -> Result<(), String> {
    let p = |r, a| CoprimePair { r, a };
    let mut cases: Vec<(Germ, u64)> = (4..=12u64)
        .map(|n| (Germ::fork_from_pairs(2, [p(2, 1), p(2, 1), p(n - 2, n - 3)]).unwrap(), 4 * (n - 2)))
        .collect();
    cases.push((Germ::fork_from_pairs(2, [p(2, 1), p(3, 2), p(3, 2)]).unwrap(), 24));
    cases.push((Germ::fork_from_pairs(2, [p(2, 1), p(3, 2), p(4, 3)]).unwrap(), 48));
    cases.push((Germ::fork_from_pairs(2, [p(2, 1), p(3, 2), p(5, 4)]).unwrap(), 120));
    for (g, want) in cases {
        if !g.is_du_val() || g.order() != want.into() {
            return Err(format!("{g}: order {} want {want}", g.order()));
        }
    }
    for c in chains(5, 5) {
        let g = Germ::cyclic(c.clone()).unwrap();
        if g.order() != det_hj(&c) {
            return Err(format!("{g}: order != det"));
        }
    }
    Ok(())
}

/// Every chain from `all` with `mld ≥ a` is covered by the classifier at `a`.
pub fn classifier_complete(a: &Q, all: &[Vec<u32>]) -> Result<usize, String> {
    let out = classify_mld(a).map_err(|e| e.to_string())?;
    let mut missing = Vec::new();
    let mut checked = 0usize;
    for c in all {
        // each chain once up to reversal
        let rev: Vec<u32> = c.iter().rev().copied().collect();
        if rev < *c {
            continue;
        }
        let g = Germ::cyclic(c.clone()).unwrap();
        if g.mld() >= *a {
            checked += 1;
            if !out.covers(&g) {
                missing.push(g.to_string());
            }
        }
    }
    if missing.is_empty() {
        Ok(checked)
    } else {
        Err(format!("a={a}: {} of {checked} missing, e.g. {:?}", missing.len(), &missing[..missing.len().min(5)]))
    }
}
