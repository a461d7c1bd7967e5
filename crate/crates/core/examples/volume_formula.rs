//! The volume formula at a special valuation and the one-parameter family attaining 1/6351.

use kltbasket::filters::{family_volume, kx2_from_special, min_over_p, nontail_bound};
use kltbasket::germ::{enumerate_e2_small, Germ};
use kltbasket::rational::{fmt_q, q};

fn main() -> anyhow::Result<()> {
    let v = kx2_from_special(&q(20, 23), &q(23, 4), &q(1, 8), &q(6, 7));
    println!("K² at c=20/23, e=23/4, λ=1/8, p=6/7: {}", fmt_q(&v));
    for m in 2..=14 {
        println!("m = {m:2}: {}", fmt_q(&family_volume(m)));
    }
    println!("bound over p for the same data: {}", fmt_q(&min_over_p(&q(20, 23), &q(23, 4), &q(1, 8))));
    let g = Germ::cyclic(vec![2, 2, 2, 2, 2, 3, 3, 2])?;
    println!("non-tail lower bound for {g}: {}", fmt_q(&nontail_bound(&g)));
    println!("E-II forks with small c:");
    for row in enumerate_e2_small(&q(1, 6351), &q(5, 6)) {
        println!("  {}  e = {}, c = {}", row.germ, fmt_q(&row.e), fmt_q(&row.c));
    }
    Ok(())
}
