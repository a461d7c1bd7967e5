//! Chains, pairs and determinants.

use kltbasket::hj::{contract_ehjs, pair_from_seq, seq_from_pair, CoprimePair, HjSeq};
use kltbasket::rational::{fmt_q, qi};

fn main() -> anyhow::Result<()> {
    for (r, a) in [(7, 3), (46, 25), (11, 5), (5, 4), (29, 16)] {
        let s = seq_from_pair(CoprimePair::new(r, a)?);
        let back = pair_from_seq(&s)?;
        println!("{r}/{a} -> {s} -> {}/{}  (reversed {})", back.r, back.a, s.reversed());
    }
    let s = HjSeq::new(vec![2, 2, 5, 2, 3])?;
    println!("det {} = {}", s, s.det());
    // contract the two sides of the 5-curve
    let (x, _) = contract_ehjs(&qi(-5), &[2, 2]);
    let (x, _) = contract_ehjs(&x, &[2, 3]);
    println!("E² after contracting both sides: {}", fmt_q(&x));
    Ok(())
}
