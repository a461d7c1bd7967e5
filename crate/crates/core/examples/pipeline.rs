//! Full run: universe, basket enumeration and the filter cascade, with a per-stage diff.

use kltbasket::rational::fmt_q;
use kltbasket::report::{diff_table, run_default, RunConfig};
use std::time::Instant;

fn main() -> anyhow::Result<()> {
    let t = Instant::now();
    let cfg = RunConfig::default();
    let (u, r) = run_default(&cfg)?;
    println!("universe {} germs, δ sign {:?}, square order {:?}", u.len(), r.delta_sign, r.square_order);
    print!("{}", diff_table(&r));
    for b in &r.survivors {
        println!("survivor {}  K² = {}", b.display(&u), fmt_q(&b.k2(&u)));
    }
    println!("({:.1?})", t.elapsed());
    Ok(())
}
