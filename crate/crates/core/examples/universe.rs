//! Build the germ universe for `mld >= 5/46` and count the candidate baskets per size.

use kltbasket::basket::{build_universe, default_a, default_vol_cap, enumerate_size};
use std::time::Instant;

fn main() -> anyhow::Result<()> {
    let t = Instant::now();
    let u = build_universe(&default_a(), &default_vol_cap())?;
    println!("universe: {} germs, length cap {} ({:.1?})", u.len(), u.length_cap, t.elapsed());
    for n in 1..=6 {
        let t = Instant::now();
        let b = enumerate_size(&u, n);
        println!("n={n}: {} baskets ({:.1?})", b.len(), t.elapsed());
    }
    Ok(())
}
