//! Invariants of a few germs: order, mld, γ, discrepancies and special valuations.

use kltbasket::germ::Germ;
use kltbasket::rational::fmt_q;

fn show(g: &Germ) {
    println!("{g}  [{}]", g.tag());
    println!("  r = {}, |H1| = {}, mld = {}, γ = {}", g.order(), g.h1_order(), fmt_q(&g.mld()), fmt_q(&g.gamma()));
    let b: Vec<String> = g.discrepancies().b.iter().map(fmt_q).collect();
    println!("  discrepancies {}", b.join(" "));
    for v in g.special_valuations() {
        println!("  special {:?}: c = {}, e = {}", v.position, fmt_q(&v.c), fmt_q(&v.e));
    }
}

fn main() -> anyhow::Result<()> {
    let germs = [
        serde_json::from_str::<Germ>(r#"{"type":"A","seq":[2,7,2,2,2]}"#)?,
        serde_json::from_str(r#"{"type":"A","seq":[2]}"#)?,
        serde_json::from_str(r#"{"type":"fork","e0":2,"branches":[[2,1],[3,2],[5,3]]}"#)?,
        serde_json::from_str(r#"{"type":"fork","e0":3,"branches":[[2,1],[2,1],[5,2]]}"#)?,
    ];
    for g in &germs {
        show(g);
    }
    let g = &germs[0];
    let d: Vec<String> = (1..=8).map(|n| fmt_q(&g.delta_n(n))).collect();
    println!("δ_1..δ_8 of {g}: {}", d.join(" "));
    Ok(())
}
