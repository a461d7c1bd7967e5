//! Germs with mld above a threshold: finitely many isolated ones plus families.

use kltbasket::classifier::classify_mld;
use kltbasket::rational::{fmt_q, parse_q};

fn main() -> anyhow::Result<()> {
    let a = parse_q(&std::env::args().nth(1).unwrap_or_else(|| "1/5".into()))?;
    let out = classify_mld(&a)?;
    println!("a = {}: {} isolated germs, {} families", fmt_q(&a), out.isolated.len(), out.families.len());
    for f in out.families.iter().take(12) {
        println!("  family {:?}, limit mld {}", f, fmt_q(&f.limit_mld()));
    }
    for g in out.isolated.iter().take(12) {
        println!("  isolated {g}  mld {}", fmt_q(&g.mld()));
    }
    Ok(())
}
