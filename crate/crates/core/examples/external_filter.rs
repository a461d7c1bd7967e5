//! Integrality and product checks on hand-written plurigenus tables.

use kltbasket::external::{check_record, parse_records};

const TABLES: &str = "\
label,n,P
planted,2,3
planted,3,3
planted,4,5
planted,5,4
{\"label\":\"fractional\",\"n\":2,\"P\":\"-15/11\"}
{\"label\":\"fractional\",\"n\":3,\"P\":1}
";

fn main() -> anyhow::Result<()> {
    let (mut recs, issues) = parse_records(TABLES.as_bytes())?;
    assert!(issues.is_empty());
    recs.push(kltbasket::external::ExternalPlurigenusRecord {
        label: "constant".into(),
        p: (1..=30).map(|n| (n, kltbasket::rational::qi(1))).collect(),
    });
    for r in &recs {
        println!("{}: {}", r.label, check_record(r, 60).summary());
    }
    Ok(())
}
