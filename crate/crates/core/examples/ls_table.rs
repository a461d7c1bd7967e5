//! Calabi–Yau pair configurations surviving the numerical filters, with the verdict of the
//! (-1)-curve and MMP unit equations on each.

use kltbasket::ls::{enumerate_ls, format_coefficients, judge};
use kltbasket::rational::fmt_q;

fn main() {
    let t = std::time::Instant::now();
    let rows = enumerate_ls();
    println!("{} configurations ({:.1?})", rows.len(), t.elapsed());
    for c in &rows {
        let j = judge(c);
        println!(
            "case {}  {:<34} b = {:<6} S_Y² = {:<3} {:<48} {:?}",
            c.case,
            c.to_string(),
            fmt_q(&c.b),
            c.s_y_sq.to_string(),
            format_coefficients(&c.coefficients()),
            j.verdict
        );
    }
}
