//! Plurigenus tables from outside sources, checked for integrality and for
//! `P_{a+b} ≥ P_a + P_b - 1` whenever `P_a, P_b > 0`.
//!
//! Input rows are `label, n, P_n` as CSV (header optional) or JSON lines
//! `{"label": .., "n": .., "P": ..}` where `P` is an integer or a `"p/q"` string.

use crate::rational::{fmt_q, is_nonneg_integer, parse_q, Q};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::BufRead;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExternalPlurigenusRecord {
    pub label: String,
    #[serde(serialize_with = "ser_map")]
    pub p: BTreeMap<u64, Q>,
}

fn ser_map<S: serde::Serializer>(m: &BTreeMap<u64, Q>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), fmt_q(v))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExternalReport {
    pub label: String,
    /// `(n, P_n)` for every value that is not a non-negative integer.
    pub non_integral: Vec<(u64, String)>,
    /// First `(a, b)` by `a + b`, then `a`.
    pub violation: Option<(u64, u64)>,
}

impl ExternalReport {
    pub fn is_clean(&self) -> bool {
        self.non_integral.is_empty() && self.violation.is_none()
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        for (n, v) in &self.non_integral {
            parts.push(format!("P_{n} = {v} is not a non-negative integer"));
        }
        if let Some((a, b)) = self.violation {
            parts.push(format!("P_{} < P_{a} + P_{b} - 1", a + b));
        }
        if parts.is_empty() {
            "clean".into()
        } else {
            parts.join("; ")
        }
    }
}

#[derive(Deserialize)]
struct JsonRow {
    label: String,
    n: u64,
    #[serde(rename = "P")]
    p: serde_json::Value,
}

fn value_to_q(v: &serde_json::Value) -> Result<Q, String> {
    match v {
        serde_json::Value::Number(n) if n.is_i64() => parse_q(&n.to_string()).map_err(|e| e.to_string()),
        serde_json::Value::String(s) => parse_q(s).map_err(|e| e.to_string()),
        other => Err(format!("P must be an integer or a \"p/q\" string, got {other}")),
    }
}

/// Groups rows by label, keeping first-seen label order. Bad rows are reported, not fatal.
pub fn parse_records(reader: impl BufRead) -> std::io::Result<(Vec<ExternalPlurigenusRecord>, Vec<ParseIssue>)> {
    let mut order: Vec<String> = Vec::new();
    let mut map: BTreeMap<String, BTreeMap<u64, Q>> = BTreeMap::new();
    let mut issues = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: Result<(String, u64, Q), String> = if t.starts_with('{') {
            serde_json::from_str::<JsonRow>(t)
                .map_err(|e| e.to_string())
                .and_then(|r| Ok((r.label, r.n, value_to_q(&r.p)?)))
        } else {
            let cols: Vec<&str> = t.split(',').map(str::trim).collect();
            if i == 0 && cols.get(1).is_some_and(|c| c.parse::<u64>().is_err()) {
                continue; // header
            }
            match cols.as_slice() {
                [label, n, p] => n
                    .parse::<u64>()
                    .map_err(|e| format!("bad n {n:?}: {e}"))
                    .and_then(|n| Ok((label.to_string(), n, parse_q(p).map_err(|e| e.to_string())?))),
                _ => Err(format!("expected 3 columns, got {}", cols.len())),
            }
        };
        match row {
            Ok((label, n, p)) => {
                if !map.contains_key(&label) {
                    order.push(label.clone());
                }
                map.entry(label).or_default().insert(n, p);
            }
            Err(message) => issues.push(ParseIssue { line: i + 1, message }),
        }
    }
    let recs = order
        .into_iter()
        .map(|label| {
            let p = map.remove(&label).unwrap();
            ExternalPlurigenusRecord { label, p }
        })
        .collect();
    Ok((recs, issues))
}

/// Checks a record up to `a + b ≤ n_max`, using only values present in the table.
pub fn check_record(rec: &ExternalPlurigenusRecord, n_max: u64) -> ExternalReport {
    let non_integral = rec.p.iter().filter(|(_, v)| !is_nonneg_integer(v)).map(|(n, v)| (*n, fmt_q(v))).collect();
    let mut violation = None;
    'outer: for s in 2..=n_max {
        for a in 1..=s / 2 {
            let b = s - a;
            let (Some(pa), Some(pb), Some(ps)) = (rec.p.get(&a), rec.p.get(&b), rec.p.get(&s)) else {
                continue;
            };
            if pa.is_positive() && pb.is_positive() && *ps < pa + pb - Q::from_integer(1.into()) {
                violation = Some((a, b));
                break 'outer;
            }
        }
    }
    ExternalReport { label: rec.label.clone(), non_integral, violation }
}
