//! Run configuration and the artifacts written by a pipeline run.

use crate::basket::{build_universe, default_a, default_vol_cap, Basket, GermUniverse};
use crate::filters::{residual_germs, run_pipeline, PipelineConfig, SquareOrder, Stage, StageReport};
use crate::germ::Germ;
use crate::rational::{fmt_q, parse_q, q, Q};
use serde::Serialize;
use serde_json::json;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Value { key: String, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub a: Q,
    pub vol_cap: Q,
    pub n_max: usize,
    pub shards: usize,
    pub out_dir: PathBuf,
    pub last_stage: Stage,
    pub square_order: SquareOrder,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            a: default_a(),
            vol_cap: default_vol_cap(),
            n_max: 500,
            shards: 1,
            out_dir: PathBuf::from("out"),
            last_stage: Stage::F7,
            square_order: SquareOrder::H1,
        }
    }
}

/// `F1..F5`, `F5`, `all`: the last stage named.
pub fn parse_stages(s: &str) -> Option<Stage> {
    if s.eq_ignore_ascii_case("all") {
        return Some(Stage::F7);
    }
    let last = s.rsplit("..").next()?;
    Stage::parse(last.trim())
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::Value { key: key.into(), msg };
        let pos_q = |v: &str| -> Result<Q, ConfigError> {
            let x = parse_q(v).map_err(|e| bad(e.to_string()))?;
            if x <= Q::from_integer(0.into()) {
                return Err(bad("must be positive".into()));
            }
            Ok(x)
        };
        match key {
            "a" => self.a = pos_q(value)?,
            "vol_cap" => self.vol_cap = pos_q(value)?,
            "n_max" => {
                self.n_max = value.parse().map_err(|e| bad(format!("{e}")))?;
                if self.n_max < 2 {
                    return Err(bad("must be at least 2".into()));
                }
            }
            "shards" => {
                self.shards = value.parse().map_err(|e| bad(format!("{e}")))?;
                if self.shards == 0 {
                    return Err(bad("must be at least 1".into()));
                }
            }
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "stages" => self.last_stage = parse_stages(value).ok_or_else(|| bad(format!("unknown stage {value:?}")))?,
            "square_order" => {
                self.square_order = match value {
                    "h1" => SquareOrder::H1,
                    "pi1" => SquareOrder::Pi1,
                    _ => return Err(bad("expected h1 or pi1".into())),
                }
            }
            _ => return Err(bad("unknown key".into())),
        }
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn from_str_config(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, msg: "expected key = value".into() })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            n_max: self.n_max,
            square_order: self.square_order,
            delta_sign: None,
            last_stage: self.last_stage,
        }
    }
}

/// Published survivor counts for baskets of 2, 3, 4 germs after each stage.
pub fn reference_counts(stage: Stage) -> [usize; 3] {
    match stage {
        Stage::F12 => [158, 131498, 34],
        Stage::F3 => [149, 32234, 5],
        Stage::F4 => [87, 12166, 1],
        Stage::F5 => [2, 855, 0],
        Stage::F6 => [0, 252, 0],
        Stage::F7 => [0, 1, 0],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageDiff {
    pub stage: Stage,
    pub observed: [usize; 6],
    pub reference: [usize; 3],
    pub matches: bool,
}

pub fn stage_diffs(r: &StageReport) -> Vec<StageDiff> {
    r.counts
        .iter()
        .map(|(stage, c)| {
            let reference = reference_counts(*stage);
            let matches = c[1..4] == reference && c[0] == 0 && c[4] == 0 && c[5] == 0;
            StageDiff { stage: *stage, observed: *c, reference, matches }
        })
        .collect()
}

pub fn expected_k2() -> Q {
    q(1, 8533)
}

/// The run produced exactly the residual basket.
pub fn is_expected_outcome(u: &GermUniverse, r: &StageReport) -> bool {
    let [s] = r.survivors.as_slice() else {
        return false;
    };
    let mut want: Vec<Germ> = residual_germs().iter().map(Germ::canonical).collect();
    want.sort();
    r.counts.last().map(|(s, _)| *s) == Some(Stage::F7) && s.sorted_germs(u) == want && s.k2(u) == expected_k2()
}

pub fn basket_json(u: &GermUniverse, b: &Basket) -> serde_json::Value {
    json!({ "germs": b.sorted_germs(u), "k2": fmt_q(&b.k2(u)) })
}

fn germ_cell(g: &Germ) -> String {
    match g {
        Germ::Cyclic(s) => serde_json::to_string(s.as_slice()).unwrap(),
        Germ::Fork { .. } => serde_json::to_string(g).unwrap(),
    }
}

/// Writes `stage_report.json`, `survivors.jsonl`, `eliminated.csv`, `appendix_b.csv`.
pub fn write_artifacts(dir: &Path, cfg: &RunConfig, u: &GermUniverse, r: &StageReport) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let diffs = stage_diffs(r);
    let report = json!({
        "a": fmt_q(&cfg.a),
        "vol_cap": fmt_q(&cfg.vol_cap),
        "n_max": cfg.n_max,
        "square_order": r.square_order,
        "delta_sign": r.delta_sign,
        "universe_size": u.len(),
        "stages": diffs,
        "survivors": r.survivors.len(),
        "expected_outcome": is_expected_outcome(u, r),
    });
    fs::write(dir.join("stage_report.json"), serde_json::to_string_pretty(&report)? + "\n")?;

    let mut w = BufWriter::new(fs::File::create(dir.join("survivors.jsonl"))?);
    for b in &r.survivors {
        writeln!(w, "{}", basket_json(u, b))?;
    }
    w.flush()?;

    let mut el = csv::Writer::from_path(dir.join("eliminated.csv"))?;
    el.write_record(["stage", "size", "germs", "K2", "witness_a", "witness_b"])?;
    let mut ap = csv::Writer::from_path(dir.join("appendix_b.csv"))?;
    ap.write_record(["germ1", "germ2", "germ3", "K2", "witness_a", "witness_b"])?;
    for e in &r.eliminated {
        let germs = e.basket.sorted_germs(u);
        let k2 = fmt_q(&e.basket.k2(u));
        let (wa, wb) = e.witness.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        let cells: Vec<String> = germs.iter().map(germ_cell).collect();
        el.write_record([
            e.stage.name().to_string(),
            germs.len().to_string(),
            cells.join(" "),
            k2.clone(),
            wa.clone(),
            wb.clone(),
        ])?;
        if e.stage == Stage::F7 && germs.len() == 3 {
            ap.write_record([cells[0].clone(), cells[1].clone(), cells[2].clone(), k2, wa, wb])?;
        }
    }
    el.flush()?;
    ap.flush()?;
    Ok(())
}

/// Human-readable per-stage table with the reference counts alongside.
pub fn diff_table(r: &StageReport) -> String {
    let mut s = String::from("stage   observed(2,3,4)        reference(2,3,4)       match\n");
    for d in stage_diffs(r) {
        let o = format!("{:?}", &d.observed[1..4]);
        let e = format!("{:?}", d.reference);
        s += &format!("{:<7} {:<22} {:<22} {}\n", d.stage.name(), o, e, if d.matches { "yes" } else { "NO" });
    }
    s
}

/// Builds the universe for `cfg` and runs the cascade.
pub fn run_default(cfg: &RunConfig) -> Result<(GermUniverse, StageReport), crate::classifier::ClassifierError> {
    let u = build_universe(&cfg.a, &cfg.vol_cap)?;
    let r = run_pipeline(&u, &cfg.pipeline());
    Ok((u, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file() {
        let c =
            RunConfig::from_str_config("# run\na = 1/9\nvol_cap = 1/100 # cap\nn_max = 40\nstages = F1..F5\n").unwrap();
        assert_eq!(c.a, q(1, 9));
        assert_eq!(c.vol_cap, q(1, 100));
        assert_eq!(c.n_max, 40);
        assert_eq!(c.last_stage, Stage::F5);
        assert!(RunConfig::from_str_config("a = 0.1\n").is_err());
        assert!(RunConfig::from_str_config("n_max = 1\n").is_err());
        assert!(RunConfig::from_str_config("colour = blue\n").is_err());
        assert!(RunConfig::from_str_config("a 1/9\n").is_err());
    }

    #[test]
    fn stage_ranges() {
        assert_eq!(parse_stages("F1..F2"), Some(Stage::F12));
        assert_eq!(parse_stages("F1..F6"), Some(Stage::F6));
        assert_eq!(parse_stages("all"), Some(Stage::F7));
        assert_eq!(parse_stages("F9"), None);
    }
}
