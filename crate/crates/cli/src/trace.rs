use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};

pub const TRACE_VERSION: &str = "hierarchy-solver/trace/v1";
pub const CSV_COLUMNS: &str = "n,shift,energy,f_origin,f_mid,max_df,charge_residual";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub shift: f64,
    pub energy: f64,
    pub f_origin: f64,
    pub f_mid: f64,
    pub max_df: f64,
    pub charge_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// "A" or "B".
    pub case: String,
    /// "left" or "right": the end where f = 1.
    pub anchor: String,
    pub e0: f64,
    pub w_max: f64,
    pub stop_reason: String,
    pub e_limit: Option<f64>,
    /// Problem-specific scalars such as the half-line energies.
    pub extra: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    /// `f_n - 1` on the grid for each row; JSON traces only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("malformed trace: {0}")]
pub struct TraceError(pub String);

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), num)
}

impl Trace {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {TRACE_VERSION}\n"));
        out.push_str(&format!("# config_hash: {}\n", self.config_hash));
        out.push_str(&format!("# config: {}\n", serde_json::to_string(&self.config).expect("config serializes")));
        out.push_str(&format!("# case: {}\n", self.case));
        out.push_str(&format!("# anchor: {}\n", self.anchor));
        out.push_str(&format!("# e0: {}\n", num(self.e0)));
        out.push_str(&format!("# w_max: {}\n", num(self.w_max)));
        out.push_str(&format!("# stop_reason: {}\n", self.stop_reason));
        out.push_str(&format!("# e_limit: {}\n", opt_num(self.e_limit)));
        for (k, v) in &self.extra {
            out.push_str(&format!("# extra.{k}: {}\n", num(*v)));
        }
        out.push_str(CSV_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                num(r.shift),
                num(r.energy),
                num(r.f_origin),
                num(r.f_mid),
                num(r.max_df),
                num(r.charge_residual)
            ));
        }
        out
    }

    /// Parse a CSV or JSON trace, detected from the first character.
    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        if text.trim_start().starts_with('{') {
            let t: Trace = serde_json::from_str(text).map_err(|e| TraceError(e.to_string()))?;
            if t.version != TRACE_VERSION {
                return Err(TraceError(format!("unsupported version {}", t.version)));
            }
            if let Some(p) = &t.profiles {
                if p.len() != t.rows.len() {
                    return Err(TraceError("profile count differs from row count".into()));
                }
            }
            t.check()?;
            return Ok(t);
        }
        Self::parse_csv(text)
    }

    fn parse_csv(text: &str) -> Result<Trace, TraceError> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| TraceError("empty file".into()))?;
        if first.trim() != format!("# {TRACE_VERSION}") {
            return Err(TraceError(format!("unrecognized header line {first:?}")));
        }
        let mut meta = BTreeMap::new();
        let mut rows = Vec::new();
        let mut seen_columns = false;
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once(": ").ok_or_else(|| TraceError(format!("line {}: bad metadata", i + 2)))?;
                meta.insert(k.to_string(), v.to_string());
                continue;
            }
            if !seen_columns {
                if line != CSV_COLUMNS {
                    return Err(TraceError(format!("unexpected columns {line:?}")));
                }
                seen_columns = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(TraceError(format!("line {}: expected 7 fields, got {}", i + 2, f.len())));
            }
            let p = |s: &str| s.parse::<f64>().map_err(|_| TraceError(format!("line {}: bad number {s:?}", i + 2)));
            rows.push(Row {
                n: f[0].parse().map_err(|_| TraceError(format!("line {}: bad index {:?}", i + 2, f[0])))?,
                shift: p(f[1])?,
                energy: p(f[2])?,
                f_origin: p(f[3])?,
                f_mid: p(f[4])?,
                max_df: p(f[5])?,
                charge_residual: p(f[6])?,
            });
        }
        if !seen_columns {
            return Err(TraceError("missing column header".into()));
        }
        let take = |k: &str| meta.get(k).cloned().ok_or_else(|| TraceError(format!("missing {k}")));
        let float = |k: &str| -> Result<f64, TraceError> {
            take(k)?.parse().map_err(|_| TraceError(format!("bad {k}")))
        };
        let config: ExperimentConfig =
            serde_json::from_str(&take("config")?).map_err(|e| TraceError(format!("config: {e}")))?;
        let e_limit = match take("e_limit")?.as_str() {
            "none" => None,
            s => Some(s.parse().map_err(|_| TraceError("bad e_limit".into()))?),
        };
        let mut extra = BTreeMap::new();
        for (k, v) in &meta {
            if let Some(name) = k.strip_prefix("extra.") {
                extra.insert(name.to_string(), v.parse().map_err(|_| TraceError(format!("bad {k}")))?);
            }
        }
        let t = Trace {
            version: TRACE_VERSION.to_string(),
            config_hash: take("config_hash")?,
            config,
            case: take("case")?,
            anchor: take("anchor")?,
            e0: float("e0")?,
            w_max: float("w_max")?,
            stop_reason: take("stop_reason")?,
            e_limit,
            extra,
            rows,
            profiles: None,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<(), TraceError> {
        if !matches!(self.case.as_str(), "A" | "B") {
            return Err(TraceError(format!("unknown case {:?}", self.case)));
        }
        if !matches!(self.anchor.as_str(), "left" | "right") {
            return Err(TraceError(format!("unknown anchor {:?}", self.anchor)));
        }
        for (k, r) in self.rows.iter().enumerate() {
            if r.n != k + 1 {
                return Err(TraceError(format!("row {} has index {}", k + 1, r.n)));
            }
        }
        Ok(())
    }
}
