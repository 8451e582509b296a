use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{hex, ConfigError, ExperimentConfig, Format};
use crate::solve::run;

pub const SWEEP_SCHEMA: &str = "hierarchy-solver/sweep/v1";
pub const MANIFEST_VERSION: &str = "hierarchy-solver/manifest/v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub schema: String,
    pub template: Value,
    /// Field of the problem, grid or engine block that varies.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PointRecord {
    pub index: usize,
    pub value: f64,
    pub config_hash: Option<String>,
    pub file: Option<String>,
    pub file_sha256: Option<String>,
    pub status: String,
    pub exit_code: i32,
    pub e_limit: Option<f64>,
    pub e_plus: Option<f64>,
    pub e_minus: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Manifest {
    pub version: &'static str,
    pub sweep_hash: String,
    pub parameter: String,
    pub points: Vec<PointRecord>,
}

impl Manifest {
    pub fn failed(&self) -> bool {
        self.points.iter().any(|p| p.exit_code != 0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("malformed sweep config: {0}")]
    Malformed(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl SweepError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Config(_) => 5,
            SweepError::Malformed(_) | SweepError::Io(_) => 4,
        }
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepConfig, SweepError> {
    let s: SweepConfig = serde_json::from_str(text).map_err(|e| SweepError::Malformed(e.to_string()))?;
    if s.schema != SWEEP_SCHEMA {
        return Err(SweepError::Malformed(format!("schema must be {SWEEP_SCHEMA:?}, got {:?}", s.schema)));
    }
    Ok(s)
}

fn point_config(s: &SweepConfig, value: f64) -> Result<ExperimentConfig, ConfigError> {
    let mut t = s.template.clone();
    let obj = t.as_object_mut().ok_or_else(|| ConfigError("template must be an object".into()))?;
    let block = ["problem", "grid", "engine"]
        .into_iter()
        .find(|b| match obj.get(*b) {
            Some(Value::Object(o)) => o.contains_key(&s.parameter),
            _ => false,
        })
        .or(match s.parameter.as_str() {
            "density" | "x_max" => Some("grid"),
            "max_iter" | "tol_e" | "tol_f" => Some("engine"),
            _ => None,
        })
        .ok_or_else(|| ConfigError(format!("unknown sweep parameter {:?}", s.parameter)))?;
    let entry = obj.entry(block).or_insert_with(|| Value::Object(Default::default()));
    let v = if s.parameter == "max_iter" { Value::from(value as u64) } else { Value::from(value) };
    entry
        .as_object_mut()
        .ok_or_else(|| ConfigError(format!("{block} must be an object")))?
        .insert(s.parameter.clone(), v);
    serde_json::from_value(t).map_err(|e| ConfigError(format!("template: {e}")))
}

pub fn thread_count() -> Option<usize> {
    std::env::var("HIERARCHY_SOLVER_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn run_point(s: &SweepConfig, index: usize, value: f64, dir: &Path) -> PointRecord {
    let mut rec = PointRecord {
        index,
        value,
        config_hash: None,
        file: None,
        file_sha256: None,
        status: String::new(),
        exit_code: 0,
        e_limit: None,
        e_plus: None,
        e_minus: None,
        message: None,
    };
    let cfg = match point_config(s, value) {
        Ok(c) => c,
        Err(e) => {
            rec.status = "rejected".into();
            rec.exit_code = 5;
            rec.message = Some(e.to_string());
            return rec;
        }
    };
    rec.config_hash = Some(cfg.hash());
    match run(&cfg) {
        Ok(out) => {
            let ext = match cfg.format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let name = format!("point-{index:04}.{ext}");
            let body = out.trace.render(cfg.format);
            rec.status = out.status.name().into();
            rec.exit_code = out.status.exit_code();
            rec.e_limit = out.trace.e_limit;
            rec.e_plus = out.trace.extra.get("e_plus").copied();
            rec.e_minus = out.trace.extra.get("e_minus").copied();
            match std::fs::write(dir.join(&name), &body) {
                Ok(()) => {
                    rec.file = Some(name);
                    rec.file_sha256 = Some(hex(&Sha256::digest(body.as_bytes())));
                }
                Err(e) => {
                    rec.status = "io_error".into();
                    rec.exit_code = 4;
                    rec.message = Some(e.to_string());
                }
            }
        }
        Err(e) => {
            rec.status = "rejected".into();
            rec.exit_code = e.exit_code();
            rec.message = Some(e.to_string());
        }
    }
    rec
}

/// Run every point, writing one trace per point and the manifest into `dir`.
pub fn sweep(s: &SweepConfig, dir: &Path) -> Result<Manifest, SweepError> {
    std::fs::create_dir_all(dir)?;
    let work = || -> Vec<PointRecord> {
        s.values.par_iter().enumerate().map(|(i, &v)| run_point(s, i, v, dir)).collect()
    };
    let points = match thread_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SweepError::Malformed(e.to_string()))?
            .install(work),
        None => work(),
    };
    let canonical = serde_json::to_string(s).expect("sweep serializes");
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        sweep_hash: hex(&Sha256::digest(canonical.as_bytes())),
        parameter: s.parameter.clone(),
        points,
    };
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    std::fs::write(dir.join("manifest.json"), body)?;
    Ok(manifest)
}
