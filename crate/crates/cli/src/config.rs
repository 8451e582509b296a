use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use hierarchy_core::hierarchy::{Case, IterOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    Harmonic { g: f64 },
    SymQuartic { g: f64 },
    AsymQuartic { g: f64, lambda: f64 },
    Squarewell { w: f64, mu: f64, alpha: f64, beta: f64 },
    TwoLevel { e_inf: f64, lambda: f64, mu_sq: f64 },
}

impl Problem {
    pub fn label(&self) -> String {
        match self {
            Problem::Harmonic { g } => format!("harmonic(g={g})"),
            Problem::SymQuartic { g } => format!("sym_quartic(g={g})"),
            Problem::AsymQuartic { g, lambda } => format!("asym_quartic(g={g}, lambda={lambda})"),
            Problem::Squarewell { w, mu, alpha, beta } => {
                format!("squarewell(W={w}, mu={mu}, alpha={alpha}, beta={beta})")
            }
            Problem::TwoLevel { e_inf, lambda, mu_sq } => {
                format!("two_level(e_inf={e_inf}, lambda={lambda}, mu_sq={mu_sq})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
pub enum CaseName {
    #[default]
    A,
    B,
}

impl From<CaseName> for Case {
    fn from(c: CaseName) -> Case {
        match c {
            CaseName::A => Case::A,
            CaseName::B => Case::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub density: f64,
    pub x_max: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { density: 400.0, x_max: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub max_iter: usize,
    pub tol_e: Option<f64>,
    pub tol_f: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let d = IterOptions::default();
        EngineConfig { max_iter: d.max_iter, tol_e: d.tol_e, tol_f: d.tol_f }
    }
}

impl From<&EngineConfig> for IterOptions {
    fn from(e: &EngineConfig) -> IterOptions {
        IterOptions { max_iter: e.max_iter, tol_e: e.tol_e, tol_f: e.tol_f }
    }
}

/// One run of the engine. The output path is not part of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: Problem,
    #[serde(default)]
    pub case: CaseName,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError(format!("{name} must be non-negative and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.problem {
            Problem::Harmonic { g } | Problem::SymQuartic { g } => positive("g", g)?,
            Problem::AsymQuartic { g, lambda } => {
                positive("g", g)?;
                if !(lambda.is_finite() && (0.0..1.0).contains(&lambda)) {
                    return Err(ConfigError(format!("lambda must satisfy 0 <= lambda < 1, got {lambda}")));
                }
            }
            Problem::Squarewell { w, mu, alpha, beta } => {
                positive("W", w)?;
                non_negative("mu", mu)?;
                positive("alpha", alpha)?;
                positive("beta", beta)?;
            }
            Problem::TwoLevel { e_inf, lambda, mu_sq } => {
                if !e_inf.is_finite() {
                    return Err(ConfigError(format!("e_inf must be finite, got {e_inf}")));
                }
                non_negative("lambda", lambda)?;
                non_negative("mu_sq", mu_sq)?;
            }
        }
        positive("grid density", self.grid.density)?;
        if let Some(x) = self.grid.x_max {
            positive("x_max", x)?;
        }
        if self.engine.max_iter == 0 {
            return Err(ConfigError("max_iter must be at least 1".into()));
        }
        if let Some(t) = self.engine.tol_e {
            positive("tol_e", t)?;
        }
        positive("tol_f", self.engine.tol_f)?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
