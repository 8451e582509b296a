use serde::Serialize;

use hierarchy_core::hierarchy::IterOptions;
use hierarchy_core::oracle::{fd_ground_state, Mesh, OracleResult};
use hierarchy_core::squarewell::{
    exact_shift, iterate_squarewell, solve_asymmetric, square_well_grid, two_level, SquareWellError, TwoLevelModel,
};
use hierarchy_core::trialgen::quartic_x_max;

use crate::config::{ConfigError, ExperimentConfig, Format, Problem};
use crate::solve::RunError;

/// Energies of one asymmetric square well from four independent routes.
#[derive(Debug, Clone, Serialize)]
pub struct SquareWellTable {
    pub config_hash: String,
    pub e_transcendental: f64,
    pub e_engine: Option<f64>,
    pub engine_stop: String,
    pub engine_iterations: usize,
    pub e_oracle: f64,
    pub e_two_level: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_inf: f64,
    pub lambda: f64,
    pub shift_closed: f64,
    pub shift_reference: f64,
    pub half_mu_sq: f64,
    pub e_inf_minus_e_b: f64,
    pub e_inf_minus_e: f64,
}

fn regime(e: SquareWellError) -> RunError {
    match e {
        SquareWellError::Regime(what) => RunError::Config(ConfigError(format!("regime: {what}"))),
        other => other.into(),
    }
}

pub fn squarewell_table(cfg: &ExperimentConfig) -> Result<SquareWellTable, RunError> {
    cfg.validate()?;
    let Problem::Squarewell { w, mu, alpha, beta } = cfg.problem else {
        return Err(ConfigError("squarewell needs a square-well problem".into()).into());
    };
    let m = solve_asymmetric(w, mu, alpha, beta).map_err(regime)?;
    let grid = square_well_grid(&m, cfg.grid.density)?;
    let run = iterate_squarewell(&m, &grid, IterOptions::from(&cfg.engine))?;
    let shift = exact_shift(&m, &grid)?;
    let oracle = fd_ground_state(&|x| m.potential(x), &Mesh::with_density(-m.gamma, m.gamma, cfg.grid.density))
        .map_err(|e| RunError::Engine(e.to_string()))?;
    let e_inf = 0.5 * m.p_inf * m.p_inf;
    let tl = two_level(e_inf, m.lambda, mu * mu);
    Ok(SquareWellTable {
        config_hash: cfg.hash(),
        e_transcendental: m.e,
        e_engine: run.trace.e_limit,
        engine_stop: format!("{:?}", run.trace.stop_reason),
        engine_iterations: run.trace.states.len() - 1,
        e_oracle: oracle.best(),
        e_two_level: tl.e,
        e_a: m.e_a,
        e_b: m.e_b,
        e_inf,
        lambda: m.lambda,
        shift_closed: shift.e_hat,
        shift_reference: shift.reference,
        half_mu_sq: 0.5 * mu * mu,
        e_inf_minus_e_b: e_inf - m.e_b,
        e_inf_minus_e: e_inf - m.e,
    })
}

fn kv_csv(header: &str, hash: &str, pairs: &[(&str, String)]) -> String {
    let mut s = format!("# {header}\n# config_hash: {hash}\nquantity,value\n");
    for (k, v) in pairs {
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

impl SquareWellTable {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => kv_csv(
                "hierarchy-solver/squarewell/v1",
                &self.config_hash,
                &[
                    ("e_transcendental", num(self.e_transcendental)),
                    ("e_engine", self.e_engine.map_or("none".into(), num)),
                    ("engine_stop", self.engine_stop.clone()),
                    ("engine_iterations", self.engine_iterations.to_string()),
                    ("e_oracle", num(self.e_oracle)),
                    ("e_two_level", num(self.e_two_level)),
                    ("e_a", num(self.e_a)),
                    ("e_b", num(self.e_b)),
                    ("e_inf", num(self.e_inf)),
                    ("lambda", num(self.lambda)),
                    ("shift_closed", num(self.shift_closed)),
                    ("shift_reference", num(self.shift_reference)),
                    ("half_mu_sq", num(self.half_mu_sq)),
                    ("e_inf_minus_e_b", num(self.e_inf_minus_e_b)),
                    ("e_inf_minus_e", num(self.e_inf_minus_e)),
                ],
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoLevelOut {
    pub e: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_od: f64,
    pub xi_mix: f64,
    pub eigen_residual: f64,
}

pub fn two_level_out(e_inf: f64, lambda: f64, mu_sq: f64) -> TwoLevelOut {
    let t: TwoLevelModel = two_level(e_inf, lambda, mu_sq);
    TwoLevelOut { e: t.e, e_a: t.e_a, e_b: t.e_b, e_od: t.e_od, xi_mix: t.xi_mix, eigen_residual: t.eigen_residual() }
}

impl TwoLevelOut {
    pub fn render(&self, format: Format, hash: &str) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => kv_csv(
                "hierarchy-solver/twolevel/v1",
                hash,
                &[
                    ("e", num(self.e)),
                    ("e_a", num(self.e_a)),
                    ("e_b", num(self.e_b)),
                    ("e_od", num(self.e_od)),
                    ("xi_mix", num(self.xi_mix)),
                    ("eigen_residual", num(self.eigen_residual)),
                ],
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleOut {
    pub config_hash: String,
    pub x_min: f64,
    pub x_max: f64,
    pub intervals: usize,
    pub e_ground: f64,
    pub e_first: f64,
    pub e_richardson: f64,
    pub order: f64,
    pub error_estimate: f64,
}

/// Independent finite-difference energy for the configured problem.
pub fn oracle_out(cfg: &ExperimentConfig) -> Result<OracleOut, RunError> {
    cfg.validate()?;
    let d = cfg.grid.density;
    let run = |v: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> Result<OracleResult, RunError> {
        fd_ground_state(v, &Mesh::with_density(lo, hi, d)).map_err(|e| RunError::Engine(e.to_string()))
    };
    let r = match cfg.problem {
        Problem::Harmonic { g } => {
            let xm = cfg.grid.x_max.unwrap_or(8.0 / g.sqrt());
            run(&|x| 0.5 * g * g * x * x, -xm, xm)?
        }
        Problem::SymQuartic { g } => {
            let xm = cfg.grid.x_max.unwrap_or(quartic_x_max(g));
            run(&|x| 0.5 * g * g * (x * x - 1.0).powi(2), -xm, xm)?
        }
        Problem::AsymQuartic { g, lambda } => {
            let xm = cfg.grid.x_max.unwrap_or(quartic_x_max(g));
            run(&|x| 0.5 * g * g * (x * x - 1.0).powi(2) + g * lambda * x, -xm, xm)?
        }
        Problem::Squarewell { w, mu, alpha, beta } => {
            let m = solve_asymmetric(w, mu, alpha, beta).map_err(regime)?;
            run(&|x| m.potential(x), -m.gamma, m.gamma)?
        }
        Problem::TwoLevel { .. } => {
            return Err(ConfigError("two_level has no potential".into()).into());
        }
    };
    Ok(OracleOut {
        config_hash: cfg.hash(),
        x_min: r.mesh.x_min,
        x_max: r.mesh.x_max,
        intervals: r.mesh.intervals,
        e_ground: r.e_ground,
        e_first: r.e_first,
        e_richardson: r.best(),
        order: r.refinement.order,
        error_estimate: r.refinement.error_estimate,
    })
}

impl OracleOut {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => kv_csv(
                "hierarchy-solver/oracle/v1",
                &self.config_hash,
                &[
                    ("x_min", num(self.x_min)),
                    ("x_max", num(self.x_max)),
                    ("intervals", self.intervals.to_string()),
                    ("e_ground", num(self.e_ground)),
                    ("e_first", num(self.e_first)),
                    ("e_richardson", num(self.e_richardson)),
                    ("order", num(self.order)),
                    ("error_estimate", num(self.error_estimate)),
                ],
            ),
        }
    }
}
