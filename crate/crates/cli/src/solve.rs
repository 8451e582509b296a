use std::collections::BTreeMap;

use hierarchy_core::hierarchy::{
    certify, full_line_pipeline, iterate, iterate_anchored, Anchor, Boundary, Case, HierarchyError, IterOptions,
    IterationTrace, StopReason,
};
use hierarchy_core::squarewell::{
    iterate_squarewell, solve_asymmetric, square_well_grid, square_well_trial, SquareWellError,
};
use hierarchy_core::trialgen::{
    build_asymmetric_quartic_trial, build_harmonic_trial, build_symmetric_quartic_trial, quartic_half_grid, TrialError,
};

use crate::config::{ConfigError, ExperimentConfig, Problem};
use crate::trace::{Row, Trace, TRACE_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    OrderingFailure,
    Positivity,
    MaxIter,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::OrderingFailure => 1,
            Status::Positivity => 2,
            Status::MaxIter => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::OrderingFailure => "ordering_failure",
            Status::Positivity => "positivity_violation",
            Status::MaxIter => "max_iter",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("engine error: {0}")]
    Engine(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 5,
            RunError::Engine(_) => 6,
        }
    }
}

impl From<TrialError> for RunError {
    fn from(e: TrialError) -> Self {
        RunError::Config(ConfigError(format!("trial rejected: {e}")))
    }
}

impl From<HierarchyError> for RunError {
    fn from(e: HierarchyError) -> Self {
        match e {
            HierarchyError::NotMonotone(_) => RunError::Config(ConfigError(e.to_string())),
            other => RunError::Engine(other.to_string()),
        }
    }
}

impl From<SquareWellError> for RunError {
    fn from(e: SquareWellError) -> Self {
        match e {
            SquareWellError::Engine(h) => h.into(),
            SquareWellError::Parameters(_) | SquareWellError::Regime(_) => {
                RunError::Config(ConfigError(e.to_string()))
            }
            other => RunError::Engine(other.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub trace: Trace,
    pub status: Status,
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::Tolerance => "tolerance",
        StopReason::MaxIter => "max_iter",
        StopReason::PositivityViolation => "positivity_violation",
    }
}

fn engine_trace(cfg: &ExperimentConfig) -> Result<(IterationTrace, BTreeMap<String, f64>), RunError> {
    let opts = IterOptions::from(&cfg.engine);
    let case = Case::from(cfg.case);
    let d = cfg.grid.density;
    let mut extra = BTreeMap::new();
    let trace = match cfg.problem {
        Problem::Harmonic { g } => {
            let grid = quartic_half_grid(g.max(1.0), d, Some(cfg.grid.x_max.unwrap_or(8.0 / g.sqrt())))?;
            iterate(&build_harmonic_trial(g, &grid)?, case, opts)?
        }
        Problem::SymQuartic { g } => {
            let grid = quartic_half_grid(g, d, cfg.grid.x_max)?;
            iterate(&build_symmetric_quartic_trial(g, &grid)?, case, opts)?
        }
        Problem::AsymQuartic { g, lambda } => {
            let grid = quartic_half_grid(g, d, cfg.grid.x_max)?;
            let (tp, tm) = build_asymmetric_quartic_trial(g, lambda, &grid, &grid)?;
            let boundary = match case {
                Case::A => Boundary::AtPlusInf,
                Case::B => Boundary::AtMinusInf,
            };
            let res = full_line_pipeline(&tp, &tm, boundary, opts, opts)?;
            extra.insert("e_plus".into(), res.half.e_plus);
            extra.insert("e_minus".into(), res.half.e_minus);
            res.trace
        }
        Problem::Squarewell { w, mu, alpha, beta } => {
            let m = solve_asymmetric(w, mu, alpha, beta)?;
            let grid = square_well_grid(&m, d)?;
            extra.insert("e_transcendental".into(), m.e);
            match case {
                Case::A => iterate_squarewell(&m, &grid, opts)?.trace,
                Case::B => {
                    let t = square_well_trial(&m, &grid)?;
                    iterate_anchored(&t.log_phi, &t.w, t.e0, Anchor::Left, opts)?
                }
            }
        }
        Problem::TwoLevel { .. } => {
            return Err(ConfigError("two_level has no iteration; use the twolevel command".into()).into());
        }
    };
    Ok((trace, extra))
}

/// Run one configured experiment and classify the result.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    cfg.validate()?;
    let (tr, extra) = engine_trace(cfg)?;
    let grid = tr.states[0].f.grid().clone();
    let origin = grid.index_of(0.0).unwrap_or(0);
    let mid = grid.locate(0.5 * grid.x_max());
    let rows = tr
        .states
        .iter()
        .skip(1)
        .map(|s| Row {
            n: s.n,
            shift: s.e_shift,
            energy: s.e_n,
            f_origin: s.f.value(origin),
            f_mid: s.f.value(mid),
            max_df: s.max_df,
            charge_residual: s.charge_residual,
        })
        .collect();
    let profiles = tr.states.iter().skip(1).map(|s| s.df.values().to_vec()).collect();
    let report = certify(&tr, tr.case);
    let status = match tr.stop_reason {
        StopReason::PositivityViolation => Status::Positivity,
        _ if !report.passed() => Status::OrderingFailure,
        StopReason::MaxIter => Status::MaxIter,
        StopReason::Tolerance => Status::Converged,
    };
    let trace = Trace {
        version: TRACE_VERSION.to_string(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        case: format!("{:?}", tr.case),
        anchor: match tr.anchor {
            Anchor::Left => "left".into(),
            Anchor::Right => "right".into(),
        },
        e0: tr.e0,
        w_max: tr.w_max,
        stop_reason: stop_name(tr.stop_reason).into(),
        e_limit: tr.e_limit,
        extra,
        rows,
        profiles: Some(profiles),
    };
    Ok(Outcome { trace, status })
}
