//! Trial functions φ and perturbations w.
//!
//! Every trial satisfies `(T + V + w) φ = E0 φ` with `T = -½ d²/dx²`.
//! φ is stored as log-amplitude so that deep tails never underflow.

use std::sync::Arc;

use thiserror::Error;

use crate::grid::{make_grid, Domain, Grid, SampleKind, Samples};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrialError {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("grid must be a half line starting at 0")]
    NeedsHalfLine,
    #[error("grid needs a node at x = {0}")]
    MissingBreakpoint(f64),
    #[error("perturbation not monotone at nodes {nodes:?}")]
    NotMonotone { nodes: Vec<usize> },
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// Half line `x >= 0` of an even problem, or of one side of an odd one.
    HalfLineEven,
    FullLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotone {
    DecreasingForXPositive,
    DecreasingOnFullLine,
    IncreasingOnFullLine,
    None,
}

#[derive(Debug, Clone)]
pub struct TrialFunction {
    pub grid: Arc<Grid>,
    pub log_phi: Samples,
    pub w: Samples,
    pub e0: f64,
    pub v: Samples,
    pub domain_kind: DomainKind,
    pub w_monotone_dir: Monotone,
    /// Coordinates are `y = -x` (the negative side of a full-line problem).
    pub reflected: bool,
}

impl TrialFunction {
    /// Nodes where w jumps.
    pub fn w_jump_nodes(&self) -> Vec<usize> {
        self.w.jumps().iter().map(|&(i, _)| i).collect()
    }

    /// `φ(x_max) / max φ`, the truncation quality of the last node.
    pub fn tail_ratio(&self) -> f64 {
        let l = self.log_phi.values();
        let lmax = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (l[l.len() - 1] - lmax).exp()
    }

    /// `φ²` scaled by `1/max φ²`.
    pub fn phi_sq_scaled(&self) -> Samples {
        let l = self.log_phi.values();
        let lmax = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.log_phi.map(|v| (2.0 * (v - lmax)).exp()).with_kind(SampleKind::Plain)
    }
}

/// Closed forms of the perturbative series for the (tilted) quartic well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbSeries {
    pub lambda: f64,
    pub e0_c: f64,
    pub e1_c: Option<f64>,
    pub e2_c: Option<f64>,
    pub e0_minus: f64,
}

impl PerturbSeries {
    pub fn s0(&self, x: f64) -> f64 {
        (x - 1.0).powi(2) * (x + 2.0) / 3.0
    }

    /// S0 of the negative side, for `x <= 0`.
    pub fn s0_minus(&self, x: f64) -> f64 {
        (x + 1.0).powi(2) * (2.0 - x) / 3.0
    }

    pub fn s1(&self, x: f64) -> f64 {
        if self.lambda == 0.0 {
            ((x + 1.0) / 2.0).ln()
        } else {
            (1.0 + self.lambda) * (1.0 + x).ln()
        }
    }

    /// S1 of the negative side, for `x <= 0`.
    pub fn s1_minus(&self, x: f64) -> f64 {
        (1.0 - self.lambda) * (1.0 - x).ln()
    }

    /// Second-order term; only tabulated for the symmetric well.
    pub fn s2(&self, x: f64) -> Option<f64> {
        (self.lambda == 0.0).then(|| 3.0 / 16.0 - (x + 2.0) / (4.0 * (x + 1.0).powi(2)))
    }
}

pub fn quartic_series(lambda: f64) -> Result<PerturbSeries, TrialError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(TrialError::Domain(format!("lambda must satisfy 0 <= lambda < 1, got {lambda}")));
    }
    let sym = lambda == 0.0;
    Ok(PerturbSeries {
        lambda,
        e0_c: 1.0 + lambda,
        e1_c: sym.then_some(-0.25),
        e2_c: sym.then_some(-9.0 / 64.0),
        e0_minus: 1.0 - lambda,
    })
}

/// Default truncation edge for quartic problems.
pub fn quartic_x_max(g: f64) -> f64 {
    1.0 + 8.0 / g.sqrt()
}

/// Half-line grid for the quartic trials with the mandatory node at 1.
pub fn quartic_half_grid(g: f64, density: f64, x_max: Option<f64>) -> Result<Arc<Grid>, TrialError> {
    let x_max = x_max.unwrap_or_else(|| quartic_x_max(g));
    Ok(Arc::new(make_grid(Domain::HalfLine { x_max }, density, &[1.0])?))
}

pub fn build_harmonic_trial(g: f64, grid: &Arc<Grid>) -> Result<TrialFunction, TrialError> {
    if !(g > 0.0) {
        return Err(TrialError::Domain(format!("g must be positive, got {g}")));
    }
    let half = grid.x_min() == 0.0;
    Ok(TrialFunction {
        grid: grid.clone(),
        log_phi: Samples::from_fn(grid, |x| -0.5 * g * x * x).with_kind(SampleKind::LogAmplitude),
        w: Samples::constant(grid, 0.0),
        e0: 0.5 * g,
        v: Samples::from_fn(grid, |x| 0.5 * g * g * x * x),
        domain_kind: if half { DomainKind::HalfLineEven } else { DomainKind::FullLine },
        w_monotone_dir: if half { Monotone::DecreasingForXPositive } else { Monotone::None },
        reflected: false,
    })
}

fn require_half_line_with_one(grid: &Grid) -> Result<(), TrialError> {
    if grid.x_min() != 0.0 {
        return Err(TrialError::NeedsHalfLine);
    }
    if grid.x_max() > 1.0 && grid.index_of(1.0).is_none() {
        return Err(TrialError::MissingBreakpoint(1.0));
    }
    Ok(())
}

/// One side of the (possibly tilted) quartic trial, with `lam` signed.
///
/// The negative side of a tilted well is this construction with `-λ`
/// evaluated at `y = -x`.
fn quartic_side(g: f64, lam: f64, grid: &Arc<Grid>) -> (Samples, Samples, Samples) {
    let s0 = |x: f64| (x - 1.0).powi(2) * (x + 2.0) / 3.0;
    let a = g + 1.0 + lam;
    let b = g - 1.0 - lam;
    let e43 = (-4.0 * g / 3.0).exp();
    let log_phi = Samples::from_fn(grid, |x| {
        let base = -(1.0 + lam) * (1.0 + x).ln() - g * s0(x);
        let mix = if x < 1.0 { a + b * (-4.0 * g / 3.0 + 2.0 * g * s0(x)).exp() } else { a + b * e43 };
        base + (mix / (2.0 * g)).ln()
    })
    .with_kind(SampleKind::LogAmplitude);
    let w = Samples::from_fn_sided(grid, SampleKind::Plain, |x, side| {
        let u = (1.0 + lam) * (2.0 + lam) / (2.0 * (1.0 + x).powi(2));
        if side.below(x, 1.0) {
            let r = (-4.0 * g / 3.0 + 2.0 * g * s0(x)).exp();
            u + 2.0 * g * b * (1.0 + lam - lam * x) * r / (a + b * r)
        } else {
            u
        }
    });
    let v = Samples::from_fn(grid, |x| 0.5 * g * g * (x * x - 1.0).powi(2) + g * lam * x);
    (log_phi, w, v)
}

pub fn build_symmetric_quartic_trial(g: f64, grid: &Arc<Grid>) -> Result<TrialFunction, TrialError> {
    if !(g >= 1.0) {
        return Err(TrialError::Domain(format!("g must be at least 1, got {g}")));
    }
    require_half_line_with_one(grid)?;
    let (log_phi, w, v) = quartic_side(g, 0.0, grid);
    Ok(TrialFunction {
        grid: grid.clone(),
        log_phi,
        w,
        e0: g,
        v,
        domain_kind: DomainKind::HalfLineEven,
        w_monotone_dir: Monotone::DecreasingForXPositive,
        reflected: false,
    })
}

/// Trial pair for `V = ½g²(x²-1)² + gλx`: the positive side on `plus_grid`
/// and the negative side on `minus_grid` in the reflected coordinate.
pub fn build_asymmetric_quartic_trial(
    g: f64,
    lambda: f64,
    plus_grid: &Arc<Grid>,
    minus_grid: &Arc<Grid>,
) -> Result<(TrialFunction, TrialFunction), TrialError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(TrialError::Domain(format!("lambda must satisfy 0 <= lambda < 1, got {lambda}")));
    }
    if lambda == 0.0 {
        let plus = build_symmetric_quartic_trial(g, plus_grid)?;
        let mut minus = build_symmetric_quartic_trial(g, minus_grid)?;
        minus.reflected = true;
        return Ok((plus, minus));
    }
    if !(g > 1.0 + lambda) {
        return Err(TrialError::Domain(format!("g must exceed 1 + lambda, got g = {g}, lambda = {lambda}")));
    }
    require_half_line_with_one(plus_grid)?;
    require_half_line_with_one(minus_grid)?;
    let make = |grid: &Arc<Grid>, lam: f64, reflected: bool| {
        let (log_phi, w, v) = quartic_side(g, lam, grid);
        TrialFunction {
            grid: grid.clone(),
            log_phi,
            w,
            e0: g * (1.0 + lam),
            v,
            domain_kind: DomainKind::HalfLineEven,
            w_monotone_dir: Monotone::DecreasingForXPositive,
            reflected,
        }
    };
    let plus = make(plus_grid, lambda, false);
    let minus = make(minus_grid, -lambda, true);
    for t in [&plus, &minus] {
        let bad = non_monotone_nodes(&t.w);
        if !bad.is_empty() {
            return Err(TrialError::NotMonotone { nodes: bad });
        }
    }
    Ok((plus, minus))
}

/// Nodes `i` where the samples increase between `i` and `i + 1`.
pub fn non_monotone_nodes(w: &Samples) -> Vec<usize> {
    let n = w.len();
    let mut bad = Vec::new();
    for i in 0..n - 1 {
        let here = w.value(i);
        let right = w.right_value(i);
        if right > here || w.value(i + 1) > right {
            bad.push(i);
        }
    }
    bad
}

/// Largest pointwise residual of `(T + V + w - E0) φ`, relative to `E0 φ`.
///
/// Uses three-point differences of log φ, which keeps the tails accurate.
/// Nodes next to jumps of w are skipped.
pub fn residual_check(t: &TrialFunction) -> f64 {
    residual_profile(t).iter().filter_map(|r| *r).fold(0.0, f64::max)
}

/// φ²-weighted RMS of the pointwise residual, relative to `E0`.
pub fn residual_norm(t: &TrialFunction) -> f64 {
    let prof = residual_profile(t);
    let w = t.phi_sq_scaled();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, r) in prof.iter().enumerate() {
        if let Some(r) = r {
            num += r * r * w.value(i);
            den += w.value(i);
        }
    }
    (num / den).sqrt()
}

/// Per-node residual (None where skipped).
pub fn residual_profile(t: &TrialFunction) -> Vec<Option<f64>> {
    let x = t.grid.nodes();
    let l = t.log_phi.values();
    let n = x.len();
    let jumps = t.w_jump_nodes();
    let near_jump = |i: usize| jumps.iter().any(|&j| j + 1 >= i && j <= i + 1);
    let mut out = vec![None; n];
    for i in 1..n - 1 {
        if near_jump(i) || !l[i - 1].is_finite() || !l[i + 1].is_finite() {
            continue;
        }
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        let dm = (l[i] - l[i - 1]) / hm;
        let dp = (l[i + 1] - l[i]) / hp;
        let d1 = (hm * dp + hp * dm) / (hm + hp);
        let d2 = 2.0 * (dp - dm) / (hm + hp);
        let r = -0.5 * (d2 + d1 * d1) + t.v.value(i) + t.w.value(i) - t.e0;
        out[i] = Some(r.abs() / t.e0.abs());
    }
    out
}

/// Sampled check that φ has zero slope at the origin of a half line.
pub fn origin_slope(t: &TrialFunction) -> f64 {
    let x = t.grid.nodes();
    let l = t.log_phi.values();
    let (h1, h2) = (x[1] - x[0], x[2] - x[0]);
    let phi = |i: usize| (l[i] - l[0]).exp();
    // one-sided second-order derivative of φ/φ(0)
    (h2 * h2 * (phi(1) - 1.0) - h1 * h1 * (phi(2) - 1.0)) / (h1 * h2 * (h2 - h1))
}
