//! The iteration engine.
//!
//! With `ψ_n = φ f_n`, each step fixes the shift `ℰ_n = [w f_{n-1}] / [f_{n-1}]`,
//! forms the displacement `D_n(x) = ∫ φ² (w - ℰ_n) f_{n-1}` (zero at both ends)
//! and integrates `f_n' = -2 D_n / φ²` from the anchored end, where `f_n = 1`.
//!
//! `D/φ²` is never formed from `D` and `φ²` separately. It is propagated as a
//! ratio from each end of the domain towards the peak of `|D|`, using weights
//! `φ²(z)/φ²(x)` that stay of order one inside a panel stencil. That keeps the
//! deep tails, where `φ²` underflows, exact to roundoff.

use std::sync::Arc;

use thiserror::Error;

use crate::grid::{Grid, SampleKind, Samples};
use crate::trialgen::{non_monotone_nodes, DomainKind, Monotone, TrialFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HierarchyError {
    #[error("f is not positive at node {node} (value {value})")]
    Positivity { node: usize, value: f64 },
    #[error("charge balance broken: |D(end)| / max|D| = {0:e}")]
    ChargeBalance(f64),
    #[error("perturbation is not monotone at nodes {0:?}")]
    NotMonotone(Vec<usize>),
    #[error("half-line iteration did not converge ({0})")]
    NotConverged(String),
    #[error("glued trial function vanishes at the origin")]
    DegenerateGluing,
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
}

/// Boundary normalization of the f sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `f_n = 1` where w is smallest: monotone sequences, upper bounds.
    A,
    /// `f_n = 1` where w is largest: alternating sequences, two-sided bounds.
    B,
}

/// Domain end where `f_n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    AtPlusInf,
    AtMinusInf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub max_iter: usize,
    /// Absolute tolerance on successive shifts; `None` means `1e-10 * |E0|`.
    pub tol_e: Option<f64>,
    /// Tolerance on `max|f_n - f_{n-1}|`, relative to `max(1, max|f_n|)`.
    pub tol_f: f64,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions { max_iter: 64, tol_e: None, tol_f: 1e-9 }
    }
}

impl IterOptions {
    /// Run exactly `n` steps.
    pub fn fixed(n: usize) -> Self {
        IterOptions { max_iter: n, tol_e: Some(0.0), tol_f: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIter,
    PositivityViolation,
}

#[derive(Debug, Clone)]
pub struct IterationState {
    pub n: usize,
    pub f: Samples,
    /// `f - 1`, accurate near the anchor where f itself rounds to 1.
    pub df: Samples,
    pub e_shift: f64,
    /// Displacement in units of `max φ²`.
    pub d: Samples,
    pub e_n: f64,
    pub charge_residual: f64,
    pub max_df: f64,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub case: Case,
    pub anchor: Anchor,
    pub e0: f64,
    pub w_max: f64,
    pub states: Vec<IterationState>,
    pub converged: bool,
    pub e_limit: Option<f64>,
    pub f_limit: Option<Samples>,
    pub stop_reason: StopReason,
}

impl IterationTrace {
    pub fn shifts(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.e_shift).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.e_n).collect()
    }

    pub fn last(&self) -> &IterationState {
        self.states.last().expect("trace has the initial state")
    }

    /// Two-sided bounds `[max even E_m, min odd E_m]` over `m <= n`, for n >= 2.
    pub fn case_b_intervals(&self) -> Vec<(usize, f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut out = Vec::new();
        for s in self.states.iter().skip(1) {
            if s.n % 2 == 0 {
                lo = lo.max(s.e_n);
            } else {
                hi = hi.min(s.e_n);
            }
            if s.n >= 2 {
                out.push((s.n, lo, hi));
            }
        }
        out
    }
}

/// Output of one displacement solve.
#[derive(Debug, Clone)]
pub struct Displacement {
    /// `D` in units of `max φ²`.
    pub d: Samples,
    /// `D / φ²`.
    pub r: Samples,
    pub charge_residual: f64,
    pub pivot: usize,
}

struct Kernel<'a> {
    grid: &'a Arc<Grid>,
    l: &'a [f64],
    lmax: f64,
    w: &'a Samples,
}

struct Step {
    e_shift: f64,
    disp: Displacement,
}

impl<'a> Kernel<'a> {
    fn new(w: &'a Samples, log_phi: &'a Samples) -> Kernel<'a> {
        let l = log_phi.values();
        let lmax = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Kernel { grid: log_phi.grid(), l, lmax, w }
    }

    fn kappa(&self, j: usize) -> f64 {
        (2.0 * (self.l[j] - self.lmax)).exp()
    }

    fn check_positive(f: &[f64]) -> Result<(), HierarchyError> {
        match f.iter().position(|&v| !(v > 0.0)) {
            Some(node) => Err(HierarchyError::Positivity { node, value: f[node] }),
            None => Ok(()),
        }
    }

    /// `([w f], [f])` in units of `max φ²`.
    fn brackets(&self, f: &[f64]) -> (f64, f64) {
        let (mut num, mut den) = (0.0, 0.0);
        for p in 0..self.grid.n_panels() {
            let st = self.grid.stencil(p);
            for (j, wk) in st.nodes().zip(st.weights) {
                let kf = wk * self.kappa(j) * f[j];
                num += kf * self.w.stencil_value(&st, j);
                den += kf;
            }
        }
        (num, den)
    }

    fn displacement(&self, f: &[f64], e_shift: f64, num: f64) -> Displacement {
        let grid = self.grid;
        let n = grid.len();
        let l = self.l;
        let s = |st: &crate::grid::Stencil, j: usize| (self.w.stencil_value(st, j) - e_shift) * f[j];

        let mut d_left = vec![0.0; n];
        for p in 0..grid.n_panels() {
            let st = grid.stencil(p);
            let q: f64 = st.nodes().zip(st.weights).map(|(j, wk)| wk * self.kappa(j) * s(&st, j)).sum();
            d_left[p + 1] = d_left[p] + q;
        }
        let scale = num.abs();
        let charge_residual = if scale > 0.0 { d_left[n - 1].abs() / scale } else { 0.0 };

        let mut pivot = 0;
        let mut peak = 0.0;
        for (i, v) in d_left.iter().enumerate() {
            if v.abs() > peak {
                peak = v.abs();
                pivot = i;
            }
        }
        let mut r = vec![0.0; n];
        if peak > 0.0 {
            pivot = pivot.clamp(1, n - 2);
            for i in 0..pivot {
                let st = grid.stencil(i);
                let li = l[i + 1];
                let carry = if r[i] == 0.0 { 0.0 } else { (2.0 * (l[i] - li)).exp() * r[i] };
                let q: f64 = st.nodes().zip(st.weights).map(|(j, wk)| wk * (2.0 * (l[j] - li)).exp() * s(&st, j)).sum();
                r[i + 1] = carry + q;
            }
            for i in (pivot + 1..n - 1).rev() {
                let st = grid.stencil(i);
                let li = l[i];
                let carry = if r[i + 1] == 0.0 { 0.0 } else { (2.0 * (l[i + 1] - li)).exp() * r[i + 1] };
                let q: f64 = st.nodes().zip(st.weights).map(|(j, wk)| wk * (2.0 * (l[j] - li)).exp() * s(&st, j)).sum();
                r[i] = carry - q;
            }
        }
        let d: Vec<f64> = (0..n).map(|i| if r[i] == 0.0 { 0.0 } else { self.kappa(i) * r[i] }).collect();
        Displacement {
            d: Samples::plain(grid.clone(), d),
            r: Samples::plain(grid.clone(), r),
            charge_residual,
            pivot,
        }
    }

    fn step(&self, f: &[f64]) -> Result<Step, HierarchyError> {
        Self::check_positive(f)?;
        let (num, den) = self.brackets(f);
        let e_shift = num / den;
        let disp = self.displacement(f, e_shift, num);
        Ok(Step { e_shift, disp })
    }
}

/// Integrate `f' = -2R` from the anchor; returns `f - 1`.
fn integrate_r(r: &Samples, anchor: Anchor) -> Vec<f64> {
    let grid = r.grid();
    let n = grid.len();
    let mut df = vec![0.0; n];
    let panel = |p: usize| -> f64 {
        let st = grid.stencil(p);
        st.nodes().zip(st.weights).map(|(j, wk)| wk * r.value(j)).sum()
    };
    match anchor {
        Anchor::Right => {
            for p in (0..n - 1).rev() {
                df[p] = df[p + 1] + 2.0 * panel(p);
            }
        }
        Anchor::Left => {
            for p in 0..n - 1 {
                df[p + 1] = df[p] - 2.0 * panel(p);
            }
        }
    }
    df
}

/// `ℰ_n = [w f_{n-1}] / [f_{n-1}]`.
pub fn energy_update(w: &Samples, f_prev: &Samples, log_phi: &Samples) -> Result<f64, HierarchyError> {
    let k = Kernel::new(w, log_phi);
    Kernel::check_positive(f_prev.values())?;
    let (num, den) = k.brackets(f_prev.values());
    Ok(num / den)
}

/// Displacement field for a given shift.
pub fn displacement(
    w: &Samples,
    f_prev: &Samples,
    log_phi: &Samples,
    e_shift: f64,
) -> Result<Displacement, HierarchyError> {
    let k = Kernel::new(w, log_phi);
    let (num, _) = k.brackets(f_prev.values());
    let disp = k.displacement(f_prev.values(), e_shift, num);
    let dmax = disp.d.values().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let (mut tail, mut acc) = (0.0, 0.0);
    for p in 0..log_phi.grid().n_panels() {
        let st = log_phi.grid().stencil(p);
        acc += st
            .nodes()
            .zip(st.weights)
            .map(|(j, wk)| wk * k.kappa(j) * (w.stencil_value(&st, j) - e_shift) * f_prev.value(j))
            .sum::<f64>();
        tail = acc;
    }
    if dmax > 0.0 && tail.abs() / dmax > 1e-8 {
        return Err(HierarchyError::ChargeBalance(tail.abs() / dmax));
    }
    Ok(disp)
}

/// `f(x_max) = 1` and `f' = -2D/φ²`.
pub fn f_update_case_a(disp: &Displacement) -> Samples {
    let df = integrate_r(&disp.r, Anchor::Right);
    Samples::plain(disp.r.grid().clone(), df.iter().map(|v| 1.0 + v).collect())
}

/// `f(0) = 1` and `f' = -2D/φ²`; fails when f turns nonpositive.
pub fn f_update_case_b(disp: &Displacement) -> Result<Samples, HierarchyError> {
    let df = integrate_r(&disp.r, Anchor::Left);
    let f: Vec<f64> = df.iter().map(|v| 1.0 + v).collect();
    Kernel::check_positive(&f)?;
    Ok(Samples::plain(disp.r.grid().clone(), f))
}

fn monotone_direction(w: &Samples) -> Option<Monotone> {
    if non_monotone_nodes(w).is_empty() {
        return Some(Monotone::DecreasingOnFullLine);
    }
    let neg = w.map(|v| -v);
    non_monotone_nodes(&neg).is_empty().then_some(Monotone::IncreasingOnFullLine)
}

fn initial_state(grid: &Arc<Grid>, e0: f64) -> IterationState {
    IterationState {
        n: 0,
        f: Samples::constant(grid, 1.0),
        df: Samples::constant(grid, 0.0),
        e_shift: 0.0,
        d: Samples::constant(grid, 0.0),
        e_n: e0,
        charge_residual: 0.0,
        max_df: 0.0,
    }
}

/// Run the iteration with `f = 1` at `anchor`.
pub fn iterate_anchored(
    log_phi: &Samples,
    w: &Samples,
    e0: f64,
    anchor: Anchor,
    opts: IterOptions,
) -> Result<IterationTrace, HierarchyError> {
    let dir = monotone_direction(w).ok_or_else(|| HierarchyError::NotMonotone(non_monotone_nodes(w)))?;
    let case = match (dir, anchor) {
        (Monotone::DecreasingOnFullLine, Anchor::Right) | (Monotone::IncreasingOnFullLine, Anchor::Left) => Case::A,
        _ => Case::B,
    };
    let grid = log_phi.grid().clone();
    let kernel = Kernel::new(w, log_phi);
    let tol_e = opts.tol_e.unwrap_or(1e-10 * e0.abs());
    let w_max = w.values().iter().chain(w.jumps().iter().map(|(_, v)| v)).cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut states = vec![initial_state(&grid, e0)];
    let mut stop_reason = StopReason::MaxIter;
    let mut converged = false;
    for n in 1..=opts.max_iter {
        let prev = states.last().expect("nonempty");
        let step = match kernel.step(prev.f.values()) {
            Ok(s) => s,
            Err(HierarchyError::Positivity { .. }) => {
                stop_reason = StopReason::PositivityViolation;
                break;
            }
            Err(e) => return Err(e),
        };
        let df = integrate_r(&step.disp.r, anchor);
        let f: Vec<f64> = df.iter().map(|v| 1.0 + v).collect();
        let max_df = df.iter().zip(prev.df.values()).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
        let f_scale = f.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let de = (step.e_shift - prev.e_shift).abs();
        let positive = f.iter().all(|&v| v > 0.0);
        states.push(IterationState {
            n,
            f: Samples::plain(grid.clone(), f),
            df: Samples::plain(grid.clone(), df),
            e_shift: step.e_shift,
            d: step.disp.d,
            e_n: e0 - step.e_shift,
            charge_residual: step.disp.charge_residual,
            max_df,
        });
        if !positive {
            stop_reason = StopReason::PositivityViolation;
            break;
        }
        if de < tol_e && max_df < opts.tol_f * f_scale {
            stop_reason = StopReason::Tolerance;
            converged = true;
            break;
        }
    }
    let (e_limit, f_limit) = if converged {
        let s = states.last().expect("nonempty");
        (Some(s.e_n), Some(s.f.clone()))
    } else {
        (None, None)
    };
    Ok(IterationTrace { case, anchor, e0, w_max, states, converged, e_limit, f_limit, stop_reason })
}

/// Iterate a half-line trial: Case A anchors at `x_max`, Case B at 0.
pub fn iterate(trial: &TrialFunction, case: Case, opts: IterOptions) -> Result<IterationTrace, HierarchyError> {
    let bad = non_monotone_nodes(&trial.w);
    if trial.domain_kind == DomainKind::HalfLineEven && !bad.is_empty() {
        return Err(HierarchyError::NotMonotone(bad));
    }
    let anchor = match case {
        Case::A => Anchor::Right,
        Case::B => Anchor::Left,
    };
    iterate_anchored(&trial.log_phi, &trial.w, trial.e0, anchor, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Equal within the roundoff floor.
    Tie,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub margin: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub case: Case,
    pub energy: Vec<Check>,
    pub pointwise: Vec<Check>,
    pub ratio_slope: Vec<Check>,
    pub cross: Vec<Check>,
    pub bounds: Vec<Check>,
    pub worst_margin: f64,
    pub degenerate: Option<String>,
}

impl CertificationReport {
    pub fn all(&self) -> impl Iterator<Item = &Check> {
        self.energy.iter().chain(&self.pointwise).chain(&self.ratio_slope).chain(&self.cross).chain(&self.bounds)
    }

    pub fn passed(&self) -> bool {
        self.all().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.all().filter(|c| c.verdict == Verdict::Fail).collect()
    }

    /// No failures and no ties.
    pub fn strict(&self) -> bool {
        self.all().all(|c| c.verdict == Verdict::Pass)
    }
}

/// Relative floor used for Case B comparisons.
pub const CASE_B_FLOOR: f64 = 1e-13;

/// Energy-only view of a trace, enough to check the orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSeries {
    pub case: Case,
    pub shifts: Vec<f64>,
    pub w_max: f64,
}

fn judge(label: &str, n: usize, m: usize, diff: f64, scale: f64, floor: f64) -> Check {
    let margin = if scale > 0.0 { diff / scale } else { diff };
    let verdict = if margin > floor {
        Verdict::Pass
    } else if margin.abs() <= floor && floor > 0.0 {
        Verdict::Tie
    } else {
        Verdict::Fail
    };
    Check { label: label.to_string(), n, m, margin, verdict }
}

/// Energy orderings and bounds, from shifts alone.
pub fn certify_shifts(series: &ShiftSeries) -> (Vec<Check>, Vec<Check>, Vec<Check>) {
    let e = &series.shifts;
    let floor = if series.case == Case::B { CASE_B_FLOOR } else { 0.0 };
    let mut energy = Vec::new();
    let mut cross = Vec::new();
    let mut bounds = Vec::new();
    let scale = |a: f64, b: f64| a.abs().max(b.abs());
    for n in 1..e.len() {
        bounds.push(judge("shift > 0", n, n, e[n], e[n].abs(), 0.0));
        bounds.push(judge("shift < max w", n, n, series.w_max - e[n], series.w_max.abs(), 0.0));
    }
    match series.case {
        Case::A => {
            for n in 1..e.len().saturating_sub(1) {
                energy.push(judge("shift ascending", n, n + 1, e[n + 1] - e[n], scale(e[n], e[n + 1]), floor));
            }
        }
        Case::B => {
            for n in 1..e.len().saturating_sub(2) {
                let diff = if n % 2 == 1 { e[n + 2] - e[n] } else { e[n] - e[n + 2] };
                let label = if n % 2 == 1 { "odd shifts ascending" } else { "even shifts descending" };
                energy.push(judge(label, n, n + 2, diff, scale(e[n], e[n + 2]), floor));
            }
            for n in 1..e.len().saturating_sub(1) {
                let diff = if n % 2 == 1 { e[n + 1] - e[n] } else { e[n] - e[n + 1] };
                cross.push(judge("even shift above odd", n, n + 1, diff, scale(e[n], e[n + 1]), floor));
            }
            let min_even = (2..e.len()).step_by(2).map(|n| e[n]).fold(f64::INFINITY, f64::min);
            let max_odd = (1..e.len()).step_by(2).map(|n| e[n]).fold(f64::NEG_INFINITY, f64::max);
            if min_even.is_finite() && max_odd.is_finite() {
                cross.push(judge("min even above max odd", 0, 0, min_even - max_odd, scale(min_even, max_odd), floor));
            }
        }
    }
    (energy, cross, bounds)
}

/// Check the orderings of a trace against its case.
pub fn certify(trace: &IterationTrace, case: Case) -> CertificationReport {
    let series = ShiftSeries { case, shifts: trace.shifts(), w_max: trace.w_max };
    let profiles: Vec<(usize, &[f64])> = trace.states.iter().map(|s| (s.n, s.df.values())).collect();
    certify_profiles(&series, trace.anchor, &profiles)
}

/// Certification from raw profiles `(n, f_n - 1)`, as stored in a trace file.
pub fn certify_profiles(series: &ShiftSeries, anchor: Anchor, profiles: &[(usize, &[f64])]) -> CertificationReport {
    let case = series.case;
    if series.shifts.iter().all(|&e| e == 0.0) {
        return CertificationReport {
            case,
            energy: vec![],
            pointwise: vec![],
            ratio_slope: vec![],
            cross: vec![],
            bounds: vec![],
            worst_margin: 0.0,
            degenerate: Some("degenerate: w ≡ 0".to_string()),
        };
    }
    let (energy, cross, bounds) = certify_shifts(series);
    let anchor_node = match anchor {
        Anchor::Right => profiles.first().map_or(0, |p| p.1.len().saturating_sub(1)),
        Anchor::Left => 0,
    };
    let mut pointwise = Vec::new();
    let mut ratio_slope = Vec::new();
    for pair in profiles.windows(2) {
        let ((na, da), (nb, db)) = (pair[0], pair[1]);
        let nn = da.len().min(db.len());
        if nn == 0 {
            continue;
        }
        if case == Case::A {
            let mut worst = f64::INFINITY;
            for i in 0..nn {
                if i != anchor_node {
                    worst = worst.min(db[i] - da[i]);
                }
            }
            pointwise.push(judge("f ascending pointwise", na, nb, worst, 0.0, 0.0));
        }
        // ratio f_{n+1}/f_n - 1, formed from the deviations to keep precision
        let rho: Vec<f64> = (0..nn).map(|i| (db[i] - da[i]) / (1.0 + da[i])).collect();
        let descending = match case {
            Case::A => true,
            Case::B => na % 2 == 0,
        };
        let sign = if descending { -1.0 } else { 1.0 };
        let rho_scale = rho.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let noise: Vec<f64> =
            (0..nn).map(|i| CASE_B_FLOOR * 1f64.max(da[i].abs()).max(db[i].abs()) / (1.0 + da[i]).abs()).collect();
        let mut worst = f64::INFINITY;
        let mut verdict = Verdict::Pass;
        for i in 0..nn - 1 {
            let step = sign * (rho[i + 1] - rho[i]);
            let tol = noise[i] + noise[i + 1];
            worst = worst.min(step);
            if step < -tol {
                verdict = Verdict::Fail;
            } else if step <= tol && verdict == Verdict::Pass {
                verdict = Verdict::Tie;
            }
        }
        let label = if descending { "ratio slope negative" } else { "ratio slope positive" };
        let margin = if rho_scale > 0.0 { worst / rho_scale } else { worst };
        ratio_slope.push(Check { label: label.to_string(), n: na, m: nb, margin, verdict });
    }
    let mut report = CertificationReport {
        case,
        energy,
        pointwise,
        ratio_slope,
        cross,
        bounds,
        worst_margin: 0.0,
        degenerate: None,
    };
    report.worst_margin = report
        .energy
        .iter()
        .chain(&report.pointwise)
        .chain(&report.cross)
        .map(|c| c.margin)
        .fold(f64::INFINITY, f64::min);
    report
}

/// Half-line limits for both sides of a tilted well.
#[derive(Debug, Clone)]
pub struct HalfLinePair {
    pub e_plus: f64,
    pub f_plus: Samples,
    pub e_minus: f64,
    pub f_minus: Samples,
    pub trace_plus: IterationTrace,
    pub trace_minus: IterationTrace,
}

pub fn solve_half_line_pair(
    tplus: &TrialFunction,
    tminus: &TrialFunction,
    opts: IterOptions,
) -> Result<HalfLinePair, HierarchyError> {
    let run = |t: &TrialFunction, side: &str| -> Result<(f64, Samples, IterationTrace), HierarchyError> {
        let tr = iterate(t, Case::A, opts)?;
        match (tr.e_limit, tr.f_limit.clone()) {
            (Some(e), Some(f)) => Ok((e, f, tr)),
            _ => Err(HierarchyError::NotConverged(format!("{side} side stopped with {:?}", tr.stop_reason))),
        }
    };
    let (e_plus, f_plus, trace_plus) = run(tplus, "plus")?;
    let (e_minus, f_minus, trace_minus) = run(tminus, "minus")?;
    Ok(HalfLinePair { e_plus, f_plus, e_minus, f_minus, trace_plus, trace_minus })
}

#[derive(Debug, Clone)]
pub struct FullLineProblem {
    pub chi: TrialFunction,
    pub w_step: Samples,
    pub e_hat0: f64,
    pub e_a: f64,
    pub e_b: f64,
}

/// Join the half-line solutions into one full-line trial with a step perturbation.
pub fn glue_full_line(
    half: &HalfLinePair,
    tplus: &TrialFunction,
    tminus: &TrialFunction,
) -> Result<FullLineProblem, HierarchyError> {
    let grid = Arc::new(Grid::mirror_join(&tminus.grid, &tplus.grid)?);
    let lp: Vec<f64> = tplus.log_phi.values().iter().zip(half.f_plus.values()).map(|(l, f)| l + f.ln()).collect();
    let lm: Vec<f64> = tminus.log_phi.values().iter().zip(half.f_minus.values()).map(|(l, f)| l + f.ln()).collect();
    if !(lp[0].is_finite() && lm[0].is_finite()) {
        return Err(HierarchyError::DegenerateGluing);
    }
    let shift = lp[0] - lm[0];
    let nm = lm.len();
    let mut lchi: Vec<f64> = lm.iter().rev().map(|v| v + shift).collect();
    lchi[nm - 1] = lp[0];
    lchi.extend_from_slice(&lp[1..]);
    let mut v: Vec<f64> = tminus.v.values().iter().rev().cloned().collect();
    v.extend_from_slice(&tplus.v.values()[1..]);

    let (e_a, e_b) = if half.e_plus >= half.e_minus { (half.e_plus, half.e_minus) } else { (half.e_minus, half.e_plus) };
    let gap = e_a - e_b;
    let plus_higher = half.e_plus >= half.e_minus;
    let w_step = Samples::from_fn_sided(&grid, SampleKind::Plain, |x, side| {
        let left = side.below(x, 0.0);
        if left == plus_higher {
            gap
        } else {
            0.0
        }
    });
    let dir = if gap == 0.0 {
        Monotone::None
    } else if plus_higher {
        Monotone::DecreasingOnFullLine
    } else {
        Monotone::IncreasingOnFullLine
    };
    let chi = TrialFunction {
        grid: grid.clone(),
        log_phi: Samples::new(grid.clone(), lchi, SampleKind::LogAmplitude),
        w: w_step.clone(),
        e0: e_a,
        v: Samples::plain(grid.clone(), v),
        domain_kind: DomainKind::FullLine,
        w_monotone_dir: dir,
        reflected: false,
    };
    Ok(FullLineProblem { chi, w_step, e_hat0: e_a, e_a, e_b })
}

pub fn iterate_full_line(
    p: &FullLineProblem,
    boundary: Boundary,
    opts: IterOptions,
) -> Result<IterationTrace, HierarchyError> {
    let anchor = match boundary {
        Boundary::AtPlusInf => Anchor::Right,
        Boundary::AtMinusInf => Anchor::Left,
    };
    iterate_anchored(&p.chi.log_phi, &p.w_step, p.e_hat0, anchor, opts)
}

/// Ground-state energy of the tilted quartic by the two-stage pipeline.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub half: HalfLinePair,
    pub problem: FullLineProblem,
    pub trace: IterationTrace,
}

pub fn full_line_pipeline(
    tplus: &TrialFunction,
    tminus: &TrialFunction,
    boundary: Boundary,
    half_opts: IterOptions,
    full_opts: IterOptions,
) -> Result<PipelineResult, HierarchyError> {
    let half = solve_half_line_pair(tplus, tminus, half_opts)?;
    let problem = glue_full_line(&half, tplus, tminus)?;
    let trace = iterate_full_line(&problem, boundary, full_opts)?;
    Ok(PipelineResult { half, problem, trace })
}
