use serde::Serialize;

use hierarchy_core::hierarchy::{certify_profiles, Anchor, Case, CertificationReport, Check, ShiftSeries, Verdict};

use crate::trace::Trace;

pub const REPORT_VERSION: &str = "hierarchy-solver/report/v1";

#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub margin: Option<f64>,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportOut {
    pub version: &'static str,
    pub config_hash: String,
    pub case: String,
    pub passed: bool,
    pub strict: bool,
    pub worst_margin: Option<f64>,
    pub degenerate: Option<String>,
    /// False for CSV traces, which carry no f profiles.
    pub pointwise_checked: bool,
    pub failures: Vec<CheckOut>,
    pub energy: Vec<CheckOut>,
    pub pointwise: Vec<CheckOut>,
    pub ratio_slope: Vec<CheckOut>,
    pub cross: Vec<CheckOut>,
    pub bounds: Vec<CheckOut>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn out(c: &Check) -> CheckOut {
    CheckOut {
        label: c.label.clone(),
        n: c.n,
        m: c.m,
        margin: finite(c.margin),
        verdict: match c.verdict {
            Verdict::Pass => "pass",
            Verdict::Tie => "tie",
            Verdict::Fail => "fail",
        },
    }
}

/// Re-check the orderings recorded in a trace file.
pub fn certify_trace(t: &Trace) -> CertificationReport {
    let case = if t.case == "B" { Case::B } else { Case::A };
    let anchor = if t.anchor == "left" { Anchor::Left } else { Anchor::Right };
    let mut shifts = vec![0.0];
    shifts.extend(t.rows.iter().map(|r| r.shift));
    let series = ShiftSeries { case, shifts, w_max: t.w_max };
    match &t.profiles {
        Some(p) if !p.is_empty() => {
            let zero = vec![0.0; p[0].len()];
            let mut profiles: Vec<(usize, &[f64])> = vec![(0, zero.as_slice())];
            profiles.extend(t.rows.iter().zip(p).map(|(r, v)| (r.n, v.as_slice())));
            certify_profiles(&series, anchor, &profiles)
        }
        _ => certify_profiles(&series, anchor, &[]),
    }
}

pub fn report_json(t: &Trace, r: &CertificationReport) -> ReportOut {
    let list = |v: &[Check]| v.iter().map(out).collect::<Vec<_>>();
    ReportOut {
        version: REPORT_VERSION,
        config_hash: t.config_hash.clone(),
        case: t.case.clone(),
        passed: r.passed(),
        strict: r.strict(),
        worst_margin: finite(r.worst_margin),
        degenerate: r.degenerate.clone(),
        pointwise_checked: t.profiles.as_ref().is_some_and(|p| !p.is_empty()),
        failures: r.failures().into_iter().map(out).collect(),
        energy: list(&r.energy),
        pointwise: list(&r.pointwise),
        ratio_slope: list(&r.ratio_slope),
        cross: list(&r.cross),
        bounds: list(&r.bounds),
    }
}
