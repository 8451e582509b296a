//! The asymmetric square double well with hard walls at `±γ`:
//! `V = μ²/2` on `(α, γ)`, `W²/2` on `(-α, α)`, `0` on `(-γ, -α)`, with `γ = α + β`.
//!
//! Every quantity here is closed-form up to one-dimensional root finding, so the
//! module doubles as ground truth for the engine.

mod analytic;
mod poly;
mod twolevel;

pub use analytic::*;
pub use poly::*;
pub use twolevel::*;

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::grid::GridError;
use crate::hierarchy::HierarchyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SquareWellError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("no bound state in the bracket: {0}")]
    Regime(String),
    #[error("x = {0} is outside (-γ, γ)")]
    Domain(f64),
    #[error("χψ integrals are not positive (M + N = {0})")]
    Integration(f64),
    #[error("matching system is singular")]
    Degenerate,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Engine(#[from] HierarchyError),
}

/// Symmetric well whose lowest level is sought.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// Both wells at depth 0, even state.
    B,
    /// Both wells at `μ²/2`, even state.
    A { mu: f64 },
    /// Both wells at depth 0, odd state.
    Od,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRoot {
    /// Wavenumber inside the wells.
    pub k: f64,
    /// Decay constant inside the barrier.
    pub q: f64,
    pub energy: f64,
    /// Residual of the matching condition.
    pub residual: f64,
}

/// Root of an increasing function with `f(lo) < 0 < f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Solve `-tβ cot tβ = qβ·closure(qα)` with `k² + q² = depth²`, `t = kβ ∈ (π/2, π)`.
fn even_root(depth: f64, beta: f64, alpha: f64, odd: bool) -> Result<(f64, f64, f64), SquareWellError> {
    let db = depth * beta;
    if db <= FRAC_PI_2 {
        return Err(SquareWellError::Regime(format!("Wβ = {db} is too small for a level with kβ > π/2")));
    }
    let g = |t: f64| {
        let qb = (db * db - t * t).max(0.0).sqrt();
        let q = qb / beta;
        let closure = if odd { 1.0 / (q * alpha).tanh() } else { (q * alpha).tanh() };
        -t / t.tan() - qb * closure
    };
    let hi = (PI - 1e-12).min(db);
    if !(g(FRAC_PI_2 + 1e-15) < 0.0 && g(hi) > 0.0) {
        return Err(SquareWellError::Regime("no sign change of the matching function".into()));
    }
    let t = bisect(g, FRAC_PI_2, hi);
    let k = t / beta;
    let q = (depth * depth - k * k).max(0.0).sqrt();
    Ok((k, q, g(t)))
}

pub fn solve_even_well(w: f64, beta: f64, alpha: f64, channel: Channel) -> Result<ChannelRoot, SquareWellError> {
    if !(w > 0.0 && beta > 0.0 && alpha > 0.0) {
        return Err(SquareWellError::Parameters("W, α, β must be positive".into()));
    }
    match channel {
        Channel::B => {
            let (k, q, residual) = even_root(w, beta, alpha, false)?;
            Ok(ChannelRoot { k, q, energy: 0.5 * k * k, residual })
        }
        Channel::Od => {
            let (k, q, residual) = even_root(w, beta, alpha, true)?;
            Ok(ChannelRoot { k, q, energy: 0.5 * k * k, residual })
        }
        Channel::A { mu } => {
            if mu * mu >= w * w {
                return Err(SquareWellError::Parameters("need W² > μ²".into()));
            }
            let wh = (w * w - mu * mu).sqrt();
            let (k, q, residual) = even_root(wh, beta, alpha, false)?;
            Ok(ChannelRoot { k, q, energy: 0.5 * (mu * mu + k * k), residual })
        }
    }
}

/// Isolated-well limit: `-tβ cot tβ = qβ` with `t² + (qβ)² = (Wβ)²`; returns `(p∞, q∞)`.
pub fn isolated_well(w: f64, beta: f64) -> Result<(f64, f64), SquareWellError> {
    let db = w * beta;
    if db <= FRAC_PI_2 {
        return Err(SquareWellError::Regime(format!("Wβ = {db} is too small")));
    }
    let g = |t: f64| -t / t.tan() - (db * db - t * t).max(0.0).sqrt();
    let t = bisect(g, FRAC_PI_2, (PI - 1e-12).min(db));
    let p = t / beta;
    Ok((p, (w * w - p * p).max(0.0).sqrt()))
}

/// Exact `θ∞ = π - p∞β`.
pub fn theta_exact(w_beta: f64) -> Result<f64, SquareWellError> {
    let (p, _) = isolated_well(w_beta, 1.0)?;
    Ok(PI - p)
}

/// Large-barrier expansion of `θ∞` through `(Wβ)^{-3}`.
pub fn theta_asymptotic(w_beta: f64) -> f64 {
    let e = 1.0 / w_beta;
    PI * e * (1.0 - e + (1.0 + PI * PI / 6.0) * e * e)
}

/// Position of the interior minimum relative to the barrier edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaCase {
    /// `α > δ`: two maxima.
    Inside,
    /// `α = δ` within roundoff.
    Edge,
    /// `α < δ`: one maximum.
    Outside,
}

/// Asymptotic δ-μ² relation, meaningful only in its regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRelation {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `e^{-2q∞(α-δ)}` and `e^{-2q∞δ}` both below 0.1.
    pub in_regime: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareWellModel {
    pub w: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `k²`; negative when `E < μ²/2`.
    pub k_sq: f64,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
    pub k_a: f64,
    pub q_a: f64,
    pub p_b: f64,
    pub q_b: f64,
    pub p_od: f64,
    pub q_od: f64,
    pub p_inf: f64,
    pub q_inf: f64,
    pub e: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_od: f64,
    pub lambda: f64,
    pub delta_case: DeltaCase,
    /// Residuals of the right and left matching conditions.
    pub residuals: [f64; 2],
    pub delta_relation: DeltaRelation,
}

/// `atanh` that saturates to `±∞` outside `(-1, 1)`.
fn atanh_sat(x: f64) -> f64 {
    if x >= 1.0 {
        f64::INFINITY
    } else if x <= -1.0 {
        f64::NEG_INFINITY
    } else {
        x.atanh()
    }
}

/// `-k cot(kβ)` continued to `k² ≤ 0`.
fn log_slope_k(k_sq: f64, beta: f64) -> f64 {
    if k_sq > 0.0 {
        let k = k_sq.sqrt();
        -k / (k * beta).tan()
    } else if k_sq < 0.0 {
        let kap = (-k_sq).sqrt();
        -kap / (kap * beta).tanh()
    } else {
        -1.0 / beta
    }
}

/// `sin(ky)/k` continued to `k² ≤ 0`, and its derivative.
pub(crate) fn sk(k_sq: f64, y: f64) -> (f64, f64) {
    if k_sq > 0.0 {
        let k = k_sq.sqrt();
        ((k * y).sin() / k, (k * y).cos())
    } else if k_sq < 0.0 {
        let kap = (-k_sq).sqrt();
        ((kap * y).sinh() / kap, (kap * y).cosh())
    } else {
        (y, 1.0)
    }
}

impl SquareWellModel {
    pub fn potential(&self, x: f64) -> f64 {
        if x.abs() > self.gamma {
            f64::INFINITY
        } else if x > self.alpha {
            0.5 * self.mu * self.mu
        } else if x > -self.alpha {
            0.5 * self.w * self.w
        } else {
            0.0
        }
    }

    pub fn gap(&self) -> f64 {
        self.e_a - self.e_b
    }

    fn c_a(&self) -> f64 {
        (self.q_a * self.alpha).cosh() / (self.k_a * self.beta).sin()
    }

    fn c_b(&self) -> f64 {
        (self.q_b * self.alpha).cosh() / (self.p_b * self.beta).sin()
    }

    fn check(&self, x: f64) -> Result<(), SquareWellError> {
        if x.abs() > self.gamma {
            Err(SquareWellError::Domain(x))
        } else {
            Ok(())
        }
    }

    /// Trial function and derivative, `χ(0) = 1`, `χ'(γ) = -k_a C_a`.
    pub fn chi(&self, x: f64) -> Result<(f64, f64), SquareWellError> {
        self.check(x)?;
        let (ga, al) = (self.gamma, self.alpha);
        Ok(if x >= al {
            let c = self.c_a();
            let t = self.k_a * (ga - x);
            (c * t.sin(), -c * self.k_a * t.cos())
        } else if x >= 0.0 {
            let t = self.q_a * x;
            (t.cosh(), self.q_a * t.sinh())
        } else if x >= -al {
            let t = self.q_b * x;
            (t.cosh(), self.q_b * t.sinh())
        } else {
            let c = self.c_b();
            let t = self.p_b * (x + ga);
            (c * t.sin(), c * self.p_b * t.cos())
        })
    }

    /// Ground state with `ψ'(γ) = χ'(γ)`.
    pub fn psi(&self, x: f64) -> Result<(f64, f64), SquareWellError> {
        self.check(x)?;
        let (ga, al, be) = (self.gamma, self.alpha, self.beta);
        let amp = self.k_a * self.c_a();
        let (s_beta, _) = sk(self.k_sq, be);
        let mid = s_beta / (self.q * (al - self.delta)).cosh();
        Ok(if x >= al {
            let (s, c) = sk(self.k_sq, ga - x);
            (amp * s, -amp * c)
        } else if x >= -al {
            let t = self.q * (x - self.delta);
            (amp * mid * t.cosh(), amp * mid * self.q * t.sinh())
        } else {
            let left = mid * (self.q * (al + self.delta)).cosh() / (self.p * be).sin();
            let t = self.p * (x + ga);
            (amp * left * t.sin(), amp * left * self.p * t.cos())
        })
    }

    /// Irregular solution with `χ̄'χ - χ'χ̄ = 1`.
    pub fn chi_bar(&self, x: f64) -> Result<(f64, f64), SquareWellError> {
        self.check(x)?;
        let (ga, al, be) = (self.gamma, self.alpha, self.beta);
        let (ka, qa, pb, qb) = (self.k_a, self.q_a, self.p_b, self.q_b);
        Ok(if x >= al {
            let a = (qa * al).sinh() / (qa * (ka * be).sin()) - (ka * be).cos() / (ka * (qa * al).cosh());
            let s = (ka * be).sin() / (ka * (qa * al).cosh());
            let t = ka * (ga - x);
            (a * t.sin() + s * t.cos(), -ka * (a * t.cos() - s * t.sin()))
        } else if x >= 0.0 {
            ((qa * x).sinh() / qa, (qa * x).cosh())
        } else if x >= -al {
            ((qb * x).sinh() / qb, (qb * x).cosh())
        } else {
            let b = (qb * al).sinh() / (qb * (pb * be).sin()) - (pb * be).cos() / (pb * (qb * al).cosh());
            let s = (pb * be).sin() / (pb * (qb * al).cosh());
            let t = pb * (x + ga);
            (-b * t.sin() - s * t.cos(), pb * (-b * t.cos() + s * t.sin()))
        })
    }
}

/// Solve the asymmetric well for its ground state and all companion channels.
pub fn solve_asymmetric(w: f64, mu: f64, alpha: f64, beta: f64) -> Result<SquareWellModel, SquareWellError> {
    if !(mu >= 0.0 && mu * mu < w * w) {
        return Err(SquareWellError::Parameters("need 0 ≤ μ and W² > μ²".into()));
    }
    let b = solve_even_well(w, beta, alpha, Channel::B)?;
    let a = solve_even_well(w, beta, alpha, Channel::A { mu })?;
    let od = solve_even_well(w, beta, alpha, Channel::Od)?;
    let (p_inf, q_inf) = isolated_well(w, beta)?;
    let mu_sq = mu * mu;

    let parts = |e: f64| {
        let p = (2.0 * e).sqrt();
        let q = (w * w - 2.0 * e).sqrt();
        let k_sq = 2.0 * e - mu_sq;
        let xp = -p / (p * beta).tan() / q;
        let xk = log_slope_k(k_sq, beta) / q;
        (p, q, k_sq, xp, xk)
    };
    let (e, delta) = if mu == 0.0 {
        (b.energy, 0.0)
    } else {
        let e_hi = a.energy.min(0.5 * (PI / beta).powi(2) * (1.0 - 1e-15));
        let f = |e: f64| {
            let (_, q, _, xp, xk) = parts(e);
            atanh_sat(xk) + atanh_sat(xp) - 2.0 * q * alpha
        };
        if !(f(b.energy) < 0.0 && f(e_hi) > 0.0) {
            return Err(SquareWellError::Regime("no consistent root between E_b and E_a".into()));
        }
        let e = bisect(f, b.energy, e_hi);
        let (_, q, _, xp, xk) = parts(e);
        let delta = if xk.abs() <= xp.abs() { alpha - atanh_sat(xk) / q } else { atanh_sat(xp) / q - alpha };
        (e, delta)
    };
    let (p, q, k_sq, _, _) = parts(e);
    let right = log_slope_k(k_sq, beta) * beta - q * beta * (q * (alpha - delta)).tanh();
    let left = -p * beta / (p * beta).tan() - q * beta * (q * (alpha + delta)).tanh();
    let tie = 1e-9 * alpha;
    let delta_case = if (alpha - delta).abs() <= tie {
        DeltaCase::Edge
    } else if alpha > delta {
        DeltaCase::Inside
    } else {
        DeltaCase::Outside
    };

    let wh = (w * w - mu_sq).sqrt();
    let (k_inf, qh_inf) = isolated_well(wh, beta)?;
    let nu1 = (p_inf * q_inf / (w * w)) * 2.0 * q_inf * beta / (q_inf * beta + 1.0);
    let nu1h = (k_inf * qh_inf / (wh * wh)) * 2.0 * qh_inf * beta / (qh_inf * beta + 1.0);
    let lhs = mu_sq * beta * beta;
    let rhs = 2.0 * PI * (nu1h * (-2.0 * qh_inf * (alpha - delta)).exp() - nu1 * (-2.0 * q_inf * (alpha + delta)).exp());
    let delta_relation = DeltaRelation {
        lhs,
        rhs,
        ratio: rhs / lhs,
        in_regime: (-2.0 * q_inf * (alpha - delta)).exp() < 0.1 && (-2.0 * q_inf * delta).exp() < 0.1,
    };

    Ok(SquareWellModel {
        w,
        mu,
        alpha,
        beta,
        gamma: alpha + beta,
        k_sq,
        p,
        q,
        delta,
        k_a: a.k,
        q_a: a.q,
        p_b: b.k,
        q_b: b.q,
        p_od: od.k,
        q_od: od.q,
        p_inf,
        q_inf,
        e,
        e_a: a.energy,
        e_b: b.energy,
        e_od: od.energy,
        lambda: 0.5 * (od.energy - b.energy),
        delta_case,
        residuals: [right, left],
        delta_relation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_b_matches() {
        let r = solve_even_well(10.0, 1.0, 1.0, Channel::B).unwrap();
        assert!(r.residual.abs() < 1e-12);
        let th = theta_exact(10.0).unwrap();
        assert!(r.k > PI - th - 0.1 && r.k < PI);
        assert!((r.k * r.k + r.q * r.q - 100.0).abs() < 1e-10);
    }

    #[test]
    fn shallow_well_rejected() {
        assert!(matches!(solve_even_well(1.0, 1.0, 1.0, Channel::B), Err(SquareWellError::Regime(_))));
    }

    #[test]
    fn symmetric_limit() {
        let m = solve_asymmetric(10.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(m.delta, 0.0);
        assert_eq!(m.e, m.e_b);
        assert!((m.e_a - m.e_b).abs() < 1e-14);
    }
}
