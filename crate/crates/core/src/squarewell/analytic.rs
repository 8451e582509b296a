use std::sync::Arc;

use super::{SquareWellError, SquareWellModel};
use crate::grid::{make_grid, panel_integrals, Domain, Grid, SampleKind, Samples};
use crate::hierarchy::{iterate_anchored, Anchor, IterOptions, IterationTrace};
use crate::trialgen::{DomainKind, Monotone, TrialFunction};

/// Grid on `[-γ, γ]` with nodes at `-α`, `0`, `α`.
pub fn square_well_grid(m: &SquareWellModel, density: f64) -> Result<Arc<Grid>, SquareWellError> {
    let g = make_grid(Domain::FullLine { x_min: -m.gamma, x_max: m.gamma }, density, &[-m.alpha, 0.0, m.alpha])?;
    Ok(Arc::new(g))
}

/// Integrals over `x > 0` and `x < 0` of a continuous function.
fn split_integrals(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<(f64, f64), SquareWellError> {
    let s = Samples::from_fn(grid, f);
    let panels = panel_integrals(&s)?;
    let x = grid.nodes();
    let (mut pos, mut neg) = (0.0, 0.0);
    for (p, v) in panels.iter().enumerate() {
        if x[p] >= 0.0 {
            pos += v;
        } else {
            neg += v;
        }
    }
    Ok((pos, neg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactShift {
    /// `N/(M+N)·(E_a - E_b)`.
    pub e_hat: f64,
    pub m: f64,
    pub n: f64,
    /// `E_a - E` from the root finder.
    pub reference: f64,
    /// `|½(k²-k_a²)M + ½(p²-p_b²)N|` relative to its first term.
    pub wronskian_residual: f64,
}

pub fn exact_shift(m: &SquareWellModel, grid: &Arc<Grid>) -> Result<ExactShift, SquareWellError> {
    if grid.index_of(0.0).is_none() {
        return Err(SquareWellError::Parameters("grid needs a node at 0".into()));
    }
    let (mi, ni) = split_integrals(grid, |x| {
        let c = m.chi(x).map(|v| v.0).unwrap_or(0.0);
        let p = m.psi(x).map(|v| v.0).unwrap_or(0.0);
        c * p
    })?;
    if !(mi + ni > 0.0) {
        return Err(SquareWellError::Integration(mi + ni));
    }
    let t1 = 0.5 * (m.k_sq - m.k_a * m.k_a) * mi;
    let t2 = 0.5 * (m.p * m.p - m.p_b * m.p_b) * ni;
    let wronskian_residual = if t1 != 0.0 { (t1 + t2).abs() / t1.abs() } else { (t1 + t2).abs() };
    Ok(ExactShift {
        e_hat: ni / (mi + ni) * m.gap(),
        m: mi,
        n: ni,
        reference: m.e_a - m.e,
        wronskian_residual,
    })
}

/// `(x|G|z)`: zero for `x ≥ z`.
pub fn greens_function(m: &SquareWellModel, x: f64, z: f64) -> Result<f64, SquareWellError> {
    for v in [x, z] {
        if v.abs() >= m.gamma {
            return Err(SquareWellError::Domain(v));
        }
    }
    if x >= z {
        return Ok(0.0);
    }
    let (cx, _) = m.chi(x)?;
    let (cz, _) = m.chi(z)?;
    let (bx, _) = m.chi_bar(x)?;
    let (bz, _) = m.chi_bar(z)?;
    Ok(-2.0 * (cx * bz - bx * cz))
}

/// `χ̄'χ - χ'χ̄` at `x`.
pub fn wronskian(m: &SquareWellModel, x: f64) -> Result<f64, SquareWellError> {
    let (c, dc) = m.chi(x)?;
    let (b, db) = m.chi_bar(x)?;
    Ok(db * c - dc * b)
}

/// Trial function `χ` with the step perturbation on the lower-energy side.
pub fn square_well_trial(m: &SquareWellModel, grid: &Arc<Grid>) -> Result<TrialFunction, SquareWellError> {
    let log_chi: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| m.chi(x).map(|(c, _)| if c > 0.0 { c.ln() } else { f64::NEG_INFINITY }))
        .collect::<Result<_, _>>()?;
    let gap = m.gap();
    let w = Samples::from_fn_sided(grid, SampleKind::Plain, |x, side| if side.below(x, 0.0) { gap } else { 0.0 });
    Ok(TrialFunction {
        grid: grid.clone(),
        log_phi: Samples::new(grid.clone(), log_chi, SampleKind::LogAmplitude),
        w,
        e0: m.e_a,
        v: Samples::from_fn(grid, |x| m.potential(x)),
        domain_kind: DomainKind::FullLine,
        w_monotone_dir: Monotone::DecreasingOnFullLine,
        reflected: false,
    })
}

/// First-step integrals `M₀ = ∫₀^γ χ²`, `N₀ = ∫_{-γ}^0 χ²` in closed form.
pub fn first_step_closed_form(m: &SquareWellModel) -> (f64, f64, f64) {
    let (al, be) = (m.alpha, m.beta);
    let side = |k: f64, q: f64| {
        let amp = (q * al).cosh() / (k * be).sin();
        0.5 * (al + (2.0 * q * al).sinh() / (2.0 * q) + amp * amp * (be - (2.0 * k * be).sin() / (2.0 * k)))
    };
    let m0 = side(m.k_a, m.q_a);
    let n0 = side(m.p_b, m.q_b);
    (m0, n0, m.e_b + m0 / (m0 + n0) * m.gap())
}

#[derive(Debug, Clone)]
pub struct SquareWellRun {
    pub trace: IterationTrace,
    pub m0_quad: f64,
    pub n0_quad: f64,
    pub m0_closed: f64,
    pub n0_closed: f64,
    pub e1_closed: f64,
}

pub fn iterate_squarewell(
    m: &SquareWellModel,
    grid: &Arc<Grid>,
    opts: IterOptions,
) -> Result<SquareWellRun, SquareWellError> {
    let trial = square_well_trial(m, grid)?;
    let (m0_quad, n0_quad) = split_integrals(grid, |x| m.chi(x).map(|v| v.0 * v.0).unwrap_or(0.0))?;
    let (m0_closed, n0_closed, e1_closed) = first_step_closed_form(m);
    let trace = iterate_anchored(&trial.log_phi, &trial.w, trial.e0, Anchor::Right, opts)?;
    Ok(SquareWellRun { trace, m0_quad, n0_quad, m0_closed, n0_closed, e1_closed })
}

/// First iterate `ψ₁ = χ f₁` assembled region by region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSolution {
    pub e1: f64,
    /// `ε₁` in regions I, II, III, IV.
    pub eps: [f64; 4],
    pub kappa_ii: f64,
    pub rho_ii: f64,
    pub kappa_iii: f64,
    pub rho_iii: f64,
    pub kappa_iv: f64,
    gamma: f64,
    alpha: f64,
    k_a: f64,
    q_a: f64,
    q_b: f64,
    p_b: f64,
    c_a: f64,
    c_b: f64,
}

struct Pieces {
    eps: [f64; 4],
    kii: f64,
    rii: f64,
    kiii: f64,
    riii: f64,
}

impl RegionSolution {
    fn build(m: &SquareWellModel, shift: f64) -> Pieces {
        let (ka, qa, qb, pb) = (m.k_a, m.q_a, m.q_b, m.p_b);
        let gap = m.gap();
        let eps = [
            2.0 * shift / (ka * ka),
            2.0 * shift / (qa * qa),
            2.0 * (shift - gap) / (qb * qb),
            2.0 * (shift - gap) / (pb * pb),
        ];
        let c_a = (qa * m.alpha).cosh() / (ka * m.beta).sin();
        let xi = ka * m.beta;
        let e1 = eps[0];
        let psi = c_a * ((1.0 + 0.5 * e1) * xi.sin() - 0.5 * e1 * xi * xi.cos());
        let dpsi = -ka * c_a * (xi.cos() + 0.5 * e1 * xi * xi.sin());
        let e2 = eps[1];
        let z = qa * m.alpha;
        let (sh, ch) = (z.sinh(), z.cosh());
        // [sh ch; ch sh] [κ; ρ] = rhs, determinant -1
        let r1 = psi - 0.5 * e2 * z * sh;
        let r2 = dpsi / qa - 0.5 * e2 * (sh + z * ch);
        let kii = -(sh * r1 - ch * r2);
        let rii = -(sh * r2 - ch * r1);
        Pieces { eps, kii, rii, kiii: -qa * kii / qb, riii: rii }
    }

    fn mismatch(m: &SquareWellModel, kappa_iv: f64, shift: f64) -> [f64; 2] {
        let pc = Self::build(m, shift);
        let (qb, pb) = (m.q_b, m.p_b);
        let z = qb * m.alpha;
        let e3 = pc.eps[2];
        let u = pc.kiii + 0.5 * e3 * z;
        let psi3 = u * z.sinh() + pc.riii * z.cosh();
        let dpsi3 = -qb * (0.5 * e3 * z.sinh() + u * z.cosh() + pc.riii * z.sinh());
        let c_b = (qb * m.alpha).cosh() / (pb * m.beta).sin();
        let xi = pb * m.beta;
        let e4 = pc.eps[3];
        let psi4 = c_b * ((kappa_iv + 0.5 * e4) * xi.sin() - 0.5 * e4 * xi * xi.cos());
        let dpsi4 = pb * c_b * (kappa_iv * xi.cos() + 0.5 * e4 * xi * xi.sin());
        [psi3 - psi4, (dpsi3 - dpsi4) / pb]
    }

    /// `(ψ₁, ψ₁')` at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), SquareWellError> {
        if x.abs() > self.gamma {
            return Err(SquareWellError::Domain(x));
        }
        Ok(if x >= self.alpha {
            let xi = self.k_a * (self.gamma - x);
            let e = self.eps[0];
            let v = self.c_a * ((1.0 + 0.5 * e) * xi.sin() - 0.5 * e * xi * xi.cos());
            let dv = self.c_a * (xi.cos() + 0.5 * e * xi * xi.sin());
            (v, -self.k_a * dv)
        } else if x >= 0.0 {
            let (v, dv) = hyperbolic(self.kappa_ii, self.rho_ii, self.eps[1], self.q_a * x);
            (v, self.q_a * dv)
        } else if x >= -self.alpha {
            let (v, dv) = hyperbolic(self.kappa_iii, self.rho_iii, self.eps[2], -self.q_b * x);
            (v, -self.q_b * dv)
        } else {
            let xi = self.p_b * (x + self.gamma);
            let e = self.eps[3];
            let v = self.c_b * ((self.kappa_iv + 0.5 * e) * xi.sin() - 0.5 * e * xi * xi.cos());
            let dv = self.c_b * (self.kappa_iv * xi.cos() + 0.5 * e * xi * xi.sin());
            (v, self.p_b * dv)
        })
    }
}

fn hyperbolic(kappa: f64, rho: f64, eps: f64, xi: f64) -> (f64, f64) {
    let u = kappa + 0.5 * eps * xi;
    (u * xi.sinh() + rho * xi.cosh(), 0.5 * eps * xi.sinh() + u * xi.cosh() + rho * xi.sinh())
}

/// Solve the matching conditions for the first iterate; `E₁` comes out of the last pair.
pub fn region_solution_n1(m: &SquareWellModel) -> Result<RegionSolution, SquareWellError> {
    let r00 = RegionSolution::mismatch(m, 0.0, 0.0);
    let r10 = RegionSolution::mismatch(m, 1.0, 0.0);
    let r01 = RegionSolution::mismatch(m, 0.0, 1.0);
    let j = [[r10[0] - r00[0], r01[0] - r00[0]], [r10[1] - r00[1], r01[1] - r00[1]]];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det.abs() > 1e-14 * ((j[0][0] * j[1][1]).abs() + (j[0][1] * j[1][0]).abs())) {
        return Err(SquareWellError::Degenerate);
    }
    let kappa_iv = -(j[1][1] * r00[0] - j[0][1] * r00[1]) / det;
    let shift = -(-j[1][0] * r00[0] + j[0][0] * r00[1]) / det;
    let pc = RegionSolution::build(m, shift);
    Ok(RegionSolution {
        e1: m.e_a - shift,
        eps: pc.eps,
        kappa_ii: pc.kii,
        rho_ii: pc.rii,
        kappa_iii: pc.kiii,
        rho_iii: pc.riii,
        kappa_iv,
        gamma: m.gamma,
        alpha: m.alpha,
        k_a: m.k_a,
        q_a: m.q_a,
        q_b: m.q_b,
        p_b: m.p_b,
        c_a: (m.q_a * m.alpha).cosh() / (m.k_a * m.beta).sin(),
        c_b: (m.q_b * m.alpha).cosh() / (m.p_b * m.beta).sin(),
    })
}
