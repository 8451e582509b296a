//! Reference ground states from a three-point finite-difference Hamiltonian.
//!
//! Self-contained: it uses its own uniform mesh and none of the engine's
//! quadrature, so agreement between the two is a real cross-check.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("mesh needs x_min < x_max and at least 4 intervals")]
    BadMesh,
    #[error("potential is not finite at x = {0}")]
    NonFinite(f64),
    #[error("inverse iteration stalled: residual {residual:e} after {iters} sweeps")]
    NoConvergence { residual: f64, iters: usize },
}

/// Uniform mesh with Dirichlet walls at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub x_min: f64,
    pub x_max: f64,
    pub intervals: usize,
}

impl Mesh {
    /// `density` intervals per unit length, rounded up.
    pub fn with_density(x_min: f64, x_max: f64, density: f64) -> Mesh {
        let intervals = ((x_max - x_min) * density - 1e-9).ceil().max(4.0) as usize;
        Mesh { x_min, x_max, intervals }
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.intervals as f64
    }

    pub fn refined(&self, k: usize) -> Mesh {
        Mesh { intervals: self.intervals * k, ..*self }
    }

    /// Interior nodes.
    pub fn interior(&self) -> Vec<f64> {
        let h = self.h();
        (1..self.intervals).map(|i| self.x_min + i as f64 * h).collect()
    }
}

struct Tridiag {
    diag: Vec<f64>,
    off: f64,
}

fn assemble(v: &dyn Fn(f64) -> f64, mesh: &Mesh) -> Result<Tridiag, OracleError> {
    if !(mesh.x_min < mesh.x_max) || mesh.intervals < 4 {
        return Err(OracleError::BadMesh);
    }
    let h = mesh.h();
    let mid: Vec<f64> = (0..mesh.intervals)
        .map(|p| {
            let x = mesh.x_min + (p as f64 + 0.5) * h;
            let val = v(x);
            if val.is_finite() {
                Ok(val)
            } else {
                Err(OracleError::NonFinite(x))
            }
        })
        .collect::<Result<_, _>>()?;
    let kin = 1.0 / (h * h);
    let diag = (1..mesh.intervals).map(|i| kin + 0.5 * (mid[i - 1] + mid[i])).collect();
    Ok(Tridiag { diag, off: -0.5 * kin })
}

impl Tridiag {
    /// Number of eigenvalues below `lam`.
    fn sturm(&self, lam: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - lam } else { d - lam - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + lam.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn eigenvalue(&self, k: usize) -> f64 {
        let r = 2.0 * self.off.abs();
        let mut lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let mut hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            if self.sturm(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Solve `(T - sigma) y = b` by the Thomas algorithm.
    fn solve(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut m = self.diag[0] - sigma;
        c[0] = self.off / m;
        y[0] = b[0] / m;
        for i in 1..n {
            m = self.diag[i] - sigma - self.off * c[i - 1];
            c[i] = self.off / m;
            y[i] = (b[i] - self.off * y[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off * x[i + 1];
                }
                s
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub h: [f64; 3],
    pub energies: [f64; 3],
    /// `(4 E(h/2) - E(h)) / 3`.
    pub richardson: f64,
    /// Observed convergence order from the three resolutions.
    pub order: f64,
    /// `|richardson - E(h/2)|`, a conservative error estimate.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Eigenvalue on the base mesh.
    pub e_ground: f64,
    pub e_first: f64,
    pub mesh: Mesh,
    /// Interior nodes and the normalized, positive ground state there.
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub refinement: Refinement,
}

impl OracleResult {
    pub fn best(&self) -> f64 {
        self.refinement.richardson
    }
}

/// Lowest `count` eigenvalues of the discretized Hamiltonian.
pub fn fd_eigenvalues(v: &dyn Fn(f64) -> f64, mesh: &Mesh, count: usize) -> Result<Vec<f64>, OracleError> {
    let t = assemble(v, mesh)?;
    Ok((0..count).map(|k| t.eigenvalue(k)).collect())
}

fn ground_vector(t: &Tridiag, e0: f64, e1: f64, h: f64) -> Result<Vec<f64>, OracleError> {
    let n = t.diag.len();
    let sigma = e0 - 1e-6 * (e1 - e0);
    let mut x = vec![1.0; n];
    let mut residual = f64::INFINITY;
    for iters in 1..=50 {
        let mut y = t.solve(sigma, &x);
        let norm = (h * y.iter().map(|v| v * v).sum::<f64>()).sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let ty = t.apply(&y);
        residual = (h * ty.iter().zip(&y).map(|(a, b)| (a - e0 * b).powi(2)).sum::<f64>()).sqrt();
        x = y;
        if residual < 1e-9 * e0.abs().max(1.0) && iters >= 2 {
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            return Ok(x);
        }
    }
    Err(OracleError::NoConvergence { residual, iters: 50 })
}

/// Ground state on `mesh`, with energies also at h/2 and h/4.
pub fn fd_ground_state(v: &dyn Fn(f64) -> f64, mesh: &Mesh) -> Result<OracleResult, OracleError> {
    let t = assemble(v, mesh)?;
    let e0 = t.eigenvalue(0);
    let e1 = t.eigenvalue(1);
    let psi = ground_vector(&t, e0, e1, mesh.h())?;
    let m2 = mesh.refined(2);
    let m4 = mesh.refined(4);
    let e2 = fd_eigenvalues(v, &m2, 1)?[0];
    let e4 = fd_eigenvalues(v, &m4, 1)?[0];
    let richardson = (4.0 * e2 - e0) / 3.0;
    let order = ((e0 - e2) / (e2 - e4)).abs().log2();
    let refinement = Refinement {
        h: [mesh.h(), m2.h(), m4.h()],
        energies: [e0, e2, e4],
        richardson,
        order,
        error_estimate: (richardson - e2).abs(),
    };
    Ok(OracleResult { e_ground: e0, e_first: e1, mesh: *mesh, x: mesh.interior(), psi, refinement })
}
