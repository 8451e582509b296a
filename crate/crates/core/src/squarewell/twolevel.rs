/// Two-state caricature of the double well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelModel {
    pub e_inf: f64,
    pub lambda: f64,
    pub mu_sq: f64,
    pub e: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_od: f64,
    /// Ground state is `(sin ξ, cos ξ)`.
    pub xi_mix: f64,
}

pub fn two_level(e_inf: f64, lambda: f64, mu_sq: f64) -> TwoLevelModel {
    let h = 0.25 * mu_sq;
    TwoLevelModel {
        e_inf,
        lambda,
        mu_sq,
        e: e_inf + h - (lambda * lambda + h * h).sqrt(),
        e_a: e_inf + 0.5 * mu_sq - lambda,
        e_b: e_inf - lambda,
        e_od: e_inf + lambda,
        xi_mix: 0.5 * (4.0 * lambda).atan2(mu_sq),
    }
}

impl TwoLevelModel {
    /// Residual of `h ψ = E ψ` for the 2×2 Hamiltonian.
    pub fn eigen_residual(&self) -> f64 {
        let (s, c) = self.xi_mix.sin_cos();
        let r0 = (self.e_inf + 0.5 * self.mu_sq) * s - self.lambda * c - self.e * s;
        let r1 = -self.lambda * s + self.e_inf * c - self.e * c;
        r0.hypot(r1)
    }
}
