//! Transversely isotropic moduli and the family of elastic-energy densities.
//!
//! The beam axis is `e3`. Four densities are provided:
//!
//! * [`density_w`], the physical density of the real body;
//! * [`density_w_eps`], the parameterized density whose shear modulus is
//!   weighted by `(eps / eps_r)^2` (it coincides with `density_w` at
//!   `eps = eps_r`);
//! * [`density_w_tau_eps`], the density obtained by minimizing
//!   `density_w_eps` over the in-plane strain components;
//! * [`density_w_tau`], the relaxed density at `eps = 1`, which is the
//!   integrand of the one-dimensional limit energy.

use nalgebra::{Matrix6, SymmetricEigen};

use crate::error::{Error, Result};

/// Elastic constants of a material that is transversely isotropic about `e3`,
/// plus the coefficient `tau_r` of the second-gradient penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModuli {
    pub mu: f64,
    pub lambda: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: f64,
    pub tau_r: f64,
}

/// One violated material inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuliViolation {
    MuNotPositive,
    GammaNotPositive,
    Tau1NotPositive,
    CouplingNotPositive,
    TauRNotPositive,
}

impl ModuliViolation {
    pub fn describe(self) -> &'static str {
        match self {
            ModuliViolation::MuNotPositive => "mu > 0",
            ModuliViolation::GammaNotPositive => "gamma > 0",
            ModuliViolation::Tau1NotPositive => "tau1 > 0",
            ModuliViolation::CouplingNotPositive => "tau1*(lambda+mu) - tau2^2 > 0",
            ModuliViolation::TauRNotPositive => "tau_R > 0",
        }
    }
}

impl std::fmt::Display for ModuliViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "violated: {}", self.describe())
    }
}

impl MaterialModuli {
    pub fn new(mu: f64, lambda: f64, tau1: f64, tau2: f64, gamma: f64, tau_r: f64) -> Self {
        MaterialModuli {
            mu,
            lambda,
            tau1,
            tau2,
            gamma,
            tau_r,
        }
    }

    /// `tau1 (lambda + mu) - tau2^2`.
    pub fn coupling_margin(&self) -> f64 {
        self.tau1 * (self.lambda + self.mu) - self.tau2 * self.tau2
    }

    /// Axial modulus of the relaxed density, `tau1 - tau2^2 / (lambda + mu)`.
    pub fn axial_modulus(&self) -> f64 {
        self.tau1 - self.tau2 * self.tau2 / (self.lambda + self.mu)
    }

    /// In-plane contraction coefficient `eta = tau2 / (2 (mu + lambda))`.
    pub fn eta(&self) -> f64 {
        self.tau2 / (2.0 * (self.mu + self.lambda))
    }

    /// Multiply every stiffness by `t` (the penalty coefficient included).
    pub fn scaled(&self, t: f64) -> Self {
        MaterialModuli {
            mu: t * self.mu,
            lambda: t * self.lambda,
            tau1: t * self.tau1,
            tau2: t * self.tau2,
            gamma: t * self.gamma,
            tau_r: t * self.tau_r,
        }
    }
}

/// Checks the strict material inequalities; an empty list means valid.
pub fn validate_moduli(m: &MaterialModuli) -> Vec<ModuliViolation> {
    let mut out = Vec::new();
    if !(m.mu > 0.0) {
        out.push(ModuliViolation::MuNotPositive);
    }
    if !(m.gamma > 0.0) {
        out.push(ModuliViolation::GammaNotPositive);
    }
    if !(m.tau1 > 0.0) {
        out.push(ModuliViolation::Tau1NotPositive);
    }
    if !(m.coupling_margin() > 0.0) {
        out.push(ModuliViolation::CouplingNotPositive);
    }
    if !(m.tau_r > 0.0) {
        out.push(ModuliViolation::TauRNotPositive);
    }
    out
}

/// Like [`validate_moduli`] but as a `Result`.
pub fn check_moduli(m: &MaterialModuli) -> Result<()> {
    let v = validate_moduli(m);
    if v.is_empty() {
        Ok(())
    } else {
        let names: Vec<_> = v.iter().map(|v| v.describe()).collect();
        Err(Error::InvalidModuli(format!("violated {}", names.join(", "))))
    }
}

/// Isotropic material: `gamma = mu`, `tau1 = lambda + 2 mu`, `tau2 = lambda`.
pub fn isotropic_moduli(lambda: f64, mu: f64, tau_r: f64) -> Result<MaterialModuli> {
    if !(mu > 0.0) || !(lambda + mu > 0.0) {
        return Err(Error::InvalidModuli(format!(
            "isotropic moduli need mu > 0 and lambda + mu > 0 (lambda = {lambda}, mu = {mu})"
        )));
    }
    let m = MaterialModuli::new(mu, lambda, lambda + 2.0 * mu, lambda, mu, tau_r);
    check_moduli(&m)?;
    Ok(m)
}

/// Young modulus `mu (3 lambda + 2 mu) / (lambda + mu)` of an isotropic material.
pub fn young_modulus(lambda: f64, mu: f64) -> f64 {
    mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu)
}

/// Symmetric 3x3 strain, off-diagonal entries stored once.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymStrain {
    pub e11: f64,
    pub e22: f64,
    pub e33: f64,
    pub e12: f64,
    pub e13: f64,
    pub e23: f64,
}

impl SymStrain {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Symmetric part of a displacement gradient `g[i][j] = u_{i,j}`.
    pub fn from_gradient(g: &[[f64; 3]; 3]) -> Self {
        SymStrain {
            e11: g[0][0],
            e22: g[1][1],
            e33: g[2][2],
            e12: 0.5 * (g[0][1] + g[1][0]),
            e13: 0.5 * (g[0][2] + g[2][0]),
            e23: 0.5 * (g[1][2] + g[2][1]),
        }
    }

    /// Frobenius norm squared; off-diagonals counted twice.
    pub fn norm_sq(&self) -> f64 {
        self.e11 * self.e11
            + self.e22 * self.e22
            + self.e33 * self.e33
            + 2.0 * (self.e12 * self.e12 + self.e13 * self.e13 + self.e23 * self.e23)
    }

    pub fn scale(&self, t: f64) -> Self {
        SymStrain {
            e11: t * self.e11,
            e22: t * self.e22,
            e33: t * self.e33,
            e12: t * self.e12,
            e13: t * self.e13,
            e23: t * self.e23,
        }
    }

    /// Component `(i, j)` with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.e11,
            (1, 1) => self.e22,
            (2, 2) => self.e33,
            (0, 1) => self.e12,
            (0, 2) => self.e13,
            (1, 2) => self.e23,
            _ => panic!("strain index out of range"),
        }
    }

    /// Orthonormal Voigt vector `(e11, e22, e33, √2 e23, √2 e13, √2 e12)`.
    pub fn voigt(&self) -> [f64; 6] {
        let r = std::f64::consts::SQRT_2;
        [
            self.e11,
            self.e22,
            self.e33,
            r * self.e23,
            r * self.e13,
            r * self.e12,
        ]
    }
}

/// Physical strain-energy density.
pub fn density_w(e: &SymStrain, m: &MaterialModuli) -> f64 {
    let tr = e.e11 + e.e22;
    0.5 * (2.0 * m.mu * (e.e11 * e.e11 + e.e22 * e.e22)
        + m.lambda * tr * tr
        + 2.0 * m.tau2 * e.e33 * tr
        + 4.0 * m.mu * e.e12 * e.e12
        + 4.0 * m.gamma * (e.e13 * e.e13 + e.e23 * e.e23)
        + m.tau1 * e.e33 * e.e33)
}

/// Parameterized density: the transverse shear modulus is weighted by
/// `(eps / eps_r)^2`. At `eps == eps_r` the weight is exactly one and the
/// result is bitwise equal to [`density_w`].
pub fn density_w_eps(e: &SymStrain, eps: f64, eps_r: f64, m: &MaterialModuli) -> f64 {
    let ratio = eps / eps_r;
    let shear = ratio * ratio * m.gamma;
    let tr = e.e11 + e.e22;
    0.5 * (2.0 * m.mu * (e.e11 * e.e11 + e.e22 * e.e22)
        + m.lambda * tr * tr
        + 2.0 * m.tau2 * e.e33 * tr
        + 4.0 * m.mu * e.e12 * e.e12
        + 4.0 * shear * (e.e13 * e.e13 + e.e23 * e.e23)
        + m.tau1 * e.e33 * e.e33)
}

/// Relaxed density of the limit problem,
/// `½[4 gamma eps_r^-2 (E13² + E23²) + (tau1 - tau2²/(lambda+mu)) E33²]`.
pub fn density_w_tau(e13: f64, e23: f64, e33: f64, eps_r: f64, m: &MaterialModuli) -> f64 {
    0.5 * (4.0 * m.gamma / (eps_r * eps_r) * (e13 * e13 + e23 * e23)
        + m.axial_modulus() * e33 * e33)
}

/// Relaxed parameterized density (in-plane strains minimized out).
pub fn density_w_tau_eps(
    e13: f64,
    e23: f64,
    e33: f64,
    eps: f64,
    eps_r: f64,
    m: &MaterialModuli,
) -> f64 {
    let ratio = eps / eps_r;
    0.5 * (4.0 * m.gamma * ratio * ratio * (e13 * e13 + e23 * e23)
        + m.axial_modulus() * e33 * e33)
}

/// Minimizer of `density_w_eps` over the in-plane components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InPlaneRelaxation {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub value: f64,
}

/// Closed-form minimization over `(g11, g12, g22)`: `g12 = 0` and
/// `g11 = g22 = -eta E33`.
pub fn relax_over_inplane(
    e13: f64,
    e23: f64,
    e33: f64,
    eps: f64,
    eps_r: f64,
    m: &MaterialModuli,
) -> InPlaneRelaxation {
    let g = -m.eta() * e33;
    let strain = SymStrain {
        e11: g,
        e22: g,
        e33,
        e12: 0.0,
        e13,
        e23,
    };
    InPlaneRelaxation {
        g11: g,
        g12: 0.0,
        g22: g,
        value: density_w_eps(&strain, eps, eps_r, m),
    }
}

/// Matrix `Q` with `density_w(E) = vᵀ Q v` for the orthonormal Voigt vector `v`.
pub fn voigt_form(m: &MaterialModuli) -> Matrix6<f64> {
    let mut q = Matrix6::zeros();
    q[(0, 0)] = 0.5 * (2.0 * m.mu + m.lambda);
    q[(1, 1)] = 0.5 * (2.0 * m.mu + m.lambda);
    q[(0, 1)] = 0.5 * m.lambda;
    q[(1, 0)] = 0.5 * m.lambda;
    q[(0, 2)] = 0.5 * m.tau2;
    q[(2, 0)] = 0.5 * m.tau2;
    q[(1, 2)] = 0.5 * m.tau2;
    q[(2, 1)] = 0.5 * m.tau2;
    q[(2, 2)] = 0.5 * m.tau1;
    q[(3, 3)] = m.gamma;
    q[(4, 4)] = m.gamma;
    q[(5, 5)] = m.mu;
    q
}

/// Largest `C` with `density_w(E) >= C |E|^2` for every symmetric `E`.
pub fn coercivity_constant(m: &MaterialModuli) -> Result<f64> {
    check_moduli(m)?;
    let eig = SymmetricEigen::new(voigt_form(m));
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}
