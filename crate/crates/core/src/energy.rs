//! Direct quadrature of the elastic potentials for arbitrary fields.
//!
//! These routines evaluate the densities pointwise from exact jets and are
//! independent of the Gram-matrix assembly used by the Ritz solver.

use crate::error::Result;
use crate::field::{DisplacementField, Quadrature3};
use crate::kinematics::scaled_strain;
use crate::material::{density_w, density_w_eps, density_w_tau, MaterialModuli};

/// Bulk and second-gradient parts of `𝒲^ε`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElasticParts {
    pub bulk: f64,
    pub penalty: f64,
}

impl ElasticParts {
    pub fn total(&self) -> f64 {
        self.bulk + self.penalty
    }
}

/// `∫ W^ε(E^ε u) dv` and `½ τ_R ((ε-ε_r)/ε)² ∫ Σ (u_{3,αβ} + u_{α,3β})² dv`.
pub fn elastic_energy_eps(
    u: &dyn DisplacementField,
    eps: f64,
    eps_r: f64,
    m: &MaterialModuli,
    rule: &Quadrature3,
) -> Result<ElasticParts> {
    let r = (eps - eps_r) / eps;
    let pc = 0.5 * m.tau_r * r * r;
    let mut out = ElasticParts::default();
    for (&x, &w) in rule.points.iter().zip(&rule.weights) {
        let j = u.jet(x);
        out.bulk += w * density_w_eps(&scaled_strain(&j.grad, eps), eps, eps_r, m);
        if pc != 0.0 {
            out.penalty += w * pc * j.penalty_terms()?.iter().map(|t| t * t).sum::<f64>();
        }
    }
    Ok(out)
}

/// `∫ W(E u) dv`, the unscaled elastic energy.
pub fn elastic_energy(u: &dyn DisplacementField, m: &MaterialModuli, rule: &Quadrature3) -> f64 {
    rule.integrate(|x| density_w(&u.jet(x).strain(), m))
}

/// `∫ W_τ((Eu)_{13}, (Eu)_{23}, (Eu)_{33}) dv`, the limit elastic energy.
pub fn limit_elastic_energy(
    u: &dyn DisplacementField,
    eps_r: f64,
    m: &MaterialModuli,
    rule: &Quadrature3,
) -> f64 {
    rule.integrate(|x| {
        let e = u.jet(x).strain();
        density_w_tau(e.e13, e.e23, e.e33, eps_r, m)
    })
}
