use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::energy::elastic_energy;
use crate::error::{Error, Result};
use crate::field::{BeamDomain, DisplacementField, Jet, Point};
use crate::kinematics::{scaled_strain, unscale_displacement, TimoshenkoField};
use crate::linalg::Cholesky;
use crate::loads::{load_potential_3d, scale_real_loads, LoadSpec};
use crate::material::{MaterialModuli, SymStrain};

use super::assemble::{load_vector, EnergyOperator, NormGrams};
use super::basis::{InPlaneMode, RitzBasis3D};

/// Ritz coefficients on a shared basis. Index `mode * n_axial + k`.
#[derive(Debug, Clone)]
pub struct DisplacementField3D {
    pub basis: Arc<RitzBasis3D>,
    pub coeffs: DVector<f64>,
}

impl DisplacementField3D {
    pub fn new(basis: Arc<RitzBasis3D>, coeffs: DVector<f64>) -> Self {
        assert_eq!(basis.dim(), coeffs.len(), "coefficient count must match the basis");
        DisplacementField3D { basis, coeffs }
    }

    pub fn zero(basis: Arc<RitzBasis3D>) -> Self {
        let n = basis.dim();
        DisplacementField3D::new(basis, DVector::zeros(n))
    }

    pub fn scale(&self, s: f64) -> Self {
        DisplacementField3D::new(self.basis.clone(), &self.coeffs * s)
    }
}

impl DisplacementField for DisplacementField3D {
    fn jet(&self, x: Point) -> Jet {
        let b = &self.basis;
        let np = b.n_axial();
        let ax = b.axial.eval(x[2]);
        let jets = b.mode_jets(x[0], x[1]);
        let mut out = Jet::default();
        let mut h = [[[0.0; 3]; 3]; 3];
        for (i, mj) in jets.iter().enumerate() {
            let c = &self.coeffs.as_slice()[i * np..(i + 1) * np];
            let mut a = [0.0; 3];
            for (ck, v) in c.iter().zip(&ax) {
                a[0] += ck * v[0];
                a[1] += ck * v[1];
                a[2] += ck * v[2];
            }
            if a == [0.0; 3] {
                continue;
            }
            for comp in 0..3 {
                let (v, d, dd) = (mj.v[comp], mj.d[comp], mj.dd[comp]);
                if v == 0.0 && d == [0.0; 2] && dd == [0.0; 3] {
                    continue;
                }
                out.value[comp] += v * a[0];
                out.grad[comp][0] += d[0] * a[0];
                out.grad[comp][1] += d[1] * a[0];
                out.grad[comp][2] += v * a[1];
                let hc = &mut h[comp];
                hc[0][0] += dd[0] * a[0];
                hc[0][1] += dd[1] * a[0];
                hc[1][1] += dd[2] * a[0];
                hc[0][2] += d[0] * a[1];
                hc[1][2] += d[1] * a[1];
                hc[2][2] += v * a[2];
            }
        }
        for hc in h.iter_mut() {
            hc[1][0] = hc[0][1];
            hc[2][0] = hc[0][2];
            hc[2][1] = hc[1][2];
        }
        out.hess = Some(h);
        out
    }
}

/// Pointwise quantities of a Ritz field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub displacement: [f64; 3],
    pub strain: SymStrain,
    pub scaled_strain: SymStrain,
    /// `u_{3,αβ} + u_{α,3β}` ordered `(11, 12, 21, 22)`.
    pub second_gradient: [f64; 4],
}

pub fn evaluate_solution(u: &DisplacementField3D, x: Point, eps: f64) -> PointEvaluation {
    let j = u.jet(x);
    PointEvaluation {
        displacement: j.value,
        strain: j.strain(),
        scaled_strain: scaled_strain(&j.grad, eps),
        second_gradient: j
            .penalty_terms()
            .expect("Ritz fields always carry second derivatives"),
    }
}

/// Distances between two fields on the same basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNorms {
    pub l2: f64,
    pub h1: f64,
    /// L² norms of the strain components `(11, 22, 33, 12, 13, 23)`.
    pub strain: [f64; 6],
}

fn quad_norm(g: &DMatrix<f64>, c: &DVector<f64>) -> f64 {
    c.dot(&(g * c)).max(0.0).sqrt()
}

impl RitzBasis3D {
    pub fn norm_grams(&self) -> Result<&NormGrams> {
        if let Some(g) = self.norm_grams.get() {
            return Ok(g);
        }
        let g = NormGrams::new(self)?;
        Ok(self.norm_grams.get_or_init(|| g))
    }
}

/// Norms of `u - v`.
pub fn norms(u: &DisplacementField3D, v: &DisplacementField3D) -> Result<FieldNorms> {
    if !Arc::ptr_eq(&u.basis, &v.basis) && *u.basis != *v.basis {
        return Err(Error::IncompatibleBasis(
            "fields live on different Ritz bases".into(),
        ));
    }
    let d = &u.coeffs - &v.coeffs;
    let g = u.basis.norm_grams()?;
    Ok(FieldNorms {
        l2: quad_norm(&g.l2, &d),
        h1: quad_norm(&g.h1, &d),
        strain: std::array::from_fn(|i| quad_norm(&g.strain[i], &d)),
    })
}

/// Exact embedding of a Timoshenko field into the Ritz space.
pub fn embed_timoshenko(basis: Arc<RitzBasis3D>, f: &TimoshenkoField) -> Result<DisplacementField3D> {
    if basis.p1 == 0 || basis.p2 == 0 {
        return Err(Error::IncompatibleBasis(
            "Timoshenko fields need in-plane degree at least 1".into(),
        ));
    }
    let f = f.reembed(basis.axial.clone())?;
    let [h1, h2] = basis.section.half_extent;
    let mut c = DVector::zeros(basis.dim());
    let mut put = |mode: InPlaneMode, coeffs: &[f64], s: f64| {
        let i = basis.mode_index(mode).expect("mode present for degree >= 1");
        for (k, v) in coeffs.iter().enumerate() {
            c[basis.dof(i, k)] += s * v;
        }
    };
    let sc = |comp, m, n| InPlaneMode::Scalar { comp, m, n };
    put(sc(0, 0, 0), &f.comps[0], 1.0);
    put(sc(1, 0, 0), &f.comps[1], 1.0);
    put(sc(2, 0, 0), &f.comps[2], 1.0);
    put(sc(2, 0, 1), &f.comps[3], h2);
    put(sc(2, 1, 0), &f.comps[4], -h1);
    Ok(DisplacementField3D::new(basis, c))
}

/// L² projection onto the Ritz space, with the relative L² residual of the
/// projection.
pub fn project(basis: Arc<RitzBasis3D>, g: &dyn DisplacementField) -> Result<(DisplacementField3D, f64)> {
    let mass = &basis.norm_grams()?.l2;
    let chol = Cholesky::factor(mass)?;
    let domain = BeamDomain::new(basis.section.clone(), basis.length())?;
    let rule = domain.volume_rule(basis.section_degree(), basis.axial_degree())?;
    let np = basis.n_axial();
    let mut rhs = DVector::zeros(basis.dim());
    for (&x, &w) in rule.points.iter().zip(&rule.weights) {
        let val = g.value(x);
        let ax = basis.axial.eval(x[2]);
        for (i, mj) in basis.mode_jets(x[0], x[1]).iter().enumerate() {
            let t = w * (val[0] * mj.v[0] + val[1] * mj.v[1] + val[2] * mj.v[2]);
            if t == 0.0 {
                continue;
            }
            for (k, v) in ax.iter().enumerate() {
                rhs[i * np + k] += t * v[0];
            }
        }
    }
    let p = DisplacementField3D::new(basis, chol.solve(&rhs));
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &w) in rule.points.iter().zip(&rule.weights) {
        let (a, b) = (g.value(x), p.value(x));
        for i in 0..3 {
            num += w * (a[i] - b[i]).powi(2);
            den += w * a[i] * a[i];
        }
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok((p, residual))
}

/// Comparison of the real potential with the scaled one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealEnergyCheck {
    /// `Π^r` by quadrature on `Ω_r`.
    pub real: f64,
    /// `Π^{ε_r}` of the scaled field.
    pub scaled: f64,
    /// `|Π^r − ε_r² Π^{ε_r}| / max(|Π^r|, ε_r² |Π^{ε_r}|)`, zero when both vanish.
    pub discrepancy: f64,
}

/// Evaluates `Π^r` on the real cylinder `ε_r ω × (0, L)` for the real
/// counterpart of `u` and checks it against `ε_r² Π^{ε_r}(u)`.
pub fn real_problem_energy(
    u: &DisplacementField3D,
    m: &MaterialModuli,
    eps_r: f64,
    real_loads: &LoadSpec,
) -> Result<RealEnergyCheck> {
    let b = &u.basis;
    let real_section = b.section.scaled(eps_r)?;
    let real_domain = BeamDomain::new(real_section, b.length())?;
    let real_field = unscale_displacement(u, eps_r);
    let rule = real_domain.volume_rule(b.section_degree(), b.axial_degree())?;
    let field_degree = [b.in_plane_degree() + 1, b.axial.degree];
    let real = elastic_energy(&real_field, m, &rule)
        - load_potential_3d(&real_field, real_loads, &real_domain, field_degree)?;

    let op = EnergyOperator::new(b.clone(), m, eps_r)?;
    let f = load_vector(b, &scale_real_loads(real_loads, eps_r)?)?;
    let sys = op.system(eps_r, f)?;
    let scaled = sys.energy(&u.coeffs);
    let target = eps_r * eps_r * scaled;
    let scale = real.abs().max(target.abs());
    let discrepancy = if scale > 0.0 {
        (real - target).abs() / scale
    } else {
        0.0
    };
    Ok(RealEnergyCheck {
        real,
        scaled,
        discrepancy,
    })
}
