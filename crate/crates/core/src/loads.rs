//! Polynomial load descriptors, the 3D load potential, the real-to-scaled
//! load map and the reduction to line loads on the beam axis.

use crate::error::{Error, Result};
use crate::field::{BeamDomain, DisplacementField};
use crate::kinematics::TimoshenkoField;
use crate::poly::Poly1;
use crate::section::{boundary_quadrature, section_quadrature, CrossSection};

/// Highest total polynomial degree accepted in a load component.
pub const MAX_LOAD_DEGREE: usize = 6;

/// `coeff · x1^p1 x2^p2 x3^p3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: [u32; 3],
}

impl Monomial {
    pub fn new(coeff: f64, p1: u32, p2: u32, p3: u32) -> Self {
        Monomial {
            coeff,
            powers: [p1, p2, p3],
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.coeff
            * x[0].powi(self.powers[0] as i32)
            * x[1].powi(self.powers[1] as i32)
            * x[2].powi(self.powers[2] as i32)
    }

    pub fn in_plane_degree(&self) -> usize {
        (self.powers[0] + self.powers[1]) as usize
    }

    pub fn degree(&self) -> usize {
        (self.powers[0] + self.powers[1] + self.powers[2]) as usize
    }
}

/// Scalar polynomial in `(x1, x2, x3)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly3 {
    pub terms: Vec<Monomial>,
}

impl Poly3 {
    pub fn constant(c: f64) -> Self {
        Poly3 {
            terms: vec![Monomial::new(c, 0, 0, 0)],
        }
    }

    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        Poly3 { terms }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn in_plane_degree(&self) -> usize {
        self.terms.iter().map(Monomial::in_plane_degree).max().unwrap_or(0)
    }

    pub fn axial_degree(&self) -> usize {
        self.terms.iter().map(|t| t.powers[2] as usize).max().unwrap_or(0)
    }

    fn scaled_terms(&self, f: impl Fn(&Monomial) -> f64) -> Poly3 {
        Poly3 {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff * f(t),
                    powers: t.powers,
                })
                .collect(),
        }
    }
}

pub type VectorPoly3 = [Poly3; 3];

fn eval_vec(v: &VectorPoly3, x: [f64; 3]) -> [f64; 3] {
    [v[0].eval(x), v[1].eval(x), v[2].eval(x)]
}

/// Body force on `Ω`, traction on the lateral surface `∂ω × (0, L)` and
/// traction on the free end `ω × {L}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadSpec {
    pub body: VectorPoly3,
    pub lateral: VectorPoly3,
    pub end: VectorPoly3,
}

impl LoadSpec {
    pub fn zero() -> Self {
        LoadSpec::default()
    }

    pub fn is_zero(&self) -> bool {
        self.all().all(|p| p.is_zero())
    }

    fn all(&self) -> impl Iterator<Item = &Poly3> {
        self.body.iter().chain(&self.lateral).chain(&self.end)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.all().map(Poly3::degree).max().unwrap_or(0);
        if d > MAX_LOAD_DEGREE {
            return Err(Error::QuadratureBudget(format!(
                "load degree {d} exceeds {MAX_LOAD_DEGREE}"
            )));
        }
        Ok(())
    }

    pub fn in_plane_degree(&self) -> usize {
        self.all().map(Poly3::in_plane_degree).max().unwrap_or(0)
    }

    pub fn axial_degree(&self) -> usize {
        self.all().map(Poly3::axial_degree).max().unwrap_or(0)
    }
}

/// `∫_Ω b·u dv + ∫_{∂_N Ω} c·u da`; the clamped face carries no load.
///
/// `field_degree = [in-plane total degree, axial degree]` of `u` sets the
/// quadrature so that polynomial fields are integrated exactly.
pub fn load_potential_3d(
    u: &dyn DisplacementField,
    loads: &LoadSpec,
    domain: &BeamDomain,
    field_degree: [usize; 2],
) -> Result<f64> {
    loads.validate()?;
    let sd = field_degree[0] + loads.in_plane_degree();
    let ad = field_degree[1] + loads.axial_degree();
    let mut total = 0.0;
    if loads.body.iter().any(|p| !p.is_zero()) {
        let q = domain.volume_rule(sd, ad)?;
        total += q.integrate(|x| dot(&eval_vec(&loads.body, x), &u.value(x)));
    }
    if loads.lateral.iter().any(|p| !p.is_zero()) {
        let q = domain.lateral_rule(sd, ad);
        total += q.integrate(|x| dot(&eval_vec(&loads.lateral, x), &u.value(x)));
    }
    if loads.end.iter().any(|p| !p.is_zero()) {
        let q = domain.end_rule(sd)?;
        total += q.integrate(|x| dot(&eval_vec(&loads.end, x), &u.value(x)));
    }
    Ok(total)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Real loads on `Ω_r` mapped to the scaled cylinder: body and end loads by
/// `(R^{ε_r})^{-1} b̄(R^{ε_r} x)`, lateral tractions with an extra `1/ε_r`.
pub fn scale_real_loads(real: &LoadSpec, eps_r: f64) -> Result<LoadSpec> {
    if !(eps_r > 0.0 && eps_r < 1.0) {
        return Err(Error::InvalidArgument(format!("eps_r = {eps_r} must lie in (0, 1)")));
    }
    let map = |v: &VectorPoly3, extra: f64| -> VectorPoly3 {
        std::array::from_fn(|i| {
            let row = if i < 2 { 1.0 / eps_r } else { 1.0 };
            v[i].scaled_terms(|t| row * extra * eps_r.powi((t.powers[0] + t.powers[1]) as i32))
        })
    };
    Ok(LoadSpec {
        body: map(&real.body, 1.0),
        lateral: map(&real.lateral, 1.0 / eps_r),
        end: map(&real.end, 1.0),
    })
}

/// Line loads and end resultants acting on the beam axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedLoads {
    /// `f1, f2, f3`
    pub f: [Poly1; 3],
    /// `m1, m2`
    pub m: [Poly1; 2],
    /// `F1, F2, F3`
    pub end_force: [f64; 3],
    /// `M1, M2`
    pub end_couple: [f64; 2],
    pub length: f64,
}

impl ReducedLoads {
    pub fn zero(length: f64) -> Self {
        ReducedLoads {
            f: Default::default(),
            m: Default::default(),
            end_force: [0.0; 3],
            end_couple: [0.0; 2],
            length,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.f
            .iter()
            .chain(&self.m)
            .map(Poly1::degree)
            .max()
            .unwrap_or(0)
    }
}

/// Section and boundary moments `∫ x1^a x2^b` for the monomials of a load.
struct MomentTables {
    area: Vec<Vec<f64>>,
    boundary: Vec<Vec<f64>>,
}

impl MomentTables {
    fn new(cs: &CrossSection, max: usize) -> Result<Self> {
        let sq = section_quadrature(cs, max.max(1))?;
        let bq = boundary_quadrature(cs, max.max(1));
        let table = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..=max)
                .map(|a| (0..=max - a).map(|b| f(a, b)).collect())
                .collect()
        };
        let pw = |x: f64, y: f64, a: usize, b: usize| x.powi(a as i32) * y.powi(b as i32);
        Ok(MomentTables {
            area: table(&|a, b| sq.integrate(|x, y| pw(x, y, a, b))),
            boundary: table(&|a, b| bq.integrate(|x, y| pw(x, y, a, b))),
        })
    }
}

/// Integrates a load component over the section (or its boundary) after
/// multiplying by `x1^s1 x2^s2`, leaving a polynomial in `x3`.
fn section_profile(p: &Poly3, table: &[Vec<f64>], shift: [usize; 2]) -> Poly1 {
    let mut out = Poly1::zero();
    for t in &p.terms {
        let a = t.powers[0] as usize + shift[0];
        let b = t.powers[1] as usize + shift[1];
        out.add_assign(&Poly1::monomial(t.coeff * table[a][b], t.powers[2] as usize));
    }
    out
}

/// Reduces loads to the beam axis:
/// `f_i = ∫_ω b_i + ∮ c_i`, `m1 = ∫ x2 b3 + ∮ x2 c3`, `m2 = -∫ x1 b3 - ∮ x1 c3`,
/// `F_i = ∫_ω c_i(L)`, `M1 = ∫ x2 c3(L)`, `M2 = -∫ x1 c3(L)`.
pub fn reduce_loads(loads: &LoadSpec, cs: &CrossSection, length: f64) -> Result<ReducedLoads> {
    loads.validate()?;
    let tables = MomentTables::new(cs, loads.in_plane_degree() + 1)?;
    let prof = |body: &Poly3, lat: &Poly3, shift: [usize; 2]| {
        let mut p = section_profile(body, &tables.area, shift);
        p.add_assign(&section_profile(lat, &tables.boundary, shift));
        p
    };
    let f = std::array::from_fn(|i| prof(&loads.body[i], &loads.lateral[i], [0, 0]));
    let m1 = prof(&loads.body[2], &loads.lateral[2], [0, 1]);
    let mut m2 = prof(&loads.body[2], &loads.lateral[2], [1, 0]);
    m2.coeffs.iter_mut().for_each(|c| *c = -*c);
    let end_val = |p: &Poly3, shift: [usize; 2]| section_profile(p, &tables.area, shift).eval(length);
    Ok(ReducedLoads {
        f,
        m: [m1, m2],
        end_force: std::array::from_fn(|i| end_val(&loads.end[i], [0, 0])),
        end_couple: [
            end_val(&loads.end[2], [0, 1]),
            -end_val(&loads.end[2], [1, 0]),
        ],
        length,
    })
}

/// `∫ (f·u⁰ + m1 ψ1 + m2 ψ2) dx3 + F·u⁰(L) + M1 ψ1(L) + M2 ψ2(L)`.
pub fn load_potential_1d(f: &TimoshenkoField, rl: &ReducedLoads) -> f64 {
    let rule = f.basis.rule(f.basis.degree + rl.max_degree());
    let lines = [&rl.f[0], &rl.f[1], &rl.f[2], &rl.m[0], &rl.m[1]];
    let distributed = rule.integrate(|x| {
        let p = f.profiles(x);
        lines.iter().zip(&p).map(|(l, v)| l.eval(x) * v[0]).sum()
    });
    let tip = f.profiles(f.basis.length);
    let ends = [
        rl.end_force[0],
        rl.end_force[1],
        rl.end_force[2],
        rl.end_couple[0],
        rl.end_couple[1],
    ];
    distributed + ends.iter().zip(&tip).map(|(e, v)| e * v[0]).sum::<f64>()
}
