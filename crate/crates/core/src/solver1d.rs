//! Galerkin minimization of the limit beam potential `Π = Π_a + Π_b` on the
//! clamped axial basis, with closed-form cantilever benchmarks and the
//! shear-rigid (Bernoulli–Navier) limit.

use nalgebra::{DMatrix, DVector};

use crate::axial::AxialBasis;
use crate::error::{Error, Result};
use crate::field::BeamDomain;
use crate::energy::limit_elastic_energy;
use crate::kinematics::{Component, TimoshenkoField};
use crate::linalg::solve_spd;
use crate::loads::{load_potential_3d, LoadSpec, ReducedLoads};
use crate::material::{check_moduli, MaterialModuli};
use crate::section::CrossSection;

/// Stiffness coefficients of the limit beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamStiffness {
    /// `τ1 − τ2²/(λ+μ)`
    pub axial_modulus: f64,
    /// `E_mod · A`
    pub stretch: f64,
    /// `[B1, B2] = E_mod · [J1, J2]`
    pub bending: [f64; 2],
    /// `S = γ A / ε_r²`
    pub shear: f64,
    pub length: f64,
}

impl BeamStiffness {
    pub fn new(m: &MaterialModuli, cs: &CrossSection, eps_r: f64, length: f64) -> Result<Self> {
        check_moduli(m)?;
        if !(eps_r > 0.0 && eps_r < 1.0) {
            return Err(Error::InvalidArgument(format!("eps_r = {eps_r} must lie in (0, 1)")));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidArgument(format!("beam length {length} must be positive")));
        }
        let e = m.axial_modulus();
        Ok(BeamStiffness {
            axial_modulus: e,
            stretch: e * cs.area,
            bending: [e * cs.j1, e * cs.j2],
            shear: m.gamma * cs.area / (eps_r * eps_r),
            length,
        })
    }
}

/// `(Π, Π_a, Π_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Energy1d {
    pub total: f64,
    pub axial: f64,
    pub bending: f64,
}

/// Axial-stretching and bending potentials of a Timoshenko field.
pub fn energy_1d(f: &TimoshenkoField, st: &BeamStiffness, rl: &ReducedLoads) -> Energy1d {
    let rule = f.basis.rule(2 * f.basis.degree + rl.max_degree());
    let (mut a, mut b) = (0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let p = f.profiles(x);
        let [u1, u2, u3, p1, p2] = p;
        a += w
            * (0.5 * st.stretch * u3[1] * u3[1] - rl.f[2].eval(x) * u3[0]);
        b += w
            * (0.5 * st.shear * ((u1[1] - p2[0]).powi(2) + (u2[1] + p1[0]).powi(2))
                + 0.5 * (st.bending[0] * p1[1] * p1[1] + st.bending[1] * p2[1] * p2[1])
                - rl.f[0].eval(x) * u1[0]
                - rl.f[1].eval(x) * u2[0]
                - rl.m[0].eval(x) * p1[0]
                - rl.m[1].eval(x) * p2[0]);
    }
    let t = f.profiles(f.basis.length);
    a -= rl.end_force[2] * t[2][0];
    b -= rl.end_force[0] * t[0][0]
        + rl.end_force[1] * t[1][0]
        + rl.end_couple[0] * t[3][0]
        + rl.end_couple[1] * t[4][0];
    Energy1d {
        total: a + b,
        axial: a,
        bending: b,
    }
}

/// Block Galerkin system over a subset of components.
struct System1d {
    comps: Vec<Component>,
    k: DMatrix<f64>,
    f: DVector<f64>,
}

impl System1d {
    fn new(basis: &AxialBasis, st: &BeamStiffness, rl: &ReducedLoads, comps: &[Component]) -> Self {
        let p = basis.dim();
        let n = p * comps.len();
        let g = [
            [basis.gram(0, 0), basis.gram(0, 1)],
            [basis.gram(1, 0), basis.gram(1, 1)],
        ];
        let pos = |c: Component| comps.iter().position(|&x| x == c);
        let mut k = DMatrix::zeros(n, n);
        let mut add = |a: Component, da: usize, b: Component, db: usize, s: f64| {
            if let (Some(i), Some(j)) = (pos(a), pos(b)) {
                let blk = &g[da][db];
                for r in 0..p {
                    for c in 0..p {
                        k[(i * p + r, j * p + c)] += s * blk[(r, c)];
                    }
                }
            }
        };
        use Component::*;
        let s = st.shear;
        add(U3, 1, U3, 1, st.stretch);
        // (u1' − ψ2)²
        add(U1, 1, U1, 1, s);
        add(U1, 1, Psi2, 0, -s);
        add(Psi2, 0, U1, 1, -s);
        add(Psi2, 0, Psi2, 0, s);
        add(Psi2, 1, Psi2, 1, st.bending[1]);
        // (u2' + ψ1)²
        add(U2, 1, U2, 1, s);
        add(U2, 1, Psi1, 0, s);
        add(Psi1, 0, U2, 1, s);
        add(Psi1, 0, Psi1, 0, s);
        add(Psi1, 1, Psi1, 1, st.bending[0]);

        let rule = basis.rule(basis.degree + rl.max_degree());
        let lines = [&rl.f[0], &rl.f[1], &rl.f[2], &rl.m[0], &rl.m[1]];
        let ends = [
            rl.end_force[0],
            rl.end_force[1],
            rl.end_force[2],
            rl.end_couple[0],
            rl.end_couple[1],
        ];
        let mut f = DVector::zeros(n);
        let tip = basis.eval(basis.length);
        for (slot, &c) in comps.iter().enumerate() {
            let line = lines[c.index()];
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let lv = line.eval(x);
                if lv == 0.0 {
                    continue;
                }
                for (r, v) in basis.eval(x).iter().enumerate() {
                    f[slot * p + r] += w * lv * v[0];
                }
            }
            for (r, v) in tip.iter().enumerate() {
                f[slot * p + r] += ends[c.index()] * v[0];
            }
        }
        System1d { comps: comps.to_vec(), k, f }
    }

    fn solve_into(&self, out: &mut TimoshenkoField) -> Result<()> {
        let p = out.basis.dim();
        let s = solve_spd(&self.k, &self.f)?;
        for (slot, c) in self.comps.iter().enumerate() {
            out.comps[c.index()] = s.x.as_slice()[slot * p..(slot + 1) * p].to_vec();
        }
        Ok(())
    }
}

/// Minimizer of `Π_a` with its Euler–Lagrange residual.
#[derive(Debug, Clone)]
pub struct AxialSolution {
    pub field: TimoshenkoField,
    /// `‖E_mod A u3'' + f3‖_{L²} + |E_mod A u3'(L) − F3|`
    pub residual: f64,
}

pub fn solve_axial(st: &BeamStiffness, rl: &ReducedLoads, basis: &AxialBasis) -> Result<AxialSolution> {
    let mut field = TimoshenkoField::zero(basis.clone());
    System1d::new(basis, st, rl, &[Component::U3]).solve_into(&mut field)?;
    let rule = basis.rule(2 * basis.degree + rl.max_degree());
    let c = &field.comps[2];
    let interior = rule
        .integrate(|x| (st.stretch * basis.combine(c, x)[2] + rl.f[2].eval(x)).powi(2))
        .sqrt();
    let end = (st.stretch * basis.combine(c, basis.length)[1] - rl.end_force[2]).abs();
    Ok(AxialSolution {
        field,
        residual: interior + end,
    })
}

/// Minimizer of `Π_b`, solved plane by plane.
pub fn solve_bending(st: &BeamStiffness, rl: &ReducedLoads, basis: &AxialBasis) -> Result<TimoshenkoField> {
    use Component::*;
    let mut field = TimoshenkoField::zero(basis.clone());
    System1d::new(basis, st, rl, &[U1, Psi2]).solve_into(&mut field)?;
    System1d::new(basis, st, rl, &[U2, Psi1]).solve_into(&mut field)?;
    Ok(field)
}

/// Minimizer of `Π` from the independent axial and bending problems.
pub fn solve_timoshenko(st: &BeamStiffness, rl: &ReducedLoads, basis: &AxialBasis) -> Result<TimoshenkoField> {
    let mut f = solve_bending(st, rl, basis)?;
    f.comps[2] = solve_axial(st, rl, basis)?.field.comps[2].clone();
    Ok(f)
}

/// Minimizer of `Π` from one system in all five components.
pub fn solve_joint(st: &BeamStiffness, rl: &ReducedLoads, basis: &AxialBasis) -> Result<TimoshenkoField> {
    let mut field = TimoshenkoField::zero(basis.clone());
    System1d::new(basis, st, rl, &Component::ALL).solve_into(&mut field)?;
    Ok(field)
}

/// `Π(u) = ∫_Ω W_τ(E_{i3} u) dv − ℱ(u)` evaluated by 3D quadrature.
pub fn limit_potential_3d(
    f: &TimoshenkoField,
    m: &MaterialModuli,
    eps_r: f64,
    domain: &BeamDomain,
    loads: &LoadSpec,
) -> Result<f64> {
    let p = f.basis.degree;
    let rule = domain.volume_rule(2, 2 * p)?;
    Ok(limit_elastic_energy(f, eps_r, m, &rule) - load_potential_3d(f, loads, domain, [1, p])?)
}

/// Closed-form cantilever responses of the limit beam (clamped at 0, free at
/// `L`, constant coefficients).
pub mod benchmarks {
    /// Tip deflection under an end force: `F L³/(3B) + F L/S`.
    pub fn tip_force_deflection(force: f64, length: f64, bending: f64, shear: f64) -> f64 {
        force * length.powi(3) / (3.0 * bending) + force * length / shear
    }

    /// Tip rotation magnitude under an end force: `F L²/(2B)`.
    pub fn tip_force_rotation(force: f64, length: f64, bending: f64) -> f64 {
        force * length * length / (2.0 * bending)
    }

    /// Tip rotation under an end couple: `M L / B`.
    pub fn tip_couple_rotation(couple: f64, length: f64, bending: f64) -> f64 {
        couple * length / bending
    }

    /// Tip deflection magnitude under an end couple: `M L²/(2B)`.
    pub fn tip_couple_deflection(couple: f64, length: f64, bending: f64) -> f64 {
        couple * length * length / (2.0 * bending)
    }

    /// Tip deflection under a uniform line load: `q L⁴/(8B) + q L²/(2S)`.
    pub fn uniform_load_deflection(q: f64, length: f64, bending: f64, shear: f64) -> f64 {
        q * length.powi(4) / (8.0 * bending) + q * length * length / (2.0 * shear)
    }

    /// Axial tip displacement under an end force: `F L/(E_mod A)`.
    pub fn axial_tip(force: f64, length: f64, stretch: f64) -> f64 {
        force * length / stretch
    }

    /// Axial displacement under a uniform line load: `q (L x − x²/2)/(E_mod A)`.
    pub fn axial_uniform(q: f64, length: f64, stretch: f64, x: f64) -> f64 {
        q * (length * x - 0.5 * x * x) / stretch
    }
}

/// Shear-rigid beam: `ψ2 = u1'`, `ψ1 = −u2'`, on the basis `x3 φ_k(x3)`.
///
/// Returns the field on an axial basis one degree higher than `basis`.
pub fn solve_bernoulli_navier(
    st: &BeamStiffness,
    rl: &ReducedLoads,
    basis: &AxialBasis,
) -> Result<TimoshenkoField> {
    let p = basis.dim();
    let rule = basis.rule(2 * basis.degree + 2 + rl.max_degree());
    let g = |x: f64| -> Vec<[f64; 3]> {
        basis
            .eval(x)
            .iter()
            .map(|v| [x * v[0], v[0] + x * v[1], 2.0 * v[1] + x * v[2]])
            .collect()
    };
    let mut k = DMatrix::zeros(p, p);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let e = g(x);
        for i in 0..p {
            for j in 0..p {
                k[(i, j)] += w * e[i][2] * e[j][2];
            }
        }
    }
    let tip = g(basis.length);
    // plane 1: w = u1, ψ2 = w'; plane 2: w = u2, ψ1 = −w'
    let planes = [
        (&rl.f[0], &rl.m[1], 1.0, rl.end_force[0], rl.end_couple[1], st.bending[1]),
        (&rl.f[1], &rl.m[0], -1.0, rl.end_force[1], rl.end_couple[0], st.bending[0]),
    ];
    let higher = AxialBasis::new(basis.length, basis.degree + 1)?;
    let mut out = TimoshenkoField::zero(higher.clone());
    for (plane, (fl, ml, sign, fe, me, b)) in planes.into_iter().enumerate() {
        let mut f = DVector::zeros(p);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (lf, lm) = (fl.eval(x), ml.eval(x));
            for (i, e) in g(x).iter().enumerate() {
                f[i] += w * (lf * e[0] + sign * lm * e[1]);
            }
        }
        for (i, e) in tip.iter().enumerate() {
            f[i] += fe * e[0] + sign * me * e[1];
        }
        let c = solve_spd(&(&k * b), &f)?.x;
        let w = |x: f64| -> [f64; 2] {
            let e = g(x);
            let mut v = [0.0; 2];
            for (ci, ei) in c.iter().zip(&e) {
                v[0] += ci * ei[0];
                v[1] += ci * ei[1];
            }
            v
        };
        let (u, psi) = if plane == 0 {
            (Component::U1, Component::Psi2)
        } else {
            (Component::U2, Component::Psi1)
        };
        out.comps[u.index()] = higher.interpolate(|x| w(x)[0]);
        out.comps[psi.index()] = higher.interpolate(|x| sign * w(x)[1]);
    }
    Ok(out)
}

/// One row of the shear-rigid limit study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnRow {
    pub eps_r: f64,
    /// `[u1⁰(L), u2⁰(L)]` of the Timoshenko minimizer.
    pub tip: [f64; 2],
    /// Same for the shear-rigid minimizer.
    pub bn_tip: [f64; 2],
    /// `‖u1⁰' − ψ2‖ + ‖u2⁰' + ψ1‖` in `L²(0, L)`.
    pub shear_measure: f64,
    /// `|tip − bn_tip| / |tip|`.
    pub shear_fraction: f64,
}

/// Solves the limit beam for a decreasing sequence of `ε_r` and compares with
/// the shear-rigid beam.
pub fn bernoulli_navier_limit(
    m: &MaterialModuli,
    cs: &CrossSection,
    rl: &ReducedLoads,
    eps_r_grid: &[f64],
    basis: &AxialBasis,
) -> Result<Vec<BnRow>> {
    if eps_r_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps_r grid must be strictly decreasing".into()));
    }
    let rule = basis.rule(2 * basis.degree);
    eps_r_grid
        .iter()
        .map(|&eps_r| {
            let st = BeamStiffness::new(m, cs, eps_r, basis.length)?;
            let f = solve_timoshenko(&st, rl, basis)?;
            let bn = solve_bernoulli_navier(&st, rl, basis)?;
            let sq = |g: &dyn Fn(f64) -> f64| rule.integrate(|x| g(x).powi(2)).sqrt();
            let shear_measure = sq(&|x| {
                let p = f.profiles(x);
                p[0][1] - p[4][0]
            }) + sq(&|x| {
                let p = f.profiles(x);
                p[1][1] + p[3][0]
            });
            let t = f.profiles(basis.length);
            let tb = bn.profiles(basis.length);
            let tip = [t[0][0], t[1][0]];
            let bn_tip = [tb[0][0], tb[1][0]];
            let diff = (tip[0] - bn_tip[0]).hypot(tip[1] - bn_tip[1]);
            let norm = tip[0].hypot(tip[1]);
            Ok(BnRow {
                eps_r,
                tip,
                bn_tip,
                shear_measure,
                shear_fraction: if norm > 0.0 { diff / norm } else { 0.0 },
            })
        })
        .collect()
}
