use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::loads::{LoadSpec, Poly3};
use crate::material::{check_moduli, MaterialModuli};
use crate::poly::Rule1d;
use crate::section::{boundary_quadrature, section_quadrature};

use super::basis::{ModeJet, RitzBasis3D};
use super::field::DisplacementField3D;

/// Linear functionals of a displacement that appear in the quadratic forms.
///
/// Each is `f0(x1, x2) φ(x3) + f1(x1, x2) φ'(x3)` on a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    U1,
    U2,
    U3,
    /// `u1,1`
    E11,
    /// `u2,2`
    E22,
    /// `u1,2 + u2,1`
    G12,
    /// `u1,3 + u3,1`
    G13,
    /// `u2,3 + u3,2`
    G23,
    /// `u3,3`
    E33,
    /// `u3,11 + u1,31`
    P11,
    /// `u3,12 + u1,32`
    P12,
    /// `u3,21 + u2,31`
    P21,
    /// `u3,22 + u2,32`
    P22,
    D12,
    D21,
    D13,
    D23,
    D31,
    D32,
}

impl Measure {
    fn factors(self, j: &ModeJet) -> [f64; 2] {
        use Measure::*;
        match self {
            U1 => [j.v[0], 0.0],
            U2 => [j.v[1], 0.0],
            U3 => [j.v[2], 0.0],
            E11 => [j.d[0][0], 0.0],
            E22 => [j.d[1][1], 0.0],
            G12 => [j.d[0][1] + j.d[1][0], 0.0],
            G13 => [j.d[2][0], j.v[0]],
            G23 => [j.d[2][1], j.v[1]],
            E33 => [0.0, j.v[2]],
            P11 => [j.dd[2][0], j.d[0][0]],
            P12 => [j.dd[2][1], j.d[0][1]],
            P21 => [j.dd[2][1], j.d[1][0]],
            P22 => [j.dd[2][2], j.d[1][1]],
            D12 => [j.d[0][1], 0.0],
            D21 => [j.d[1][0], 0.0],
            D13 => [0.0, j.v[0]],
            D23 => [0.0, j.v[1]],
            D31 => [j.d[2][0], 0.0],
            D32 => [j.d[2][1], 0.0],
        }
    }
}

/// Integrand `Σ coef · M_a(u) M_b(u)`.
#[derive(Debug, Clone, Default)]
pub struct QuadForm {
    pub terms: Vec<(Measure, Measure, f64)>,
}

impl QuadForm {
    pub fn new() -> Self {
        QuadForm::default()
    }

    /// Adds `coef · (Σ w_i M_i)²`.
    pub fn square(mut self, coef: f64, combo: &[(Measure, f64)]) -> Self {
        for &(a, wa) in combo {
            for &(b, wb) in combo {
                self.terms.push((a, b, coef * wa * wb));
            }
        }
        self
    }

    /// Adds `coef · M_a M_b`.
    pub fn product(mut self, coef: f64, a: Measure, b: Measure) -> Self {
        self.terms.push((a, b, 0.5 * coef));
        self.terms.push((b, a, 0.5 * coef));
        self
    }
}

/// Gram matrix `G` with `cᵀ G c = ∫_Ω integrand(u_c) dv`, by sum
/// factorization over the section and the axis.
pub fn form_gram(basis: &RitzBasis3D, form: &QuadForm) -> Result<DMatrix<f64>> {
    let sq = section_quadrature(&basis.section, basis.section_degree())?;
    let jets: Vec<Vec<ModeJet>> = sq.nodes.iter().map(|p| basis.mode_jets(p[0], p[1])).collect();
    let nm = basis.n_modes();
    let nq = sq.len();
    let mut tables: HashMap<(Measure, usize), Option<DMatrix<f64>>> = HashMap::new();
    let mut table = |m: Measure, o: usize| -> Option<DMatrix<f64>> {
        tables
            .entry((m, o))
            .or_insert_with(|| {
                let t = DMatrix::from_fn(nm, nq, |i, q| m.factors(&jets[q][i])[o]);
                if t.iter().all(|&v| v == 0.0) {
                    None
                } else {
                    Some(t)
                }
            })
            .clone()
    };
    let mut s: [[DMatrix<f64>; 2]; 2] = Default::default();
    for row in s.iter_mut() {
        for m in row.iter_mut() {
            *m = DMatrix::zeros(nm, nm);
        }
    }
    let w = DVector::from_vec(sq.weights.clone());
    for &(a, b, coef) in &form.terms {
        if coef == 0.0 {
            continue;
        }
        for oa in 0..2 {
            let Some(ta) = table(a, oa) else { continue };
            let tw = DMatrix::from_fn(nm, nq, |i, q| ta[(i, q)] * w[q] * coef);
            for ob in 0..2 {
                let Some(tb) = table(b, ob) else { continue };
                s[oa][ob] += &tw * tb.transpose();
            }
        }
    }
    let np = basis.n_axial();
    let n = basis.dim();
    let mut g = DMatrix::zeros(n, n);
    for oa in 0..2 {
        for ob in 0..2 {
            let sm = &s[oa][ob];
            if sm.iter().all(|&v| v == 0.0) {
                continue;
            }
            let am = basis.axial.gram(oa, ob);
            for j in 0..nm {
                for i in 0..nm {
                    let sij = sm[(i, j)];
                    if sij == 0.0 {
                        continue;
                    }
                    for l in 0..np {
                        let col = j * np + l;
                        for k in 0..np {
                            g[(i * np + k, col)] += sij * am[(k, l)];
                        }
                    }
                }
            }
        }
    }
    let gt = g.transpose();
    Ok((g + gt) * 0.5)
}

/// Gram matrices of the norms used in distance computations.
#[derive(Debug, Clone)]
pub struct NormGrams {
    pub l2: DMatrix<f64>,
    pub h1: DMatrix<f64>,
    /// `(11, 22, 33, 12, 13, 23)`
    pub strain: [DMatrix<f64>; 6],
}

impl NormGrams {
    pub fn new(basis: &RitzBasis3D) -> Result<Self> {
        use Measure::*;
        let l2_form = QuadForm::new()
            .square(1.0, &[(U1, 1.0)])
            .square(1.0, &[(U2, 1.0)])
            .square(1.0, &[(U3, 1.0)]);
        let mut h1_form = l2_form.clone();
        for m in [E11, D12, D13, D21, E22, D23, D31, D32, E33] {
            h1_form = h1_form.square(1.0, &[(m, 1.0)]);
        }
        let strain_forms = [
            (E11, 1.0),
            (E22, 1.0),
            (E33, 1.0),
            (G12, 0.5),
            (G13, 0.5),
            (G23, 0.5),
        ];
        let mut strain: [DMatrix<f64>; 6] = Default::default();
        for (s, (m, w)) in strain.iter_mut().zip(strain_forms) {
            *s = form_gram(basis, &QuadForm::new().square(1.0, &[(m, w)]))?;
        }
        Ok(NormGrams {
            l2: form_gram(basis, &l2_form)?,
            h1: form_gram(basis, &h1_form)?,
            strain,
        })
    }
}

/// The ε-independent pieces of the elastic potential on a basis.
///
/// `𝒲^ε(c) = cᵀ (G_in / ε⁴ + G_cp / ε² + G_rest + ½ τ_R ((ε-ε_r)/ε)² G_pen) c`.
#[derive(Debug, Clone)]
pub struct EnergyOperator {
    pub basis: Arc<RitzBasis3D>,
    pub moduli: MaterialModuli,
    pub eps_r: f64,
    pub in_plane: DMatrix<f64>,
    pub coupling: DMatrix<f64>,
    pub rest: DMatrix<f64>,
    /// Unit-coefficient penalty Gram `∫ Σ (u_{3,αβ} + u_{α,3β})²`.
    pub penalty: DMatrix<f64>,
}

impl EnergyOperator {
    pub fn new(basis: Arc<RitzBasis3D>, m: &MaterialModuli, eps_r: f64) -> Result<Self> {
        use Measure::*;
        check_moduli(m)?;
        if !(eps_r > 0.0 && eps_r < 1.0) {
            return Err(Error::InvalidArgument(format!("eps_r = {eps_r} must lie in (0, 1)")));
        }
        let in_plane = QuadForm::new()
            .square(m.mu, &[(E11, 1.0)])
            .square(m.mu, &[(E22, 1.0)])
            .square(0.5 * m.mu, &[(G12, 1.0)])
            .square(0.5 * m.lambda, &[(E11, 1.0), (E22, 1.0)]);
        let coupling = QuadForm::new()
            .product(m.tau2, E33, E11)
            .product(m.tau2, E33, E22);
        let rest = QuadForm::new()
            .square(0.5 * m.gamma / (eps_r * eps_r), &[(G13, 1.0)])
            .square(0.5 * m.gamma / (eps_r * eps_r), &[(G23, 1.0)])
            .square(0.5 * m.tau1, &[(E33, 1.0)]);
        let penalty = QuadForm::new()
            .square(1.0, &[(P11, 1.0)])
            .square(1.0, &[(P12, 1.0)])
            .square(1.0, &[(P21, 1.0)])
            .square(1.0, &[(P22, 1.0)]);
        Ok(EnergyOperator {
            in_plane: form_gram(&basis, &in_plane)?,
            coupling: form_gram(&basis, &coupling)?,
            rest: form_gram(&basis, &rest)?,
            penalty: form_gram(&basis, &penalty)?,
            basis,
            moduli: *m,
            eps_r,
        })
    }

    /// `½ τ_R ((ε - ε_r)/ε)²`.
    pub fn penalty_coefficient(&self, eps: f64) -> f64 {
        let r = (eps - self.eps_r) / eps;
        0.5 * self.moduli.tau_r * r * r
    }

    /// Stiffness `K` with `½ cᵀ K c = 𝒲^ε(c)`.
    pub fn stiffness(&self, eps: f64) -> Result<DMatrix<f64>> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
        }
        let e2 = eps * eps;
        let mut k = &self.in_plane * (2.0 / (e2 * e2));
        k += &self.coupling * (2.0 / e2);
        k += &self.rest * 2.0;
        let pc = self.penalty_coefficient(eps);
        if pc != 0.0 {
            k += &self.penalty * (2.0 * pc);
        }
        Ok(k)
    }

    pub fn system(&self, eps: f64, f: DVector<f64>) -> Result<AssembledSystem> {
        let k = self.stiffness(eps)?;
        Ok(AssembledSystem {
            k,
            f,
            penalty_coefficient: self.penalty_coefficient(eps),
            penalty: Some(self.penalty.clone()),
            basis: Some(self.basis.clone()),
            eps,
        })
    }
}

/// Load vector `F_I = ℱ(φ_I)`.
pub fn load_vector(basis: &RitzBasis3D, loads: &LoadSpec) -> Result<DVector<f64>> {
    loads.validate()?;
    let mut f = DVector::zeros(basis.dim());
    if loads.is_zero() {
        return Ok(f);
    }
    let sd = basis.in_plane_degree() + 1 + loads.in_plane_degree();
    let ad = basis.axial.degree + loads.axial_degree();
    let ax = Rule1d::exact_for(ad, 0.0, basis.length());
    let along: Vec<AxialNode> = ax
        .nodes
        .iter()
        .zip(&ax.weights)
        .map(|(&x3, &w)| (x3, w, basis.axial.eval(x3)))
        .collect();
    let tip: Vec<AxialNode> = vec![(basis.length(), 1.0, basis.axial.eval(basis.length()))];
    if loads.body.iter().any(|p| !p.is_zero()) {
        let sq = section_quadrature(&basis.section, sd)?;
        accumulate_load(&mut f, basis, &sq.nodes, &sq.weights, &along, &loads.body);
    }
    if loads.lateral.iter().any(|p| !p.is_zero()) {
        let bq = boundary_quadrature(&basis.section, sd);
        accumulate_load(&mut f, basis, &bq.nodes, &bq.weights, &along, &loads.lateral);
    }
    if loads.end.iter().any(|p| !p.is_zero()) {
        let sq = section_quadrature(&basis.section, sd)?;
        accumulate_load(&mut f, basis, &sq.nodes, &sq.weights, &tip, &loads.end);
    }
    Ok(f)
}

type AxialNode = (f64, f64, Vec<[f64; 4]>);

fn accumulate_load(
    f: &mut DVector<f64>,
    basis: &RitzBasis3D,
    nodes: &[[f64; 2]],
    weights: &[f64],
    axial: &[AxialNode],
    load: &[Poly3; 3],
) {
    let np = basis.n_axial();
    for (p, &ws) in nodes.iter().zip(weights) {
        let jets = basis.mode_jets(p[0], p[1]);
        for (x3, wa, vals) in axial {
            let x = [p[0], p[1], *x3];
            let b = [load[0].eval(x), load[1].eval(x), load[2].eval(x)];
            if b == [0.0; 3] {
                continue;
            }
            for (i, j) in jets.iter().enumerate() {
                let t = ws * wa * (b[0] * j.v[0] + b[1] * j.v[1] + b[2] * j.v[2]);
                if t == 0.0 {
                    continue;
                }
                for (k, v) in vals.iter().enumerate() {
                    f[i * np + k] += t * v[0];
                }
            }
        }
    }
}

/// Stiffness and load vector of `Π^ε(c) = ½ cᵀ K c − Fᵀ c`.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub k: DMatrix<f64>,
    pub f: DVector<f64>,
    pub penalty_coefficient: f64,
    pub penalty: Option<DMatrix<f64>>,
    pub basis: Option<Arc<RitzBasis3D>>,
    pub eps: f64,
}

impl AssembledSystem {
    /// A bare system without an attached basis.
    pub fn from_parts(k: DMatrix<f64>, f: DVector<f64>) -> Self {
        AssembledSystem {
            k,
            f,
            penalty_coefficient: 0.0,
            penalty: None,
            basis: None,
            eps: f64::NAN,
        }
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn energy(&self, c: &DVector<f64>) -> f64 {
        0.5 * c.dot(&(&self.k * c)) - self.f.dot(c)
    }

    /// Value of the second-gradient term at `c`.
    pub fn penalty_energy(&self, c: &DVector<f64>) -> f64 {
        match &self.penalty {
            Some(p) if self.penalty_coefficient != 0.0 => self.penalty_coefficient * c.dot(&(p * c)),
            _ => 0.0,
        }
    }
}

/// Builds the system for one ε.
pub fn assemble(
    basis: Arc<RitzBasis3D>,
    m: &MaterialModuli,
    eps: f64,
    eps_r: f64,
    loads: &LoadSpec,
) -> Result<AssembledSystem> {
    let f = load_vector(&basis, loads)?;
    EnergyOperator::new(basis, m, eps_r)?.system(eps, f)
}

/// Diagnostics of a minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    /// Relative residual of the equilibrated system.
    pub residual: f64,
    pub cond_estimate: f64,
    pub min_pivot: f64,
}

/// Condition estimate above which results are flagged.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct Solution {
    pub coeffs: DVector<f64>,
    pub energy: f64,
    pub diagnostics: SolveDiagnostics,
    pub field: Option<DisplacementField3D>,
}

impl Solution {
    pub fn ill_conditioned(&self) -> bool {
        self.diagnostics.cond_estimate > CONDITION_LIMIT
    }
}

/// Minimizes `½ cᵀ K c − Fᵀ c`; the minimum value is `−½ Fᵀ c`.
pub fn solve_min(sys: &AssembledSystem) -> Result<Solution> {
    let s = solve_spd(&sys.k, &sys.f)?;
    // adding +0.0 turns a signed zero into +0
    let energy = -0.5 * sys.f.dot(&s.x) + 0.0;
    let field = sys
        .basis
        .as_ref()
        .map(|b| DisplacementField3D::new(b.clone(), s.x.clone()));
    Ok(Solution {
        energy,
        diagnostics: SolveDiagnostics {
            residual: s.residual,
            cond_estimate: s.cond_estimate,
            min_pivot: s.min_pivot,
        },
        coeffs: s.x,
        field,
    })
}
