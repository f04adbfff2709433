//! Scaling maps, scaled strains, Timoshenko displacement fields and the
//! recovery fields built on them.

use std::fmt::Write as _;

use crate::axial::AxialBasis;
use crate::error::{Error, Result};
use crate::field::{DisplacementField, Jet, Point, Quadrature3};
use crate::material::{MaterialModuli, SymStrain};

/// `R^α = diag(α, α, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMatrix {
    pub alpha: f64,
}

impl ScaleMatrix {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0, "scale factor must be positive");
        ScaleMatrix { alpha }
    }

    pub fn inverse(self) -> Self {
        ScaleMatrix { alpha: 1.0 / self.alpha }
    }

    pub fn compose(self, other: ScaleMatrix) -> Self {
        ScaleMatrix { alpha: self.alpha * other.alpha }
    }

    pub fn apply(self, v: [f64; 3]) -> [f64; 3] {
        [self.alpha * v[0], self.alpha * v[1], v[2]]
    }

    fn diag(self, i: usize) -> f64 {
        if i < 2 {
            self.alpha
        } else {
            1.0
        }
    }
}

/// The field `x ↦ R^a u(R^b x)`.
pub struct Rescaled<F> {
    pub inner: F,
    pub outer: ScaleMatrix,
    pub arg: ScaleMatrix,
}

impl<F: DisplacementField> DisplacementField for Rescaled<F> {
    fn jet(&self, x: Point) -> Jet {
        let j = self.inner.jet(self.arg.apply(x));
        let mut out = Jet::default();
        for i in 0..3 {
            let a = self.outer.diag(i);
            out.value[i] = a * j.value[i];
            for k in 0..3 {
                out.grad[i][k] = a * j.grad[i][k] * self.arg.diag(k);
            }
        }
        out.hess = j.hess.map(|h| {
            let mut o = [[[0.0; 3]; 3]; 3];
            for i in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        o[i][k][l] =
                            self.outer.diag(i) * h[i][k][l] * self.arg.diag(k) * self.arg.diag(l);
                    }
                }
            }
            o
        });
        out
    }
}

/// Scaled counterpart `u(x) = R^ε ū(R^ε x)` of a field `ū` on `Ω_ε`.
pub fn scale_displacement<F: DisplacementField>(field: F, eps: f64) -> Rescaled<F> {
    let r = ScaleMatrix::new(eps);
    Rescaled {
        inner: field,
        outer: r,
        arg: r,
    }
}

/// Inverse of [`scale_displacement`]: `ū(y) = R^{1/ε} u(R^{1/ε} y)`.
pub fn unscale_displacement<F: DisplacementField>(field: F, eps: f64) -> Rescaled<F> {
    let r = ScaleMatrix::new(eps).inverse();
    Rescaled {
        inner: field,
        outer: r,
        arg: r,
    }
}

/// `E^ε = (R^ε)^{-1} sym(∇u) (R^ε)^{-1}`.
pub fn scaled_strain(grad: &[[f64; 3]; 3], eps: f64) -> SymStrain {
    let e = SymStrain::from_gradient(grad);
    let e2 = eps * eps;
    SymStrain {
        e11: e.e11 / e2,
        e22: e.e22 / e2,
        e12: e.e12 / e2,
        e13: e.e13 / eps,
        e23: e.e23 / eps,
        e33: e.e33,
    }
}

/// Components of a Timoshenko field, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    U1,
    U2,
    U3,
    Psi1,
    Psi2,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::U1,
        Component::U2,
        Component::U3,
        Component::Psi1,
        Component::Psi2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::U1 => "u1",
            Component::U2 => "u2",
            Component::U3 => "u3",
            Component::Psi1 => "psi1",
            Component::Psi2 => "psi2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDisplacement {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

/// Axis displacements `u⁰` and section rotations `ψ` on a clamped axial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TimoshenkoField {
    pub basis: AxialBasis,
    pub comps: [Vec<f64>; 5],
}

impl TimoshenkoField {
    pub fn zero(basis: AxialBasis) -> Self {
        let n = basis.dim();
        TimoshenkoField {
            comps: std::array::from_fn(|_| vec![0.0; n]),
            basis,
        }
    }

    /// Interpolates a profile into component `c`.
    pub fn with_profile(mut self, c: Component, f: impl Fn(f64) -> f64) -> Self {
        self.comps[c.index()] = self.basis.interpolate(f);
        self
    }

    /// Values and first three derivatives of the five profiles.
    pub fn profiles(&self, x3: f64) -> [[f64; 4]; 5] {
        let e = self.basis.eval(x3);
        let mut out = [[0.0; 4]; 5];
        for (c, coeffs) in self.comps.iter().enumerate() {
            for (a, row) in coeffs.iter().zip(&e) {
                for d in 0..4 {
                    out[c][d] += a * row[d];
                }
            }
        }
        out
    }

    pub fn td_evaluate(&self, x: Point) -> PointDisplacement {
        let p = self.profiles(x[2]);
        PointDisplacement {
            u1: p[0][0],
            u2: p[1][0],
            u3: p[2][0] + x[1] * p[3][0] - x[0] * p[4][0],
        }
    }

    /// `(E13, E23, E33)`; the in-plane strains vanish identically.
    pub fn td_strains(&self, x: Point) -> (f64, f64, f64) {
        let p = self.profiles(x[2]);
        (
            0.5 * (p[0][1] - p[4][0]),
            0.5 * (p[1][1] + p[3][0]),
            p[2][1] + x[1] * p[3][1] - x[0] * p[4][1],
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            c.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// `self + s * other` on the same basis.
    pub fn axpy(&self, s: f64, other: &TimoshenkoField) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::IncompatibleBasis("Timoshenko fields on different axial bases".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
        Ok(out)
    }

    /// Re-expresses the field on a basis of equal or higher degree.
    pub fn reembed(&self, basis: AxialBasis) -> Result<Self> {
        if basis.degree < self.basis.degree || basis.length != self.basis.length {
            return Err(Error::IncompatibleBasis(format!(
                "cannot embed degree {} into degree {}",
                self.basis.degree, basis.degree
            )));
        }
        let mut out = TimoshenkoField::zero(basis.clone());
        for c in 0..5 {
            let src = &self.comps[c];
            out.comps[c] = basis.interpolate(|x| self.basis.combine(src, x)[0]);
        }
        Ok(out)
    }

    /// Plain-text form: a `length` line, then one block per component with a
    /// header `component <name> degree <p>` followed by one coefficient per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "length {:e}", self.basis.length).unwrap();
        for c in Component::ALL {
            writeln!(s, "component {} degree {}", c.name(), self.basis.degree).unwrap();
            for v in &self.comps[c.index()] {
                writeln!(s, "{v:e}").unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |m: String| Error::Parse(m);
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let first = lines.next().ok_or_else(|| perr("empty field file".into()))?;
        let length: f64 = first
            .strip_prefix("length")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| perr(format!("expected `length <value>`, got `{first}`")))?;
        let mut comps: [Option<Vec<f64>>; 5] = Default::default();
        let mut degree = None;
        let mut current: Option<usize> = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("component") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let (name, deg) = match parts.as_slice() {
                    [name, "degree", deg] => (*name, *deg),
                    _ => return Err(perr(format!("malformed header `{line}`"))),
                };
                let c = Component::from_name(name)
                    .ok_or_else(|| perr(format!("unknown component `{name}`")))?;
                let d: usize = deg
                    .parse()
                    .map_err(|_| perr(format!("bad degree `{deg}`")))?;
                if *degree.get_or_insert(d) != d {
                    return Err(perr("components must share one degree".into()));
                }
                if comps[c.index()].is_some() {
                    return Err(perr(format!("duplicate component `{name}`")));
                }
                comps[c.index()] = Some(Vec::with_capacity(d));
                current = Some(c.index());
            } else {
                let idx = current.ok_or_else(|| perr("coefficient before any header".into()))?;
                let v: f64 = line
                    .parse()
                    .map_err(|_| perr(format!("bad coefficient `{line}`")))?;
                comps[idx].as_mut().unwrap().push(v);
            }
        }
        let degree = degree.ok_or_else(|| perr("no components".into()))?;
        let basis = AxialBasis::new(length, degree).map_err(|e| perr(e.to_string()))?;
        let mut out = TimoshenkoField::zero(basis);
        for c in Component::ALL {
            let v = comps[c.index()]
                .take()
                .ok_or_else(|| perr(format!("missing component `{}`", c.name())))?;
            if v.len() != degree {
                return Err(perr(format!(
                    "component `{}` has {} coefficients, expected {degree}",
                    c.name(),
                    v.len()
                )));
            }
            out.comps[c.index()] = v;
        }
        Ok(out)
    }
}

impl DisplacementField for TimoshenkoField {
    fn jet(&self, x: Point) -> Jet {
        let p = self.profiles(x[2]);
        let (x1, x2) = (x[0], x[1]);
        let mut j = Jet {
            value: [p[0][0], p[1][0], p[2][0] + x2 * p[3][0] - x1 * p[4][0]],
            ..Jet::default()
        };
        j.grad[0][2] = p[0][1];
        j.grad[1][2] = p[1][1];
        j.grad[2] = [-p[4][0], p[3][0], p[2][1] + x2 * p[3][1] - x1 * p[4][1]];
        let mut h = [[[0.0; 3]; 3]; 3];
        h[0][2][2] = p[0][2];
        h[1][2][2] = p[1][2];
        h[2][0][2] = -p[4][1];
        h[2][2][0] = -p[4][1];
        h[2][1][2] = p[3][1];
        h[2][2][1] = p[3][1];
        h[2][2][2] = p[2][2] + x2 * p[3][2] - x1 * p[4][2];
        j.hess = Some(h);
        j
    }
}

/// L² norms of `u_{α,β} + u_{β,α}` and of `u_{3,αβ} + u_{α,3β}` over all
/// index pairs, which vanish exactly on Timoshenko fields.
pub fn ansatz_residual(u: &dyn DisplacementField, rule: &Quadrature3) -> Result<(f64, f64)> {
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for (&x, &w) in rule.points.iter().zip(&rule.weights) {
        let j = u.jet(x);
        for a in 0..2 {
            for b in 0..2 {
                r1 += w * (j.grad[a][b] + j.grad[b][a]).powi(2);
            }
        }
        r2 += w * j.penalty_terms()?.iter().map(|t| t * t).sum::<f64>();
    }
    Ok((r1.sqrt(), r2.sqrt()))
}

/// The field `u + ε² û` attaining the limit energy from above.
#[derive(Debug, Clone)]
pub struct RecoveryField {
    pub base: TimoshenkoField,
    pub eps: f64,
    pub eta: f64,
}

pub fn recovery_field(f: &TimoshenkoField, eps: f64, m: &MaterialModuli) -> RecoveryField {
    RecoveryField {
        base: f.clone(),
        eps,
        eta: m.eta(),
    }
}

impl RecoveryField {
    /// Jet of the corrector `û` alone.
    pub fn corrector_jet(&self, x: Point) -> Jet {
        corrector_jet(&self.base.profiles(x[2]), x, self.eta)
    }
}

/// Corrector jet from the profile table of a Timoshenko field.
pub(crate) fn corrector_jet(p: &[[f64; 4]; 5], x: Point, eta: f64) -> Jet {
    let (x1, x2) = (x[0], x[1]);
    // a = u3', b = ψ1', c = ψ2' and their x3-derivatives
    let a = [p[2][1], p[2][2], p[2][3]];
    let b = [p[3][1], p[3][2], p[3][3]];
    let c = [p[4][1], p[4][2], p[4][3]];
    let q = 0.5 * (x2 * x2 - x1 * x1);
    let n = -eta;
    let u1 = |k: usize| x1 * a[k] + x1 * x2 * b[k] + q * c[k];
    let u2 = |k: usize| x2 * a[k] - x1 * x2 * c[k] + q * b[k];
    let mut j = Jet {
        value: [n * u1(0), n * u2(0), 0.0],
        ..Jet::default()
    };
    j.grad[0] = [
        n * (a[0] + x2 * b[0] - x1 * c[0]),
        n * (x1 * b[0] + x2 * c[0]),
        n * u1(1),
    ];
    j.grad[1] = [
        n * (-x2 * c[0] - x1 * b[0]),
        n * (a[0] - x1 * c[0] + x2 * b[0]),
        n * u2(1),
    ];
    let mut h = [[[0.0; 3]; 3]; 3];
    let h1 = [
        [-c[0], b[0], a[1] + x2 * b[1] - x1 * c[1]],
        [b[0], c[0], x1 * b[1] + x2 * c[1]],
        [a[1] + x2 * b[1] - x1 * c[1], x1 * b[1] + x2 * c[1], u1(2)],
    ];
    let h2 = [
        [-b[0], -c[0], -x2 * c[1] - x1 * b[1]],
        [-c[0], b[0], a[1] - x1 * c[1] + x2 * b[1]],
        [-x2 * c[1] - x1 * b[1], a[1] - x1 * c[1] + x2 * b[1], u2(2)],
    ];
    for r in 0..3 {
        for s in 0..3 {
            h[0][r][s] = n * h1[r][s];
            h[1][r][s] = n * h2[r][s];
        }
    }
    j.hess = Some(h);
    j
}

impl DisplacementField for RecoveryField {
    fn jet(&self, x: Point) -> Jet {
        let base = self.base.jet(x);
        base.axpy(self.eps * self.eps, &self.corrector_jet(x))
    }
}

impl RecoveryField {
    /// Deviations of the five strain identities at `x`:
    /// `(E^ε u^ε)_{11} + η(Eu)_{33}`, the same for `22`, `(E^ε u^ε)_{12}`,
    /// `(E^ε u^ε)_{33} − (Eu)_{33}` and the worst of
    /// `ε (E^ε u^ε)_{α3} − (Eu)_{α3} − ε² (Eû)_{α3}`.
    pub fn identity_residuals(&self, x: Point) -> [f64; 5] {
        let eps = self.eps;
        let es = scaled_strain(&self.jet(x).grad, eps);
        let (e13, e23, e33) = self.base.td_strains(x);
        let hat = self.corrector_jet(x).strain();
        [
            es.e11 + self.eta * e33,
            es.e22 + self.eta * e33,
            es.e12,
            es.e33 - e33,
            (eps * es.e13 - e13 - eps * eps * hat.e13)
                .abs()
                .max((eps * es.e23 - e23 - eps * eps * hat.e23).abs()),
        ]
    }
}
