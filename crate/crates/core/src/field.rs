//! Pointwise displacement evaluation with exact derivatives, and volume,
//! lateral and end-face quadrature on the scaled cylinder `Ω = ω × (0, L)`.

use crate::error::{Error, Result};
use crate::material::SymStrain;
use crate::section::{boundary_quadrature, section_quadrature, CrossSection};

pub type Point = [f64; 3];

/// Value, gradient and (optionally) Hessian of a vector field at a point.
///
/// `grad[i][j] = ∂u_i/∂x_j`, `hess[i][j][k] = ∂²u_i/∂x_j∂x_k`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: [f64; 3],
    pub grad: [[f64; 3]; 3],
    pub hess: Option<[[[f64; 3]; 3]; 3]>,
}

impl Jet {
    pub fn strain(&self) -> SymStrain {
        SymStrain::from_gradient(&self.grad)
    }

    /// Second-gradient combinations `u_{3,αβ} + u_{α,3β}` ordered
    /// `(11, 12, 21, 22)`.
    pub fn penalty_terms(&self) -> Result<[f64; 4]> {
        let h = self.hess.ok_or(Error::MissingSecondDerivatives)?;
        let t = |a: usize, b: usize| h[2][a][b] + h[a][2][b];
        Ok([t(0, 0), t(0, 1), t(1, 0), t(1, 1)])
    }

    /// `self + s * other`. The Hessian survives only if both carry one.
    pub fn axpy(&self, s: f64, other: &Jet) -> Jet {
        let mut out = *self;
        for i in 0..3 {
            out.value[i] += s * other.value[i];
            for j in 0..3 {
                out.grad[i][j] += s * other.grad[i][j];
            }
        }
        out.hess = match (self.hess, other.hess) {
            (Some(mut a), Some(b)) => {
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            a[i][j][k] += s * b[i][j][k];
                        }
                    }
                }
                Some(a)
            }
            _ => None,
        };
        out
    }
}

/// A displacement field that can be evaluated with exact derivatives.
pub trait DisplacementField: Sync {
    fn jet(&self, x: Point) -> Jet;

    fn value(&self, x: Point) -> [f64; 3] {
        self.jet(x).value
    }
}

impl<T: DisplacementField + ?Sized> DisplacementField for &T {
    fn jet(&self, x: Point) -> Jet {
        (**self).jet(x)
    }
}

/// Adapter turning a closure into a [`DisplacementField`].
pub struct FnField<F>(pub F);

impl<F: Fn(Point) -> Jet + Sync> DisplacementField for FnField<F> {
    fn jet(&self, x: Point) -> Jet {
        (self.0)(x)
    }
}

/// Sum `a + s b` of two fields.
pub struct Combination<A, B> {
    pub a: A,
    pub b: B,
    pub s: f64,
}

impl<A: DisplacementField, B: DisplacementField> DisplacementField for Combination<A, B> {
    fn jet(&self, x: Point) -> Jet {
        self.a.jet(x).axpy(self.s, &self.b.jet(x))
    }
}

/// Points and weights in three dimensions.
#[derive(Debug, Clone, Default)]
pub struct Quadrature3 {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl Quadrature3 {
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The scaled cylinder `ω × (0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamDomain {
    pub section: CrossSection,
    pub length: f64,
}

impl BeamDomain {
    pub fn new(section: CrossSection, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!("beam length {length} must be positive")));
        }
        Ok(BeamDomain { section, length })
    }

    pub fn volume(&self) -> f64 {
        self.section.area * self.length
    }

    /// Tensor rule exact for in-plane degree `section_degree` and axial
    /// degree `axial_degree`.
    pub fn volume_rule(&self, section_degree: usize, axial_degree: usize) -> Result<Quadrature3> {
        let sq = section_quadrature(&self.section, section_degree.max(1))?;
        let ax = crate::poly::Rule1d::exact_for(axial_degree, 0.0, self.length);
        let mut q = Quadrature3::default();
        for (p, w) in sq.nodes.iter().zip(&sq.weights) {
            for (x3, w3) in ax.nodes.iter().zip(&ax.weights) {
                q.points.push([p[0], p[1], *x3]);
                q.weights.push(w * w3);
            }
        }
        Ok(q)
    }

    /// Rule on the lateral surface `∂ω × (0, L)`.
    pub fn lateral_rule(&self, boundary_degree: usize, axial_degree: usize) -> Quadrature3 {
        let bq = boundary_quadrature(&self.section, boundary_degree);
        let ax = crate::poly::Rule1d::exact_for(axial_degree, 0.0, self.length);
        let mut q = Quadrature3::default();
        for (p, w) in bq.nodes.iter().zip(&bq.weights) {
            for (x3, w3) in ax.nodes.iter().zip(&ax.weights) {
                q.points.push([p[0], p[1], *x3]);
                q.weights.push(w * w3);
            }
        }
        q
    }

    /// Rule on the loaded end face `ω × {L}`.
    pub fn end_rule(&self, section_degree: usize) -> Result<Quadrature3> {
        let sq = section_quadrature(&self.section, section_degree.max(1))?;
        Ok(Quadrature3 {
            points: sq.nodes.iter().map(|p| [p[0], p[1], self.length]).collect(),
            weights: sq.weights,
        })
    }
}
