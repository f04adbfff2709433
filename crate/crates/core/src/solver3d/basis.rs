use std::sync::OnceLock;

use crate::axial::AxialBasis;
use crate::error::{Error, Result};
use crate::poly::legendre_table;
use crate::section::{CrossSection, SectionShape};

use super::assemble::NormGrams;

/// In-plane factor of a vector basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InPlaneMode {
    /// `P_m(x1/h1) P_n(x2/h2)` in displacement component `comp`.
    Scalar { comp: usize, m: usize, n: usize },
    /// The in-plane rotation `(-x2, x1, 0)`.
    Rotation,
}

/// Values and in-plane derivatives of the three components of a mode.
///
/// `d[c] = [∂1, ∂2]`, `dd[c] = [∂11, ∂12, ∂22]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModeJet {
    pub v: [f64; 3],
    pub d: [[f64; 2]; 3],
    pub dd: [[f64; 3]; 3],
}

/// Tensor-product Ritz basis: scaled Legendre polynomials across the section
/// times the clamped axial basis.
///
/// The `u1` mode `P_0(x1) P_1(x2)` is replaced by the in-plane rotation, which
/// spans the same space but is an exact null vector of the in-plane strain.
#[derive(Debug, Clone)]
pub struct RitzBasis3D {
    pub section: CrossSection,
    pub axial: AxialBasis,
    pub p1: usize,
    pub p2: usize,
    modes: Vec<InPlaneMode>,
    pub(crate) norm_grams: OnceLock<NormGrams>,
}

impl PartialEq for RitzBasis3D {
    fn eq(&self, other: &Self) -> bool {
        self.section == other.section
            && self.axial == other.axial
            && self.p1 == other.p1
            && self.p2 == other.p2
    }
}

impl RitzBasis3D {
    pub fn new(section: CrossSection, length: f64, degrees: [usize; 3]) -> Result<Self> {
        let [p1, p2, p3] = degrees;
        if p1 > 12 || p2 > 12 {
            return Err(Error::QuadratureBudget(format!(
                "in-plane degrees ({p1}, {p2}) exceed 12"
            )));
        }
        let axial = AxialBasis::new(length, p3)?;
        let mut modes = Vec::new();
        let rotate = p2 >= 1 && p1 >= 1;
        for comp in 0..3 {
            for m in 0..=p1 {
                for n in 0..=p2 {
                    if rotate && comp == 0 && m == 0 && n == 1 {
                        continue;
                    }
                    modes.push(InPlaneMode::Scalar { comp, m, n });
                }
            }
        }
        if rotate {
            modes.push(InPlaneMode::Rotation);
        }
        Ok(RitzBasis3D {
            section,
            axial,
            p1,
            p2,
            modes,
            norm_grams: OnceLock::new(),
        })
    }

    pub fn length(&self) -> f64 {
        self.axial.length
    }

    pub fn modes(&self) -> &[InPlaneMode] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn n_axial(&self) -> usize {
        self.axial.dim()
    }

    pub fn dim(&self) -> usize {
        self.n_modes() * self.n_axial()
    }

    pub fn dof(&self, mode: usize, k: usize) -> usize {
        mode * self.n_axial() + k
    }

    pub fn mode_index(&self, mode: InPlaneMode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// Total in-plane polynomial degree of the basis.
    pub fn in_plane_degree(&self) -> usize {
        (self.p1 + self.p2).max(1)
    }

    /// Section rule degree used for bilinear forms.
    pub fn section_degree(&self) -> usize {
        match self.section.shape {
            SectionShape::Rectangle { .. } => 2 * self.p1.max(self.p2).max(1) + 2,
            _ => 2 * self.in_plane_degree() + 2,
        }
    }

    /// Axial rule degree used for bilinear forms.
    pub fn axial_degree(&self) -> usize {
        2 * self.axial.degree + 2
    }

    /// Jets of every mode at `(x1, x2)`.
    pub fn mode_jets(&self, x1: f64, x2: f64) -> Vec<ModeJet> {
        let [h1, h2] = self.section.half_extent;
        let lx = legendre_table(self.p1, x1 / h1);
        let ly = legendre_table(self.p2, x2 / h2);
        self.modes
            .iter()
            .map(|mode| match *mode {
                InPlaneMode::Scalar { comp, m, n } => {
                    let (a, b) = (lx[m], ly[n]);
                    let mut j = ModeJet::default();
                    j.v[comp] = a[0] * b[0];
                    j.d[comp] = [a[1] / h1 * b[0], a[0] * b[1] / h2];
                    j.dd[comp] = [
                        a[2] / (h1 * h1) * b[0],
                        a[1] * b[1] / (h1 * h2),
                        a[0] * b[2] / (h2 * h2),
                    ];
                    j
                }
                InPlaneMode::Rotation => ModeJet {
                    v: [-x2, x1, 0.0],
                    d: [[0.0, -1.0], [1.0, 0.0], [0.0, 0.0]],
                    dd: [[0.0; 3]; 3],
                },
            })
            .collect()
    }
}
