//! Scaled cross-sections: geometric properties, principal-frame normalization
//! and area/boundary quadrature.
//!
//! Every [`CrossSection`] is stored in its centroidal principal frame, so the
//! first moments and the product moment vanish (up to rounding). Polygons are
//! moved there by an explicit rigid motion which is recorded.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::Rule1d;

/// Highest polynomial degree a section rule may be asked for.
pub const MAX_QUADRATURE_DEGREE: usize = 50;

/// Shape descriptor in scaled units.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionShape {
    /// Axis-aligned rectangle of width `w` (along `x1`) and height `h`,
    /// centered at the origin.
    Rectangle { w: f64, h: f64 },
    /// Ellipse with semi-axes `a` (along `x1`) and `b`, centered at the origin.
    Ellipse { a: f64, b: f64 },
    /// Convex polygon, vertices counterclockwise.
    Polygon(Vec<[f64; 2]>),
}

/// Rigid motion taking user coordinates to the principal frame:
/// `y = Q(-angle) (x - translation)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidMotion {
    pub translation: [f64; 2],
    pub angle: f64,
}

impl RigidMotion {
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        let dx = x[0] - self.translation[0];
        let dy = x[1] - self.translation[1];
        [c * dx + s * dy, -s * dx + c * dy]
    }
}

/// A cross-section in its centroidal principal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub shape: SectionShape,
    pub area: f64,
    /// `∫ x2² da`
    pub j1: f64,
    /// `∫ x1² da`
    pub j2: f64,
    /// `∫ x2 da`
    pub s1: f64,
    /// `∫ x1 da`
    pub s2: f64,
    /// `∫ x1 x2 da`
    pub j12: f64,
    pub diameter: f64,
    /// Half-widths of the bounding box, used to normalize polynomial bases.
    pub half_extent: [f64; 2],
    /// Motion applied to the user-supplied coordinates.
    pub motion: RigidMotion,
}

/// Raw polygon moments `(A, ∫x1, ∫x2, ∫x1², ∫x2², ∫x1x2)` by the shoelace
/// family of formulas.
pub fn polygon_moments(v: &[[f64; 2]]) -> [f64; 6] {
    let n = v.len();
    let mut m = [0.0; 6];
    for i in 0..n {
        let [x0, y0] = v[i];
        let [x1, y1] = v[(i + 1) % n];
        let cr = x0 * y1 - x1 * y0;
        m[0] += cr;
        m[1] += (x0 + x1) * cr;
        m[2] += (y0 + y1) * cr;
        m[3] += (x0 * x0 + x0 * x1 + x1 * x1) * cr;
        m[4] += (y0 * y0 + y0 * y1 + y1 * y1) * cr;
        m[5] += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * cr;
    }
    [
        m[0] / 2.0,
        m[1] / 6.0,
        m[2] / 6.0,
        m[3] / 12.0,
        m[4] / 12.0,
        m[5] / 24.0,
    ]
}

fn check_convex_ccw(v: &[[f64; 2]]) -> Result<()> {
    let n = v.len();
    if n < 3 {
        return Err(Error::InvalidSection(format!(
            "a polygon needs at least 3 vertices, got {n}"
        )));
    }
    if v.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSection("non-finite vertex".into()));
    }
    let scale = v
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |a, &c| a.max(c.abs()))
        .max(1e-300);
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross < -1e-12 * scale * scale {
            return Err(Error::InvalidSection(
                "polygon is not convex or not counterclockwise".into(),
            ));
        }
    }
    Ok(())
}

fn max_pairwise(points: &[[f64; 2]]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
    }
    d
}

/// Builds a section and moves it to its centroidal principal frame.
pub fn build_section(shape: SectionShape) -> Result<CrossSection> {
    match shape {
        SectionShape::Rectangle { w, h } => {
            if !(w > 0.0 && h > 0.0) || !w.is_finite() || !h.is_finite() {
                return Err(Error::InvalidSection(format!(
                    "rectangle needs positive dimensions, got {w} x {h}"
                )));
            }
            Ok(CrossSection {
                shape: SectionShape::Rectangle { w, h },
                area: w * h,
                j1: w * h * h * h / 12.0,
                j2: h * w * w * w / 12.0,
                s1: 0.0,
                s2: 0.0,
                j12: 0.0,
                diameter: (w * w + h * h).sqrt(),
                half_extent: [w / 2.0, h / 2.0],
                motion: RigidMotion::default(),
            })
        }
        SectionShape::Ellipse { a, b } => {
            if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidSection(format!(
                    "ellipse needs positive semi-axes, got {a}, {b}"
                )));
            }
            Ok(CrossSection {
                shape: SectionShape::Ellipse { a, b },
                area: PI * a * b,
                j1: PI * a * b * b * b / 4.0,
                j2: PI * a * a * a * b / 4.0,
                s1: 0.0,
                s2: 0.0,
                j12: 0.0,
                diameter: 2.0 * a.max(b),
                half_extent: [a, b],
                motion: RigidMotion::default(),
            })
        }
        SectionShape::Polygon(vertices) => {
            check_convex_ccw(&vertices)?;
            let raw = polygon_moments(&vertices);
            let diameter = max_pairwise(&vertices);
            if !(raw[0] > 1e-14 * diameter * diameter) {
                return Err(Error::InvalidSection("polygon has zero area".into()));
            }
            let area = raw[0];
            let c = [raw[1] / area, raw[2] / area];
            let centered: Vec<[f64; 2]> =
                vertices.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
            let m = polygon_moments(&centered);
            let angle = 0.5 * (2.0 * m[5]).atan2(m[3] - m[4]);
            let motion = RigidMotion {
                translation: c,
                angle,
            };
            let principal: Vec<[f64; 2]> = vertices.iter().map(|&p| motion.apply(p)).collect();
            let pm = polygon_moments(&principal);
            let half_extent = [
                principal.iter().fold(0.0f64, |a, p| a.max(p[0].abs())),
                principal.iter().fold(0.0f64, |a, p| a.max(p[1].abs())),
            ];
            Ok(CrossSection {
                shape: SectionShape::Polygon(principal),
                area: pm[0],
                j1: pm[4],
                j2: pm[3],
                s1: pm[2],
                s2: pm[1],
                j12: pm[5],
                diameter,
                half_extent,
                motion,
            })
        }
    }
}

impl CrossSection {
    /// The same section homothetically scaled by `factor` about the centroid.
    pub fn scaled(&self, factor: f64) -> Result<CrossSection> {
        let shape = match &self.shape {
            SectionShape::Rectangle { w, h } => SectionShape::Rectangle {
                w: factor * w,
                h: factor * h,
            },
            SectionShape::Ellipse { a, b } => SectionShape::Ellipse {
                a: factor * a,
                b: factor * b,
            },
            SectionShape::Polygon(v) => {
                SectionShape::Polygon(v.iter().map(|p| [factor * p[0], factor * p[1]]).collect())
            }
        };
        build_section(shape)
    }

    /// Whether `(x1, x2)` lies in the closed section (with a small tolerance).
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let tol = 1e-12 * self.diameter;
        match &self.shape {
            SectionShape::Rectangle { w, h } => {
                x[0].abs() <= w / 2.0 + tol && x[1].abs() <= h / 2.0 + tol
            }
            SectionShape::Ellipse { a, b } => (x[0] / a).powi(2) + (x[1] / b).powi(2) <= 1.0 + tol,
            SectionShape::Polygon(v) => (0..v.len()).all(|i| {
                let p = v[i];
                let q = v[(i + 1) % v.len()];
                (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]) >= -tol * self.diameter
            }),
        }
    }

    /// Perimeter of the section boundary.
    pub fn perimeter(&self) -> f64 {
        boundary_quadrature(self, 2).weights.iter().sum()
    }
}

/// Nodes and positive weights on a section.
#[derive(Debug, Clone)]
pub struct SectionQuadrature {
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl SectionQuadrature {
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Area rule exact for bivariate polynomials of total degree `degree`.
///
/// Rectangles use a tensor Gauss rule, ellipses a polar-mapped Gauss rule
/// (Gauss in the radius, uniform in the angle), polygons a Gauss rule on the
/// fan of triangles joining the centroid to each edge.
pub fn section_quadrature(cs: &CrossSection, degree: usize) -> Result<SectionQuadrature> {
    if degree == 0 || degree > MAX_QUADRATURE_DEGREE {
        return Err(Error::QuadratureDegree(degree));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match &cs.shape {
        SectionShape::Rectangle { w, h } => {
            let rx = Rule1d::exact_for(degree, -w / 2.0, w / 2.0);
            let ry = Rule1d::exact_for(degree, -h / 2.0, h / 2.0);
            for (x, wx) in rx.nodes.iter().zip(&rx.weights) {
                for (y, wy) in ry.nodes.iter().zip(&ry.weights) {
                    nodes.push([*x, *y]);
                    weights.push(wx * wy);
                }
            }
        }
        SectionShape::Ellipse { a, b } => {
            let rr = Rule1d::exact_for(degree + 1, 0.0, 1.0);
            let n_theta = degree + 1;
            let dtheta = 2.0 * PI / n_theta as f64;
            for (r, wr) in rr.nodes.iter().zip(&rr.weights) {
                for k in 0..n_theta {
                    let (s, c) = (k as f64 * dtheta).sin_cos();
                    nodes.push([a * r * c, b * r * s]);
                    weights.push(a * b * r * wr * dtheta);
                }
            }
        }
        SectionShape::Polygon(v) => {
            let rs = Rule1d::exact_for(degree + 1, 0.0, 1.0);
            let rt = Rule1d::exact_for(degree, 0.0, 1.0);
            for i in 0..v.len() {
                let p = v[i];
                let q = v[(i + 1) % v.len()];
                let det = p[0] * q[1] - p[1] * q[0];
                if det <= 0.0 {
                    continue;
                }
                for (s, ws) in rs.nodes.iter().zip(&rs.weights) {
                    for (t, wt) in rt.nodes.iter().zip(&rt.weights) {
                        let x = s * ((1.0 - t) * p[0] + t * q[0]);
                        let y = s * ((1.0 - t) * p[1] + t * q[1]);
                        nodes.push([x, y]);
                        weights.push(ws * wt * s * det);
                    }
                }
            }
        }
    }
    Ok(SectionQuadrature {
        nodes,
        weights,
        degree,
    })
}

/// Nodes and arc-length weights on the section boundary `∂ω`.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl BoundaryQuadrature {
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }
}

/// Boundary rule: per-edge Gauss rules for polygonal sections (exact to
/// `degree`), a uniform parametric rule for ellipses (exact for circles,
/// spectrally accurate otherwise).
pub fn boundary_quadrature(cs: &CrossSection, degree: usize) -> BoundaryQuadrature {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut edges = |v: &[[f64; 2]]| {
        let rule = Rule1d::exact_for(degree, 0.0, 1.0);
        for i in 0..v.len() {
            let p = v[i];
            let q = v[(i + 1) % v.len()];
            let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                weights.push(w * len);
            }
        }
    };
    match &cs.shape {
        SectionShape::Rectangle { w, h } => {
            let (a, b) = (w / 2.0, h / 2.0);
            edges(&[[-a, -b], [a, -b], [a, b], [-a, b]]);
        }
        SectionShape::Polygon(v) => edges(v),
        SectionShape::Ellipse { a, b } => {
            let n = 4 * (degree + 1) + 256;
            let dtheta = 2.0 * PI / n as f64;
            for k in 0..n {
                let (s, c) = (k as f64 * dtheta).sin_cos();
                nodes.push([a * c, b * s]);
                weights.push(((a * s).powi(2) + (b * c).powi(2)).sqrt() * dtheta);
            }
        }
    }
    BoundaryQuadrature { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> CrossSection {
        build_section(SectionShape::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])).unwrap()
    }

    #[test]
    fn rectangle_closed_forms() {
        let cs = build_section(SectionShape::Rectangle { w: 1.0, h: 1.0 }).unwrap();
        assert_eq!(cs.area, 1.0);
        assert_eq!(cs.j1, 1.0 / 12.0);
        assert_eq!(cs.j2, 1.0 / 12.0);
    }

    #[test]
    fn disk_closed_forms() {
        let cs = build_section(SectionShape::Ellipse { a: 1.0, b: 1.0 }).unwrap();
        assert!((cs.area - PI).abs() < 1e-15);
        assert!((cs.j1 - PI / 4.0).abs() < 1e-15);
        assert!((cs.j2 - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_is_centered_and_principal() {
        let cs = triangle();
        let scale = cs.area * cs.diameter * cs.diameter;
        assert!((cs.area - 0.5).abs() < 1e-15);
        assert!(cs.s1.abs() <= 1e-12 * scale);
        assert!(cs.s2.abs() <= 1e-12 * scale);
        assert!(cs.j12.abs() <= 1e-12 * scale);
        // principal moments 1/24 and 1/72
        let (lo, hi) = (cs.j1.min(cs.j2), cs.j1.max(cs.j2));
        assert!((hi - 1.0 / 24.0).abs() < 1e-14);
        assert!((lo - 1.0 / 72.0).abs() < 1e-14);
        assert!((cs.motion.translation[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(build_section(SectionShape::Rectangle { w: 0.0, h: 1.0 }).is_err());
        assert!(build_section(SectionShape::Ellipse { a: 1.0, b: -1.0 }).is_err());
        assert!(build_section(SectionShape::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
            .is_err());
        // clockwise
        assert!(build_section(SectionShape::Polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]))
            .is_err());
        // non-convex arrowhead
        let arrow = vec![[0.0, 0.0], [2.0, 1.0], [0.0, 2.0], [0.5, 1.0]];
        assert!(build_section(SectionShape::Polygon(arrow)).is_err());
    }

    #[test]
    fn square_gauss_rule() {
        let cs = build_section(SectionShape::Rectangle { w: 1.0, h: 1.0 }).unwrap();
        let q = section_quadrature(&cs, 3).unwrap();
        assert_eq!(q.len(), 4);
        assert!((q.integrate(|_, _| 1.0) - 1.0).abs() < 1e-15);
        assert!((q.integrate(|x, _| x * x) - 1.0 / 12.0).abs() < 1e-15);
        assert!(q.integrate(|x, _| x).abs() < 1e-16);
        assert!(section_quadrature(&cs, 51).is_err());
        assert!(section_quadrature(&cs, 0).is_err());
    }

    #[test]
    fn triangle_rule_matches_analytic_moment() {
        // reference triangle before normalization: ∫ x^2 y = 2! 1! / 5! = 1/60
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let cs = triangle();
        let q = section_quadrature(&cs, 3).unwrap();
        let m = cs.motion;
        let (s, c) = m.angle.sin_cos();
        let got = q.integrate(|y1, y2| {
            let x = m.translation[0] + c * y1 - s * y2;
            let y = m.translation[1] + s * y1 + c * y2;
            x * x * y
        });
        assert!((got - 1.0 / 60.0).abs() < 1e-14, "{got}");
        assert_eq!(polygon_moments(&v)[0], 0.5);
    }

    #[test]
    fn weights_are_positive_and_sum_to_area() {
        let shapes = [
            SectionShape::Rectangle { w: 2.0, h: 0.5 },
            SectionShape::Ellipse { a: 1.5, b: 0.4 },
            SectionShape::Polygon(vec![[0.0, 0.0], [3.0, 0.2], [2.5, 1.5], [0.3, 1.2]]),
        ];
        for shape in shapes {
            let cs = build_section(shape).unwrap();
            for degree in [1, 4, 9, 20] {
                let q = section_quadrature(&cs, degree).unwrap();
                assert!(q.weights.iter().all(|&w| w > 0.0));
                let total: f64 = q.weights.iter().sum();
                assert!((total - cs.area).abs() <= 1e-13 * cs.area);
            }
        }
    }

    #[test]
    fn quadrature_recovers_principal_normalization() {
        let cs = build_section(SectionShape::Polygon(vec![
            [0.0, 0.0],
            [3.0, 0.2],
            [2.5, 1.5],
            [0.3, 1.2],
        ]))
        .unwrap();
        let q = section_quadrature(&cs, 4).unwrap();
        let scale = cs.area * cs.diameter * cs.diameter;
        assert!(q.integrate(|x, _| x).abs() <= 1e-12 * scale);
        assert!(q.integrate(|_, y| y).abs() <= 1e-12 * scale);
        assert!(q.integrate(|x, y| x * y).abs() <= 1e-12 * scale);
        assert!((q.integrate(|_, y| y * y) - cs.j1).abs() <= 1e-12 * scale);
        assert!((q.integrate(|x, _| x * x) - cs.j2).abs() <= 1e-12 * scale);
    }

    #[test]
    fn ellipse_rule_is_exact_for_monomials() {
        let cs = build_section(SectionShape::Ellipse { a: 1.3, b: 0.6 }).unwrap();
        let q = section_quadrature(&cs, 8).unwrap();
        // ∫ x^4 over ellipse = π a^5 b / 8
        let exact = PI * 1.3f64.powi(5) * 0.6 / 8.0;
        assert!((q.integrate(|x, _| x.powi(4)) - exact).abs() < 1e-13);
        // ∫ x^2 y^2 = π a^3 b^3 / 24
        let exact = PI * 1.3f64.powi(3) * 0.6f64.powi(3) / 24.0;
        assert!((q.integrate(|x, y| x * x * y * y) - exact).abs() < 1e-14);
    }

    #[test]
    fn boundary_rules() {
        let sq = build_section(SectionShape::Rectangle { w: 1.0, h: 1.0 }).unwrap();
        assert!((sq.perimeter() - 4.0).abs() < 1e-15);
        let bq = boundary_quadrature(&sq, 4);
        // each of the four edges contributes ∫ x^2 ds: two at |x| = 1/2, two with ∫ x^2 = 1/12
        assert!((bq.integrate(|x, _| x * x) - (0.5 + 1.0 / 6.0)).abs() < 1e-15);
        let disk = build_section(SectionShape::Ellipse { a: 2.0, b: 2.0 }).unwrap();
        assert!((disk.perimeter() - 4.0 * PI).abs() < 1e-13);
        // Ramanujan-quality check: ellipse with a = 1, b = 0 limit is not allowed, use a mild one
        let ell = build_section(SectionShape::Ellipse { a: 1.0, b: 0.5 }).unwrap();
        assert!((ell.perimeter() - 4.844_224_110_273_838).abs() < 1e-12);
    }

    #[test]
    fn translation_and_rotation_invariance() {
        let base = vec![[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.5, 1.4]];
        let a = build_section(SectionShape::Polygon(base.clone())).unwrap();
        let (s, c) = 0.7f64.sin_cos();
        let moved: Vec<[f64; 2]> = base
            .iter()
            .map(|p| [c * p[0] - s * p[1] + 5.0, s * p[0] + c * p[1] - 3.0])
            .collect();
        let b = build_section(SectionShape::Polygon(moved)).unwrap();
        assert!((a.area - b.area).abs() < 1e-12);
        assert!(((a.j1 + a.j2) - (b.j1 + b.j2)).abs() < 1e-12);
    }

    #[test]
    fn scaled_section_moments() {
        let cs = build_section(SectionShape::Rectangle { w: 1.0, h: 2.0 }).unwrap();
        let small = cs.scaled(0.1).unwrap();
        assert!((small.area - 0.01 * cs.area).abs() < 1e-16);
        assert!((small.j1 - 1e-4 * cs.j1).abs() < 1e-17);
    }
}
