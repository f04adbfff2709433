//! Clamped integrated-Legendre basis on `(0, L)`.
//!
//! With `t = 2 x3 / L - 1` the functions are `φ_0 = (1 + t) / 2` and
//! `φ_k = (P_{k+1} - P_{k-1}) / (2k + 1)` for `k = 1 .. p - 1`. Every function
//! vanishes at `x3 = 0`, and together they span the polynomials of degree
//! at most `p` with that property.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::poly::{legendre_table, Rule1d};

#[derive(Debug, Clone, PartialEq)]
pub struct AxialBasis {
    pub length: f64,
    pub degree: usize,
}

impl AxialBasis {
    pub fn new(length: f64, degree: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!("beam length {length} must be positive")));
        }
        if degree == 0 {
            return Err(Error::InvalidArgument("axial degree must be at least 1".into()));
        }
        Ok(AxialBasis { length, degree })
    }

    pub fn dim(&self) -> usize {
        self.degree
    }

    /// Value and first three `x3`-derivatives of every basis function.
    pub fn eval(&self, x3: f64) -> Vec<[f64; 4]> {
        let p = self.degree;
        let s = 2.0 / self.length;
        let t = s * x3 - 1.0;
        let tab = legendre_table(p, t);
        let mut out = Vec::with_capacity(p);
        out.push([0.5 * (1.0 + t), 0.5 * s, 0.0, 0.0]);
        for k in 1..p {
            let c = 1.0 / (2.0 * k as f64 + 1.0);
            out.push([
                c * (tab[k + 1][0] - tab[k - 1][0]),
                s * tab[k][0],
                s * s * tab[k][1],
                s * s * s * tab[k][2],
            ]);
        }
        out
    }

    /// Value and derivatives of `Σ c_k φ_k` at `x3`.
    pub fn combine(&self, coeffs: &[f64], x3: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (c, row) in coeffs.iter().zip(self.eval(x3)) {
            for d in 0..4 {
                out[d] += c * row[d];
            }
        }
        out
    }

    /// Gauss rule on `(0, L)` exact for polynomials of `degree`.
    pub fn rule(&self, degree: usize) -> Rule1d {
        Rule1d::exact_for(degree, 0.0, self.length)
    }

    /// `∫ φ_i^{(a)} φ_j^{(b)} dx3` for derivative orders `a, b ≤ 2`.
    pub fn gram(&self, a: usize, b: usize) -> DMatrix<f64> {
        let rule = self.rule(2 * self.degree);
        let n = self.dim();
        let mut g = DMatrix::zeros(n, n);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let e = self.eval(x);
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] += w * e[i][a] * e[j][b];
                }
            }
        }
        g
    }

    /// Coefficients of the interpolant of `f` at the Gauss points of `(0, L)`.
    ///
    /// Exact when `f` is a polynomial of degree at most `p` vanishing at 0.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.dim();
        let rule = Rule1d::gauss(n, 0.0, self.length);
        let mut a = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (i, &x) in rule.nodes.iter().enumerate() {
            for (j, row) in self.eval(x).iter().enumerate() {
                a[(i, j)] = row[0];
            }
            rhs[i] = f(x);
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .expect("collocation matrix of a unisolvent basis is invertible");
        sol.iter().copied().collect()
    }
}
