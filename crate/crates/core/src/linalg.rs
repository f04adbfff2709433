//! Dense symmetric positive definite solves with pivot reporting,
//! diagonal equilibration and a condition estimate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor stored row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `a = L Lᵀ`; reports the first non-positive pivot.
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "matrix must be square");
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..=j {
                let (rj, rk) = (&l[j * n..j * n + k], &l[k * n..k * n + k]);
                let s: f64 = rj.iter().zip(rk).map(|(x, y)| x * y).sum();
                let v = a[(j, k)] - s;
                if k == j {
                    if !(v > 0.0) {
                        return Err(Error::Factorization { index: j, pivot: v });
                    }
                    l[j * n + j] = v.sqrt();
                } else {
                    l[j * n + k] = v / l[k * n + k];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Smallest squared diagonal entry of the factor.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i].powi(2))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut y = b.clone();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

fn start_vector(n: usize) -> DVector<f64> {
    let v = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract());
    let norm = v.norm();
    v / norm
}

/// `λ_max / λ_min` of an SPD matrix, by power iteration on `a` and on
/// `a⁻¹` (through its factor).
pub fn condition_estimate(a: &DMatrix<f64>, chol: &Cholesky, iterations: usize) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    let mut v = start_vector(n);
    let mut lmax = 0.0;
    for _ in 0..iterations {
        let w = a * &v;
        lmax = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        v = w / norm;
    }
    let mut v = start_vector(n);
    let mut inv_max = 0.0;
    for _ in 0..iterations {
        let w = chol.solve(&v);
        inv_max = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        v = w / norm;
    }
    lmax * inv_max
}

/// Outcome of [`solve_spd`].
#[derive(Debug, Clone)]
pub struct SpdSolution {
    pub x: DVector<f64>,
    /// `‖Ã x̃ − b̃‖ / ‖b̃‖` on the equilibrated system (0 when `b = 0`).
    pub residual: f64,
    /// Condition estimate of the equilibrated matrix.
    pub cond_estimate: f64,
    pub min_pivot: f64,
}

/// Solves `a x = b` after symmetric diagonal scaling `D a D`,
/// with one step of iterative refinement.
pub fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<SpdSolution> {
    let n = a.nrows();
    let mut d = DVector::zeros(n);
    for i in 0..n {
        let aii = a[(i, i)];
        if !(aii > 0.0) {
            return Err(Error::Factorization { index: i, pivot: aii });
        }
        d[i] = 1.0 / aii.sqrt();
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| d[i] * a[(i, j)] * d[j]);
    let bs = b.component_mul(&d);
    let chol = Cholesky::factor(&scaled)?;
    let mut y = chol.solve(&bs);
    let r = &bs - &scaled * &y;
    y += chol.solve(&r);
    let bnorm = bs.norm();
    let residual = if bnorm > 0.0 {
        (&bs - &scaled * &y).norm() / bnorm
    } else {
        0.0
    };
    let cond_estimate = condition_estimate(&scaled, &chol, 60);
    Ok(SpdSolution {
        x: y.component_mul(&d),
        residual,
        cond_estimate,
        min_pivot: chol.min_pivot(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let s = solve_spd(&a, &b).unwrap();
        assert!((&a * &s.x - &b).norm() < 1e-14);
        assert!(s.residual < 1e-15);
        let eig = a.clone().symmetric_eigen().eigenvalues;
        let exact = eig.max() / eig.min();
        let chol = Cholesky::factor(&a).unwrap();
        assert!((condition_estimate(&a, &chol, 200) - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn reports_failing_pivot() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match Cholesky::factor(&a) {
            Err(Error::Factorization { index, pivot }) => {
                assert_eq!(index, 1);
                assert!((pivot + 3.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scalar_system() {
        let a = DMatrix::from_element(1, 1, 2.0);
        let b = DVector::from_element(1, 1.0);
        let s = solve_spd(&a, &b).unwrap();
        assert_eq!(s.x[0], 0.5);
    }
}
