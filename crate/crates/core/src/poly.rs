//! Legendre polynomials, Gauss-Legendre rules and small monomial polynomials.

use std::f64::consts::PI;

/// Values, first and second derivatives of `P_0 ..= P_n` at `t`.
///
/// Uses the three-term recurrence for the values and the derivative
/// recurrence `P'_{k+1} = P'_{k-1} + (2k+1) P_k`, which stays exact at the
/// interval ends.
pub fn legendre_table(n: usize, t: f64) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; n + 1];
    out[0] = [1.0, 0.0, 0.0];
    if n == 0 {
        return out;
    }
    out[1] = [t, 1.0, 0.0];
    for k in 1..n {
        let kf = k as f64;
        let p = ((2.0 * kf + 1.0) * t * out[k][0] - kf * out[k - 1][0]) / (kf + 1.0);
        let dp = out[k - 1][1] + (2.0 * kf + 1.0) * out[k][0];
        let ddp = out[k - 1][2] + (2.0 * kf + 1.0) * out[k][1];
        out[k + 1] = [p, dp, ddp];
    }
    out
}

/// Gauss-Legendre rule with `n` points on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "a Gauss rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let tab = legendre_table(n, x);
            let p = tab[n][0];
            dp = tab[n][1];
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp_final = legendre_table(n, x)[n][1];
        if dp_final.is_finite() {
            dp = dp_final;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// A one-dimensional quadrature rule on an interval.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// `n`-point Gauss-Legendre rule mapped to `[a, b]`.
    pub fn gauss(n: usize, a: f64, b: f64) -> Self {
        let (t, w) = gauss_legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule1d {
            nodes: t.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|w| half * w).collect(),
        }
    }

    /// Smallest Gauss rule on `[a, b]` exact for polynomials of `degree`.
    pub fn exact_for(degree: usize, a: f64, b: f64) -> Self {
        Self::gauss(degree / 2 + 1, a, b)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Polynomial in one variable, stored by ascending monomial coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly1 {
    pub coeffs: Vec<f64>,
}

impl Poly1 {
    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly1 { coeffs }
    }

    /// `c x^p`.
    pub fn monomial(c: f64, p: usize) -> Self {
        let mut coeffs = vec![0.0; p + 1];
        coeffs[p] = c;
        Poly1 { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly1 {
        Poly1 {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    pub fn add_assign(&mut self, other: &Poly1) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values_at_endpoints() {
        let tab = legendre_table(8, 1.0);
        for (k, row) in tab.iter().enumerate() {
            let kf = k as f64;
            assert!((row[0] - 1.0).abs() < 1e-14);
            assert!((row[1] - kf * (kf + 1.0) / 2.0).abs() < 1e-12);
        }
        let tab = legendre_table(8, -1.0);
        for (k, row) in tab.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((row[0] - sign).abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_derivatives_match_differences() {
        let t = 0.37;
        let h = 1e-6;
        let tab = legendre_table(7, t);
        let tp = legendre_table(7, t + h);
        let tm = legendre_table(7, t - h);
        for k in 0..=7 {
            let d = (tp[k][0] - tm[k][0]) / (2.0 * h);
            let dd = (tp[k][1] - tm[k][1]) / (2.0 * h);
            assert!((d - tab[k][1]).abs() < 1e-7);
            assert!((dd - tab[k][2]).abs() < 1e-6);
        }
    }

    #[test]
    fn gauss_rule_exactness() {
        for n in 1..=30 {
            let rule = Rule1d::gauss(n, -1.0, 1.0);
            for p in 0..2 * n {
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                let got = rule.integrate(|x| x.powi(p as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} p={p} got={got}");
            }
        }
    }

    #[test]
    fn poly_eval_and_derivative() {
        let p = Poly1::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 12.0);
        assert_eq!(p.derivative().coeffs, vec![-2.0, 6.0]);
        assert_eq!(p.degree(), 2);
    }
}
