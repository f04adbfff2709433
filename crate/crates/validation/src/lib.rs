//! Randomized inputs and brute-force oracles shared by the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beam_gamma::loads::{LoadSpec, Monomial, Poly3};
use beam_gamma::material::{check_moduli, MaterialModuli};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Moduli drawn until they satisfy the admissibility inequalities.
pub fn random_moduli(r: &mut ChaCha8Rng) -> MaterialModuli {
    loop {
        let mu = r.gen_range(0.2..3.0);
        let lambda = r.gen_range(-0.5 * mu..4.0);
        let tau2 = r.gen_range(-2.0..2.0);
        let tau1 = tau2 * tau2 / (lambda + mu) + r.gen_range(0.1..4.0);
        let m = MaterialModuli::new(mu, lambda, tau1, tau2, r.gen_range(0.2..3.0), r.gen_range(0.5..2.0));
        if check_moduli(&m).is_ok() {
            return m;
        }
    }
}

pub fn random_poly(r: &mut ChaCha8Rng, terms: usize, in_plane: u32, axial: u32) -> Poly3 {
    Poly3::from_terms(
        (0..terms)
            .map(|_| {
                let p1 = r.gen_range(0..=in_plane);
                let p2 = r.gen_range(0..=in_plane - p1);
                Monomial::new(r.gen_range(-1.0..1.0), p1, p2, r.gen_range(0..=axial))
            })
            .collect(),
    )
}

/// Body and lateral loads of in-plane and axial degree 2; end loads constant in `x3`.
pub fn random_loads(r: &mut ChaCha8Rng) -> LoadSpec {
    LoadSpec {
        body: std::array::from_fn(|_| random_poly(r, 2, 2, 2)),
        lateral: std::array::from_fn(|_| random_poly(r, 2, 2, 2)),
        end: std::array::from_fn(|_| random_poly(r, 2, 2, 0)),
    }
}

/// Minimum of a convex quadratic in three variables by coordinate descent
/// with parabolic line search. Uses only values of `f`.
pub fn brute_min(f: impl Fn([f64; 3]) -> f64) -> f64 {
    let mut x = [0.0; 3];
    for _ in 0..200_000 {
        let mut moved: f64 = 0.0;
        for i in 0..3 {
            let at = |t: f64| {
                let mut y = x;
                y[i] += t;
                f(y)
            };
            let (fm, f0, fp) = (at(-1.0), at(0.0), at(1.0));
            let curv = 0.5 * (fp + fm - 2.0 * f0);
            if curv <= 0.0 {
                continue;
            }
            let step = -0.25 * (fp - fm) / curv;
            x[i] += step;
            moved = moved.max(step.abs());
        }
        if moved < 1e-13 {
            break;
        }
    }
    f(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_min_of_a_coupled_quadratic() {
        // (x - 1)² + (x + y)² + 3 (z - y)² + z² + 2; the gradient vanishes at (0.7, -0.4, -0.3)
        let f = |v: [f64; 3]| {
            let [x, y, z] = v;
            (x - 1.0).powi(2) + (x + y).powi(2) + 3.0 * (z - y).powi(2) + z * z + 2.0
        };
        let (x, y, z) = (0.7, -0.4, -0.3);
        assert!((brute_min(f) - f([x, y, z])).abs() < 1e-12);
    }

    #[test]
    fn random_moduli_are_admissible() {
        let mut r = rng(3);
        for _ in 0..200 {
            assert!(check_moduli(&random_moduli(&mut r)).is_ok());
        }
    }

    #[test]
    fn rel_is_symmetric_and_zero_safe() {
        assert_eq!(rel(0.0, 0.0), 0.0);
        assert_eq!(rel(1.0, 2.0), rel(2.0, 1.0));
        assert_eq!(rel(1.0, 2.0), 0.5);
    }
}
