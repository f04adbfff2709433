//! ε-sweeps comparing the discrete 3D minimizers with the limit beam.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::energy::elastic_energy_eps;
use crate::error::{Error, Result};
use crate::field::{BeamDomain, DisplacementField, Jet, Point};
use crate::kinematics::{recovery_field, unscale_displacement, RecoveryField, Rescaled, TimoshenkoField};
use crate::loads::{load_potential_3d, reduce_loads, LoadSpec};
use crate::material::{check_moduli, MaterialModuli};
use crate::section::CrossSection;
use crate::solver1d::{energy_1d, limit_potential_3d, solve_timoshenko, BeamStiffness};
use crate::solver3d::{
    embed_timoshenko, load_vector, norms, project, solve_min, DisplacementField3D, EnergyOperator,
    RitzBasis3D, CONDITION_LIMIT,
};

/// Header of `report.csv`.
pub const REPORT_HEADER: &str =
    "eps,energy3d,energy1d,gap,h1_dist,s11,s12,s22,penalty,recovery_energy,cond_est";

/// Header of `rates.csv`.
pub const RATES_HEADER: &str = "quantity,slope,points";

/// Residual allowed when projecting the recovery field into the Ritz space.
pub const PROJECTION_TOLERANCE: f64 = 1e-12;

pub fn default_eps_grid() -> Vec<f64> {
    (1..=5).map(|k| 10f64.powf(-0.5 * k as f64)).collect()
}

/// Everything a sweep needs. Section, length and loads live on the scaled
/// cylinder.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub moduli: MaterialModuli,
    pub section: CrossSection,
    pub length: f64,
    pub eps_r: f64,
    pub loads: LoadSpec,
    /// `[p1, p2, p3]`; the limit problem uses the axial degree `p3` too.
    pub degrees: [usize; 3],
    pub eps_grid: Vec<f64>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_moduli(&self.moduli)?;
        if !(self.eps_r > 0.0 && self.eps_r < 1.0) {
            return Err(Error::InvalidArgument(format!("eps_r = {} must lie in (0, 1)", self.eps_r)));
        }
        check_grid(&self.eps_grid)?;
        let [p1, p2, p3] = self.degrees;
        if p1 < 2 || p2 < 2 || p3 < 2 {
            return Err(Error::IncompatibleBasis(format!(
                "degrees {:?}: the recovery corrector needs at least 2 in every direction",
                self.degrees
            )));
        }
        self.loads.validate()
    }
}

/// Checks that an ε grid is non-empty, positive and strictly decreasing.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty eps grid".into()));
    }
    if grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument("eps grid values must be positive".into()));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps grid must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub energy3d: f64,
    pub energy1d: f64,
    /// `|Π^ε(u^ε_min) − Π(u_min)|`.
    pub gap: f64,
    pub h1_dist: f64,
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
    pub penalty: f64,
    pub recovery_energy: f64,
    pub cond_est: f64,
    /// Relative residual of the equilibrated solve; not written to CSV.
    pub residual: f64,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        let v = [
            self.eps,
            self.energy3d,
            self.energy1d,
            self.gap,
            self.h1_dist,
            self.s11,
            self.s12,
            self.s22,
            self.penalty,
            self.recovery_energy,
            self.cond_est,
        ];
        v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
    }
}

/// Log-log slope of one column against ε.
#[derive(Debug, Clone, PartialEq)]
pub struct Rate {
    pub quantity: &'static str,
    /// `None` when fewer than two rows clear the noise floor.
    pub slope: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
    pub rates: Vec<Rate>,
    pub limit: TimoshenkoField,
    pub energy1d: f64,
    /// `‖u_min‖_{H¹}` of the embedded limit minimizer.
    pub limit_h1: f64,
    /// The 3D minimizer at the smallest ε.
    pub last_minimizer: DisplacementField3D,
}

impl ConvergenceReport {
    pub fn report_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{REPORT_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(s, "{}", r.csv_line()).unwrap();
        }
        s
    }

    pub fn rates_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{RATES_HEADER}").unwrap();
        for r in &self.rates {
            match r.slope {
                Some(v) => writeln!(s, "{},{v:.16e},{}", r.quantity, r.points).unwrap(),
                None => writeln!(s, "{},nan,{}", r.quantity, r.points).unwrap(),
            }
        }
        s
    }

    pub fn rate(&self, quantity: &str) -> Option<&Rate> {
        self.rates.iter().find(|r| r.quantity == quantity)
    }

    /// `|Π^ε(u^ε_min) − Π(u_min)| / |Π(u_min)|` per row.
    pub fn relative_gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| relative(r.gap, self.energy1d)).collect()
    }
}

fn relative(v: f64, reference: f64) -> f64 {
    if reference != 0.0 {
        v / reference.abs()
    } else {
        v
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn fit_column(rows: &[SweepRow], quantity: &'static str, reference: f64, get: impl Fn(&SweepRow) -> f64) -> Rate {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| get(r) > 100.0 * r.residual * reference)
        .map(|r| (r.eps, get(r)))
        .collect();
    let slope = fit_loglog(&pts);
    Rate {
        quantity,
        slope,
        points: if slope.is_some() { pts.len() } else { 0 },
    }
}

/// Recovery field blended to satisfy the clamp:
/// `u + ε² χ(x3) û` with `χ = 1 − (1 − x3/L)^k`.
#[derive(Debug, Clone)]
pub struct ClampedRecovery {
    pub recovery: RecoveryField,
    pub power: i32,
}

impl ClampedRecovery {
    /// Chooses `k` so that `χ û` stays within axial degree `p3`.
    pub fn new(f: &TimoshenkoField, eps: f64, m: &MaterialModuli, p3: usize) -> Self {
        let d = corrector_axial_degree(f);
        ClampedRecovery {
            recovery: recovery_field(f, eps, m),
            power: p3.saturating_sub(d).max(1) as i32,
        }
    }

    fn chi(&self, x3: f64) -> [f64; 3] {
        let l = self.recovery.base.basis.length;
        let k = self.power;
        let s = 1.0 - x3 / l;
        let kf = k as f64;
        [
            1.0 - s.powi(k),
            kf * s.powi(k - 1) / l,
            if k >= 2 { -kf * (kf - 1.0) * s.powi(k - 2) / (l * l) } else { 0.0 },
        ]
    }
}

/// Polynomial degree in x3 of the corrector, read off the coefficients of
/// `u3`, `ψ1`, `ψ2`.
fn corrector_axial_degree(f: &TimoshenkoField) -> usize {
    let mut d = 0;
    for c in &f.comps[2..] {
        let scale = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        // basis function k has degree k + 1, its derivative degree k
        if let Some(k) = c.iter().rposition(|v| v.abs() > 1e-13 * scale) {
            d = d.max(k);
        }
    }
    d
}

impl DisplacementField for ClampedRecovery {
    fn jet(&self, x: Point) -> Jet {
        let base = self.recovery.base.jet(x);
        let c = self.recovery.corrector_jet(x);
        let [chi, dchi, ddchi] = self.chi(x[2]);
        let mut g = Jet::default();
        let ch = c.hess.expect("corrector carries a Hessian");
        let mut h = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            g.value[i] = chi * c.value[i];
            for j in 0..3 {
                g.grad[i][j] = chi * c.grad[i][j];
                for k in 0..3 {
                    h[i][j][k] = chi * ch[i][j][k];
                }
            }
            g.grad[i][2] += dchi * c.value[i];
            for j in 0..3 {
                h[i][j][2] += dchi * c.grad[i][j];
                h[i][2][j] += dchi * c.grad[i][j];
            }
            h[i][2][2] += ddchi * c.value[i];
        }
        g.hess = Some(h);
        let e = self.recovery.eps;
        base.axpy(e * e, &g)
    }
}

/// Runs the sweep. Per-ε solves run in parallel; rows come back in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let m = &cfg.moduli;
    let basis = Arc::new(RitzBasis3D::new(cfg.section.clone(), cfg.length, cfg.degrees)?);
    let st = BeamStiffness::new(m, &cfg.section, cfg.eps_r, cfg.length)?;
    let rl = reduce_loads(&cfg.loads, &cfg.section, cfg.length)?;
    let limit = solve_timoshenko(&st, &rl, &basis.axial)?;
    let energy1d = energy_1d(&limit, &st, &rl).total;
    let u_min = embed_timoshenko(basis.clone(), &limit)?;
    let zero = DisplacementField3D::zero(basis.clone());
    let limit_h1 = norms(&u_min, &zero)?.h1;
    let op = EnergyOperator::new(basis.clone(), m, cfg.eps_r)?;
    let f = load_vector(&basis, &cfg.loads)?;

    let solved: Vec<(SweepRow, DisplacementField3D)> = cfg
        .eps_grid
        .par_iter()
        .map(|&eps| -> Result<_> {
            let sys = op.system(eps, f.clone())?;
            let sol = solve_min(&sys)?;
            if sol.ill_conditioned() {
                return Err(Error::IllConditioned {
                    estimate: sol.diagnostics.cond_estimate,
                    limit: CONDITION_LIMIT,
                });
            }
            let u = DisplacementField3D::new(basis.clone(), sol.coeffs.clone());
            let d = norms(&u, &u_min)?;
            let s = norms(&u, &zero)?;
            let rec = ClampedRecovery::new(&limit, eps, m, cfg.degrees[2]);
            let (rec_proj, residual) = project(basis.clone(), &rec)?;
            if residual > PROJECTION_TOLERANCE {
                return Err(Error::IncompatibleBasis(format!(
                    "recovery field not representable: projection residual {residual:e}"
                )));
            }
            let row = SweepRow {
                eps,
                energy3d: sol.energy,
                energy1d,
                gap: (sol.energy - energy1d).abs(),
                h1_dist: d.h1,
                s11: s.strain[0],
                s12: s.strain[3],
                s22: s.strain[1],
                penalty: sys.penalty_energy(&sol.coeffs),
                recovery_energy: sys.energy(&rec_proj.coeffs),
                cond_est: sol.diagnostics.cond_estimate,
                residual: sol.diagnostics.residual,
            };
            Ok((row, u))
        })
        .collect::<Result<_>>()?;

    let (rows, mut fields): (Vec<_>, Vec<_>) = solved.into_iter().unzip();
    let e_ref = energy1d.abs();
    let rates = vec![
        fit_column(&rows, "gap", e_ref, |r| r.gap),
        fit_column(&rows, "h1_dist", limit_h1, |r| r.h1_dist),
        fit_column(&rows, "s11", limit_h1, |r| r.s11),
        fit_column(&rows, "s12", limit_h1, |r| r.s12),
        fit_column(&rows, "s22", limit_h1, |r| r.s22),
        fit_column(&rows, "recovery_gap", e_ref, |r| (r.recovery_energy - r.energy1d).abs()),
    ];
    Ok(ConvergenceReport {
        rows,
        rates,
        limit,
        energy1d,
        limit_h1,
        last_minimizer: fields.pop().expect("grid is non-empty"),
    })
}

/// The problem data a liminf probe is evaluated against.
#[derive(Debug, Clone)]
pub struct ProbeSetup {
    pub moduli: MaterialModuli,
    pub domain: BeamDomain,
    pub eps_r: f64,
    pub loads: LoadSpec,
    /// `[in-plane, axial]` polynomial degree of the probed fields; sets the
    /// quadrature.
    pub field_degree: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub eps: f64,
    /// `Π^ε(u^ε)`.
    pub energy_eps: f64,
    /// `Π(u)`.
    pub energy_limit: f64,
    /// `Π^ε(u^ε) < Π(u) − tol`.
    pub flagged: bool,
}

/// `Π^ε(u)` by direct quadrature of the densities.
pub fn potential_eps(setup: &ProbeSetup, u: &dyn DisplacementField, eps: f64) -> Result<f64> {
    let [sd, ad] = setup.field_degree;
    let rule = setup.domain.volume_rule(2 * sd + 2, 2 * ad + 2)?;
    let w = elastic_energy_eps(u, eps, setup.eps_r, &setup.moduli, &rule)?;
    Ok(w.total() - load_potential_3d(u, &setup.loads, &setup.domain, setup.field_degree)?)
}

/// Tabulates `Π^ε(u^ε)` against `Π(u)` along a family `u^ε → u`.
pub fn liminf_probe<F, U>(
    setup: &ProbeSetup,
    limit: &TimoshenkoField,
    family: F,
    eps_grid: &[f64],
    tol: f64,
) -> Result<Vec<ProbeRow>>
where
    F: Fn(f64) -> U,
    U: DisplacementField,
{
    check_grid(eps_grid)?;
    let energy_limit = limit_potential_3d(limit, &setup.moduli, setup.eps_r, &setup.domain, &setup.loads)?;
    eps_grid
        .iter()
        .map(|&eps| {
            let energy_eps = potential_eps(setup, &family(eps), eps)?;
            Ok(ProbeRow {
                eps,
                energy_eps,
                energy_limit,
                flagged: energy_eps < energy_limit - tol,
            })
        })
        .collect()
}

/// The real-domain displacement `x^r ↦ (R^{ε_r})⁻¹ u(R^{1/ε_r} x^r)`.
pub fn unscale_minimizer(u: DisplacementField3D, eps_r: f64) -> Rescaled<DisplacementField3D> {
    unscale_displacement(u, eps_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axial::AxialBasis;
    use crate::kinematics::Component;
    use crate::loads::Poly3;
    use crate::section::{build_section, SectionShape};

    fn cantilever(loads: LoadSpec, degrees: [usize; 3], grid: Vec<f64>) -> SweepConfig {
        SweepConfig {
            moduli: MaterialModuli::new(1.0, 1.0, 3.0, 1.0, 1.0, 1.0),
            section: build_section(SectionShape::Rectangle { w: 1.0, h: 1.0 }).unwrap(),
            length: 1.0,
            eps_r: 0.1,
            loads,
            degrees,
            eps_grid: grid,
        }
    }

    #[test]
    fn slope_of_exact_power() {
        let pts: Vec<_> = [0.1, 0.03, 0.01].iter().map(|&e: &f64| (e, 3.0 * e.powf(2.5))).collect();
        assert!((fit_loglog(&pts).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(fit_loglog(&pts[..1]), None);
    }

    #[test]
    fn grid_must_decrease() {
        assert!(check_grid(&[0.1, 0.01]).is_ok());
        assert!(check_grid(&[0.1, 0.1]).is_err());
        assert!(check_grid(&[0.01, 0.1]).is_err());
        assert!(check_grid(&[0.1, -0.01]).is_err());
        assert!(check_grid(&[]).is_err());
    }

    #[test]
    fn clamped_recovery_vanishes_at_clamp_and_has_consistent_jet() {
        let m = MaterialModuli::new(1.0, 1.5, 3.0, 1.2, 0.8, 1.0);
        let f = TimoshenkoField::zero(AxialBasis::new(1.0, 6).unwrap())
            .with_profile(Component::U3, |t| 0.3 * t + t * t)
            .with_profile(Component::Psi1, |t| t - 0.5 * t * t * t)
            .with_profile(Component::Psi2, |t| 2.0 * t * t);
        let r = ClampedRecovery::new(&f, 0.3, &m, 6);
        let j0 = r.jet([0.2, -0.1, 0.0]);
        assert!(j0.value.iter().all(|v| v.abs() < 1e-14));
        let x = [0.2, -0.3, 0.4];
        let j = r.jet(x);
        let h = 1e-5;
        let hess = j.hess.unwrap();
        for d in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            let (jp, jm) = (r.jet(xp), r.jet(xm));
            for i in 0..3 {
                let g = (jp.value[i] - jm.value[i]) / (2.0 * h);
                assert!((g - j.grad[i][d]).abs() < 1e-8);
                for k in 0..3 {
                    let hh = (jp.grad[i][k] - jm.grad[i][k]) / (2.0 * h);
                    assert!((hh - hess[i][k][d]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn zero_loads_give_zero_rows() {
        let rep = run_sweep(&cantilever(LoadSpec::zero(), [2, 2, 4], vec![0.1, 0.01])).unwrap();
        for r in &rep.rows {
            let v = [r.energy3d, r.energy1d, r.gap, r.h1_dist, r.s11, r.s12, r.s22, r.penalty, r.recovery_energy];
            assert!(v.iter().all(|&x| x == 0.0), "{r:?}");
        }
        assert!(rep.rates.iter().all(|r| r.slope.is_none()));
    }

    #[test]
    fn sandwich_and_csv_shape() {
        let mut loads = LoadSpec::zero();
        loads.end[0] = Poly3::constant(1.0);
        let rep = run_sweep(&cantilever(loads, [2, 2, 6], vec![0.3, 0.1, 0.03])).unwrap();
        for r in &rep.rows {
            assert!(r.energy3d <= r.recovery_energy + 1e-10 * r.energy3d.abs(), "{r:?}");
        }
        let csv = rep.report_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 11));
        assert!(rep.rates_csv().starts_with(RATES_HEADER));
    }

    #[test]
    fn unscaled_axial_field_is_invariant() {
        let cs = build_section(SectionShape::Rectangle { w: 1.0, h: 1.0 }).unwrap();
        let basis = Arc::new(RitzBasis3D::new(cs, 1.0, [2, 2, 3]).unwrap());
        let f = TimoshenkoField::zero(basis.axial.clone()).with_profile(Component::U3, |t| t);
        let u = embed_timoshenko(basis, &f).unwrap();
        let real = unscale_minimizer(u, 0.1);
        let v = real.value([0.02, -0.03, 0.7]);
        assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        assert!((v[2] - 0.7).abs() < 1e-14);
    }
}
