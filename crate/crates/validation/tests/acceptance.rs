//! Acceptance criteria. Each prints one `PASS`/`FAIL` line; the process exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::Rng;

use beam_gamma::axial::AxialBasis;
use beam_gamma::energy::{elastic_energy_eps, limit_elastic_energy};
use beam_gamma::field::{BeamDomain, DisplacementField};
use beam_gamma::harness::{default_eps_grid, fit_loglog, run_sweep, SweepConfig};
use beam_gamma::kinematics::{recovery_field, Component, TimoshenkoField};
use beam_gamma::loads::{load_potential_1d, load_potential_3d, reduce_loads, LoadSpec, Monomial, Poly3};
use beam_gamma::material::{
    density_w_eps, density_w_tau_eps, isotropic_moduli, relax_over_inplane, MaterialModuli,
    SymStrain,
};
use beam_gamma::section::{build_section, CrossSection, SectionShape};
use beam_gamma::solver1d::{
    bernoulli_navier_limit, energy_1d, limit_potential_3d, solve_joint, solve_timoshenko, BeamStiffness,
};
use beam_gamma::solver3d::{norms, real_problem_energy, DisplacementField3D, RitzBasis3D};
use beam_gamma_validation::{brute_min, random_loads, random_moduli, rel, rng};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn unit_square() -> CrossSection {
    build_section(SectionShape::Rectangle { w: 1.0, h: 1.0 }).unwrap()
}

fn cantilever_moduli() -> MaterialModuli {
    MaterialModuli::new(1.0, 1.0, 3.0, 1.0, 1.0, 1.0)
}

fn tip_load(i: usize, c: f64) -> LoadSpec {
    let mut l = LoadSpec::zero();
    l.end[i] = Poly3::constant(c);
    l
}

fn criterion1() -> Verdict {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    let mut worst_relax: f64 = 0.0;
    for _ in 0..100 {
        let m = random_moduli(&mut r);
        let eps_r = r.gen_range(0.02..0.5);
        let eps = r.gen_range(0.001..0.9);
        let [e13, e23, e33]: [f64; 3] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
        let brute = brute_min(|g| {
            let e = SymStrain { e11: g[0], e22: g[1], e12: g[2], e13, e23, e33 };
            density_w_eps(&e, eps, eps_r, &m)
        });
        worst = worst.max((density_w_tau_eps(e13, e23, e33, eps, eps_r, &m) - brute).abs());
        worst_relax = worst_relax.max((relax_over_inplane(e13, e23, e33, eps, eps_r, &m).value - brute).abs());
    }
    verdict(
        worst <= 1e-6 && worst_relax <= 1e-6,
        format!("relaxed density vs brute force, 100 samples, max abs error {worst:.2e} (minimizer form {worst_relax:.2e}, tol 1e-6)"),
    )
}

fn recovery_profiles() -> TimoshenkoField {
    TimoshenkoField::zero(AxialBasis::new(1.0, 4).unwrap())
        .with_profile(Component::U1, |t| t * t * (1.5 - 0.5 * t))
        .with_profile(Component::U2, |t| 0.3 * t * t)
        .with_profile(Component::U3, |t| 0.2 * t * t)
        .with_profile(Component::Psi1, |t| -0.4 * t * t)
        .with_profile(Component::Psi2, |t| t * t)
}

fn criterion2() -> Verdict {
    let m = cantilever_moduli();
    let eps_r = 0.1;
    let cs = build_section(SectionShape::Rectangle { w: 1.0, h: 0.6 }).unwrap();
    let domain = BeamDomain::new(cs, 1.0).unwrap();
    let rule = domain.volume_rule(8, 12).unwrap();
    let f = recovery_profiles();
    let limit = limit_elastic_energy(&f, eps_r, &m, &rule);
    let grid = [1e-1, 10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5)];
    let eta = m.tau2 / (2.0 * (m.mu + m.lambda));
    let mut pts = Vec::new();
    let mut worst_identity: f64 = 0.0;
    let probe = [[0.31, -0.17, 0.23], [-0.5, 0.3, 0.77], [0.05, 0.29, 1.0], [-0.2, -0.1, 0.5]];
    for &eps in &grid {
        let rec = recovery_field(&f, eps, &m);
        let e = elastic_energy_eps(&rec, eps, eps_r, &m, &rule).unwrap().total();
        pts.push((eps, (e - limit).abs()));
        for x in probe {
            let g = rec.jet(x).grad;
            let sym = |i: usize, j: usize| 0.5 * (g[i][j] + g[j][i]);
            let base = f.jet(x).grad;
            let bsym = |i: usize, j: usize| 0.5 * (base[i][j] + base[j][i]);
            // (E û)_{α3} from û = -η (x1 a + x1 x2 b + q c, x2 a - x1 x2 c + q b, 0)
            let p = f.profiles(x[2]);
            let (a, b, c) = (p[2][2], p[3][2], p[4][2]);
            let q = 0.5 * (x[1] * x[1] - x[0] * x[0]);
            let hat13 = -0.5 * eta * (x[0] * a + x[0] * x[1] * b + q * c);
            let hat23 = -0.5 * eta * (x[1] * a - x[0] * x[1] * c + q * b);
            let e33 = bsym(2, 2);
            let dev = [
                sym(0, 0) / (eps * eps) + eta * e33,
                sym(1, 1) / (eps * eps) + eta * e33,
                sym(0, 1) / (eps * eps),
                sym(2, 2) - e33,
                sym(0, 2) - bsym(0, 2) - eps * eps * hat13,
                sym(1, 2) - bsym(1, 2) - eps * eps * hat23,
            ];
            worst_identity = dev.iter().fold(worst_identity, |w, d| w.max(d.abs()));
        }
    }
    let slope = fit_loglog(&pts).unwrap_or(f64::NAN);
    verdict(
        (1.8..=2.2).contains(&slope) && worst_identity <= 1e-10,
        format!("recovery energy gap slope {slope:.3} (need [1.8, 2.2]), strain identities max deviation {worst_identity:.1e} (tol 1e-10)"),
    )
}

fn cantilever_sweep(degrees: [usize; 3]) -> SweepConfig {
    SweepConfig {
        moduli: cantilever_moduli(),
        section: unit_square(),
        length: 1.0,
        eps_r: 0.1,
        loads: tip_load(0, 1.0),
        degrees,
        eps_grid: default_eps_grid(),
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn criteria_3_to_5() -> [Verdict; 3] {
    let t = Instant::now();
    let report = run_sweep(&cantilever_sweep([4, 4, 10])).expect("cantilever sweep");
    let elapsed = t.elapsed();
    let gaps: Vec<f64> = report.rows.iter().map(|r| r.gap).collect();
    let rel_gaps = report.relative_gaps();
    let final_rel = *rel_gaps.last().unwrap();
    let tail_ok = strictly_decreasing(&gaps[gaps.len() - 3..]);
    let c3 = verdict(
        final_rel <= 0.05 && tail_ok && elapsed < Duration::from_secs(120),
        format!(
            "final relative gap {final_rel:.3e} (tol 5e-2), last three gaps strictly decreasing: {tail_ok} [{}], sweep {:.1} s",
            fmt_list(&gaps[gaps.len() - 3..]),
            elapsed.as_secs_f64()
        ),
    );

    let h1: Vec<f64> = report.rows.iter().map(|r| r.h1_dist).collect();
    let h1_ratio = h1.last().unwrap() / report.limit_h1;
    let h1_dec = strictly_decreasing(&h1);
    let c4 = verdict(
        h1_dec && h1_ratio <= 0.1,
        format!("H1 distance decreasing: {h1_dec} [{}], final / |u_min|_H1 = {h1_ratio:.3e} (tol 1e-1)", fmt_list(&h1)),
    );

    let zero = DisplacementField3D::zero(report.last_minimizer.basis.clone());
    let strain = norms(&report.last_minimizer, &zero).unwrap().strain;
    let dominant = strain.iter().copied().fold(0.0, f64::max);
    let cols: [(&str, Vec<f64>); 3] = [
        ("11", report.rows.iter().map(|r| r.s11).collect()),
        ("12", report.rows.iter().map(|r| r.s12).collect()),
        ("22", report.rows.iter().map(|r| r.s22).collect()),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, v) in &cols {
        let ratio = v.last().unwrap() / dominant;
        ok &= strictly_decreasing(v) && ratio <= 1e-2;
        parts.push(format!("s{name} decreasing {} final ratio {ratio:.2e}", strictly_decreasing(v)));
    }
    let c5 = verdict(ok, format!("{} (tol 1e-2 of dominant {dominant:.3e})", parts.join(", ")));

    // not a criterion: same sweep with a finer axial basis
    let fine = run_sweep(&cantilever_sweep([4, 4, 24])).expect("refined sweep");
    let fg: Vec<f64> = fine.rows.iter().map(|r| r.gap).collect();
    let fh: Vec<f64> = fine.rows.iter().map(|r| r.h1_dist).collect();
    println!("INFO degrees [4, 4, 24]: gaps [{}], H1 distances [{}]", fmt_list(&fg), fmt_list(&fh));
    [c3, c4, c5]
}

fn criterion6() -> Verdict {
    let t = Instant::now();
    let m = cantilever_moduli();
    let cs = unit_square();
    let basis = AxialBasis::new(1.0, 10).unwrap();
    let st = BeamStiffness::new(&m, &cs, 0.1, 1.0).unwrap();
    // E_mod = τ1 − τ2²/(λ+μ) = 2.5, B = E_mod / 12, S = γ A / ε_r² = 100
    let (b, s, l) = (2.5 / 12.0, 100.0, 1.0);
    let tip = |loads: &LoadSpec| {
        let rl = reduce_loads(loads, &cs, l).unwrap();
        solve_timoshenko(&st, &rl, &basis).unwrap().profiles(l)
    };
    let force = tip(&tip_load(0, 1.0));
    let e_force = rel(force[0][0], l.powi(3) / (3.0 * b) + l / s).max(rel(force[4][0], l * l / (2.0 * b)));
    // c3 = −12 x1 on the end face gives M2 = 12 ∫ x1² = 1
    let mut couple = LoadSpec::zero();
    couple.end[2] = Poly3::from_terms(vec![Monomial::new(-12.0, 1, 0, 0)]);
    let cp = tip(&couple);
    let e_couple = rel(cp[4][0], l / b).max(rel(cp[0][0], l * l / (2.0 * b)));
    let mut dist = LoadSpec::zero();
    dist.body[0] = Poly3::constant(1.0);
    let dp = tip(&dist);
    let e_dist = rel(dp[0][0], l.powi(4) / (8.0 * b) + l * l / (2.0 * s));
    let worst = e_force.max(e_couple).max(e_dist);
    let el = t.elapsed();
    verdict(
        worst <= 1e-8 && el < Duration::from_secs(1),
        format!(
            "tip force u1(L) = {:.10} (oracle 1.61), couple and distributed load; max relative error {worst:.1e} (tol 1e-8), {:.3} s",
            force[0][0],
            el.as_secs_f64()
        ),
    )
}

fn criterion7() -> Verdict {
    let t = Instant::now();
    let mut r = rng(7);
    let sections = [
        build_section(SectionShape::Rectangle { w: 1.0, h: 0.7 }).unwrap(),
        build_section(SectionShape::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]])).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let cs = sections[k % 2].clone();
        let basis = Arc::new(RitzBasis3D::new(cs, r.gen_range(0.5..2.0), [2, 2, 3]).unwrap());
        let c = DVector::from_fn(basis.dim(), |_, _| r.gen_range(-1.0..1.0));
        let u = DisplacementField3D::new(basis, c);
        let m = random_moduli(&mut r);
        let eps_r = r.gen_range(0.05..0.5);
        let check = real_problem_energy(&u, &m, eps_r, &random_loads(&mut r)).unwrap();
        worst = worst.max(check.discrepancy);
    }
    let el = t.elapsed();
    verdict(
        worst <= 1e-11 && el < Duration::from_secs(5),
        format!("real vs scaled potential, 20 random fields, max relative discrepancy {worst:.1e} (tol 1e-11), {:.2} s", el.as_secs_f64()),
    )
}

fn random_profile(r: &mut rand_chacha::ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| r.gen_range(-1.0..1.0))
}

fn criterion8() -> Verdict {
    let mut r = rng(8);
    let sections = [
        build_section(SectionShape::Rectangle { w: 1.0, h: 0.5 }).unwrap(),
        build_section(SectionShape::Ellipse { a: 0.6, b: 0.4 }).unwrap(),
        build_section(SectionShape::Polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.2, 0.7], [0.1, 0.9]])).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for k in 0..30 {
        let cs = sections[k % 3].clone();
        let length = r.gen_range(0.5..2.0);
        let domain = BeamDomain::new(cs.clone(), length).unwrap();
        let mut f = TimoshenkoField::zero(AxialBasis::new(length, 5).unwrap());
        for c in [Component::U1, Component::U2, Component::U3, Component::Psi1, Component::Psi2] {
            let a = random_profile(&mut r);
            f = f.with_profile(c, move |t| t * (a[0] + t * (a[1] + t * (a[2] + t * a[3]))));
        }
        let loads = random_loads(&mut r);
        let three = load_potential_3d(&f, &loads, &domain, [1, 5]).unwrap();
        let one = load_potential_1d(&f, &reduce_loads(&loads, &cs, length).unwrap());
        worst = worst.max(rel(three, one));
    }
    verdict(
        worst <= 1e-11,
        format!("3D vs reduced load potential, 30 random fields and loads, max relative difference {worst:.1e} (tol 1e-11)"),
    )
}

fn criterion9() -> Verdict {
    let m = cantilever_moduli();
    let cs = unit_square();
    let rl = reduce_loads(&tip_load(0, 1.0), &cs, 1.0).unwrap();
    let basis = AxialBasis::new(1.0, 10).unwrap();
    let rows = bernoulli_navier_limit(&m, &cs, &rl, &[0.1, 0.05, 0.025], &basis).unwrap();
    let dist: Vec<f64> = rows.iter().map(|r| (r.tip[0] - 1.6).abs()).collect();
    let shear: Vec<f64> = rows.iter().map(|r| r.shear_measure).collect();
    let bn_err = rows.iter().map(|r| rel(r.bn_tip[0], 1.6)).fold(0.0, f64::max);
    let last = rows.last().unwrap();
    let pass = strictly_decreasing(&dist) && strictly_decreasing(&shear) && last.shear_fraction <= 1e-3 && bn_err <= 1e-10;
    verdict(
        pass,
        format!(
            "tips [{}] -> 1.6 (shear-rigid tip error {bn_err:.1e}), shear measure [{}], final shear fraction {:.2e} (tol 1e-3)",
            rows.iter().map(|r| format!("{:.6}", r.tip[0])).collect::<Vec<_>>().join(", "),
            fmt_list(&shear),
            last.shear_fraction
        ),
    )
}

fn criterion10() -> Verdict {
    let mut r = rng(10);
    let mut young: f64 = 0.0;
    for _ in 0..100 {
        let mu = r.gen_range(0.1..5.0);
        let lambda = r.gen_range(-0.6 * mu..10.0);
        let m = isotropic_moduli(lambda, mu, 1.0).unwrap();
        young = young.max(rel(m.axial_modulus(), mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu)));
    }
    let mut split: f64 = 0.0;
    let mut joint: f64 = 0.0;
    let basis = AxialBasis::new(1.3, 8).unwrap();
    for _ in 0..20 {
        let m = random_moduli(&mut r);
        let cs = build_section(SectionShape::Ellipse { a: 0.5, b: 0.3 }).unwrap();
        let domain = BeamDomain::new(cs.clone(), 1.3).unwrap();
        let st = BeamStiffness::new(&m, &cs, 0.1, 1.3).unwrap();
        let loads = random_loads(&mut r);
        let rl = reduce_loads(&loads, &cs, 1.3).unwrap();
        let a = solve_timoshenko(&st, &rl, &basis).unwrap();
        let b = solve_joint(&st, &rl, &basis).unwrap();
        let scale = a.comps.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        for (ca, cb) in a.comps.iter().zip(&b.comps) {
            for (x, y) in ca.iter().zip(cb) {
                joint = joint.max((x - y).abs() / scale);
            }
        }
        let e = energy_1d(&a, &st, &rl);
        split = split.max(rel(e.total, e.axial + e.bending));
        split = split.max(rel(e.total, limit_potential_3d(&a, &m, 0.1, &domain, &loads).unwrap()));
    }
    verdict(
        young <= 1e-14 && split <= 1e-12 && joint <= 1e-12,
        format!("isotropic axial modulus vs Young, max relative error {young:.1e} (tol 1e-14); energy split {split:.1e}, joint vs split minimizers {joint:.1e} (tol 1e-12)"),
    )
}

fn main() -> ExitCode {
    let mut verdicts: Vec<(usize, Verdict)> = Vec::new();
    let timed = |f: fn() -> Verdict, limit: Duration| {
        let t = Instant::now();
        let mut v = f();
        let el = t.elapsed();
        if el >= limit {
            v.pass = false;
            v.detail.push_str(&format!("; runtime {:.2} s over {:.0} s", el.as_secs_f64(), limit.as_secs_f64()));
        }
        v
    };
    verdicts.push((1, timed(criterion1, Duration::from_secs(5))));
    verdicts.push((2, timed(criterion2, Duration::from_secs(10))));
    for (i, v) in criteria_3_to_5().into_iter().enumerate() {
        verdicts.push((3 + i, v));
    }
    verdicts.push((6, criterion6()));
    verdicts.push((7, criterion7()));
    verdicts.push((8, criterion8()));
    verdicts.push((9, criterion9()));
    verdicts.push((10, criterion10()));

    let mut failed = 0;
    for (n, v) in &verdicts {
        println!("{} criterion {n}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
