use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beam_gamma::axial::AxialBasis;
use beam_gamma::energy::{elastic_energy_eps, limit_elastic_energy};
use beam_gamma::field::BeamDomain;
use beam_gamma::harness::{fit_loglog, run_sweep};
use beam_gamma::kinematics::{recovery_field, TimoshenkoField};
use beam_gamma::loads::reduce_loads;
use beam_gamma::material::{
    check_moduli, coercivity_constant, density_w, validate_moduli, young_modulus, SymStrain,
};
use beam_gamma::solver1d::{bernoulli_navier_limit, energy_1d, solve_timoshenko, BeamStiffness};
use beam_gamma::solver3d::{assemble, solve_min, RitzBasis3D, CONDITION_LIMIT};
use beam_gamma::field::DisplacementField as _;

mod config;
mod plot;

use config::{number_list, parse_config, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Solver(beam_gamma::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<beam_gamma::Error> for CliError {
    fn from(e: beam_gamma::Error) -> Self {
        CliError::Solver(e)
    }
}

#[derive(Parser)]
#[command(name = "beam-gamma", version, about = "Timoshenko beam limit of 3D elasticity: solvers and ε-sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the material inequalities and coercivity.
    MaterialCheck(Common),
    /// Solve the limit beam problem.
    Solve1d(Common),
    /// Solve the 3D problem at one ε.
    Solve3d(Common),
    /// Run an ε-sweep and write report.csv and rates.csv.
    Sweep(Common),
    /// Compare the recovery-field energy with the limit energy.
    RecoveryCheck(Common),
    /// Shear-rigid limit of the beam as ε_r decreases.
    BnLimit(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// ε values, comma or space separated, strictly decreasing.
    #[arg(long)]
    eps_grid: Option<String>,
    /// Seed of the randomized probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write SVG charts.
    #[arg(long)]
    plot: bool,
}

/// Files to write and the line printed on success.
struct Outcome {
    files: Vec<(String, String)>,
    summary: String,
    code: u8,
}

impl Outcome {
    fn ok(files: Vec<(String, String)>, summary: String) -> Self {
        Outcome { files, summary, code: 0 }
    }
}

type Runner = fn(&ExperimentConfig, &Common) -> Result<Outcome, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, Runner) = match &cli.command {
        Command::MaterialCheck(c) => (c, material_check),
        Command::Solve1d(c) => (c, solve1d),
        Command::Solve3d(c) => (c, solve3d),
        Command::Sweep(c) => (c, sweep),
        Command::RecoveryCheck(c) => (c, recovery_check),
        Command::BnLimit(c) => (c, bn_limit),
    };
    match execute(common, run) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(common: &Common, run: Runner) -> Result<u8, CliError> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(g) = &common.eps_grid {
        let grid = number_list("--eps-grid", g)?;
        beam_gamma::harness::check_grid(&grid).map_err(|e| CliError::Config(format!("--eps-grid: {e}")))?;
        cfg.eps_grid = grid;
    }
    let outcome = run(&cfg, common)?;
    if !outcome.files.is_empty() {
        let dir = common
            .out
            .clone()
            .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        write_all(&dir, &outcome.files)?;
    }
    println!("{}", outcome.summary);
    Ok(outcome.code)
}

/// Writes every file or none: on failure the files already written, and the
/// directory if it was created here, are removed.
fn write_all(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    let created = !dir.exists();
    let mut written = Vec::new();
    let result = (|| -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(())
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        if created {
            let _ = fs::remove_dir(dir);
        }
        return Err(CliError::Output(format!("{}: {e}", dir.display())));
    }
    Ok(())
}

fn material_check(cfg: &ExperimentConfig, common: &Common) -> Result<Outcome, CliError> {
    let m = &cfg.moduli;
    let mut s = String::new();
    writeln!(
        s,
        "moduli: mu={} lambda={} tau1={} tau2={} gamma={} tau_R={}",
        m.mu, m.lambda, m.tau1, m.tau2, m.gamma, m.tau_r
    )
    .unwrap();
    let violations = validate_moduli(m);
    let checks = [
        ("mu > 0", m.mu),
        ("gamma > 0", m.gamma),
        ("tau1 > 0", m.tau1),
        ("tau1*(lambda+mu) - tau2^2 > 0", m.coupling_margin()),
        ("tau_R > 0", m.tau_r),
    ];
    for (name, value) in checks {
        let ok = !violations.iter().any(|v| v.describe() == name);
        writeln!(s, "{} {name} (value {value})", if ok { "ok  " } else { "FAIL" }).unwrap();
    }
    if !violations.is_empty() {
        let names: Vec<_> = violations.iter().map(|v| v.describe()).collect();
        writeln!(s, "invalid moduli: violated {}", names.join(", ")).unwrap();
        return Ok(Outcome {
            files: Vec::new(),
            summary: s.trim_end().to_string(),
            code: 1,
        });
    }
    let c = coercivity_constant(m)?;
    writeln!(s, "coercivity constant: {c:.12e}").unwrap();
    writeln!(s, "axial modulus tau1 - tau2^2/(lambda+mu): {:.12e}", m.axial_modulus()).unwrap();
    writeln!(s, "eta: {:.12e}", m.eta()).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let e = SymStrain {
            e11: rng.gen_range(-1.0..1.0),
            e22: rng.gen_range(-1.0..1.0),
            e33: rng.gen_range(-1.0..1.0),
            e12: rng.gen_range(-1.0..1.0),
            e13: rng.gen_range(-1.0..1.0),
            e23: rng.gen_range(-1.0..1.0),
        };
        worst = worst.min(density_w(&e, m) / e.norm_sq());
    }
    writeln!(
        s,
        "random strains (seed {}, 1000 samples): min W/|E|^2 = {worst:.12e} {}",
        common.seed,
        if worst >= c * (1.0 - 1e-12) { ">= C" } else { "< C" }
    )
    .unwrap();

    let iso = cfg.isotropic.or_else(|| {
        (m.tau1 == m.lambda + 2.0 * m.mu && m.tau2 == m.lambda && m.gamma == m.mu).then_some((m.lambda, m.mu))
    });
    if let Some((l, mu)) = iso {
        let e = young_modulus(l, mu);
        writeln!(
            s,
            "isotropic: Young modulus identity residual {:.3e}",
            (m.axial_modulus() - e).abs() / e.abs()
        )
        .unwrap();
    }
    Ok(Outcome::ok(Vec::new(), s.trim_end().to_string()))
}

fn beam(cfg: &ExperimentConfig) -> Result<(BeamStiffness, beam_gamma::loads::ReducedLoads, AxialBasis), CliError> {
    check_moduli(&cfg.moduli)?;
    let st = BeamStiffness::new(&cfg.moduli, &cfg.section, cfg.eps_r, cfg.length)?;
    let rl = reduce_loads(&cfg.loads, &cfg.section, cfg.length)?;
    let basis = AxialBasis::new(cfg.length, cfg.degree_1d)?;
    Ok((st, rl, basis))
}

const PROFILE_POINTS: usize = 101;

fn solve1d(cfg: &ExperimentConfig, _: &Common) -> Result<Outcome, CliError> {
    let (st, rl, basis) = beam(cfg)?;
    let f = solve_timoshenko(&st, &rl, &basis)?;
    let e = energy_1d(&f, &st, &rl);
    let mut prof = String::from("x3,u1,u2,u3,psi1,psi2\n");
    for i in 0..PROFILE_POINTS {
        let x = cfg.length * i as f64 / (PROFILE_POINTS - 1) as f64;
        let p = f.profiles(x);
        writeln!(prof, "{x:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p[0][0], p[1][0], p[2][0], p[3][0], p[4][0]).unwrap();
    }
    let energies = format!("pi,pi_a,pi_b\n{:.16e},{:.16e},{:.16e}\n", e.total, e.axial, e.bending);
    let tip = f.profiles(cfg.length);
    let summary = format!(
        "tip u1 = {:.10} u2 = {:.10} u3 = {:.10} psi1 = {:.10} psi2 = {:.10}; Pi = {:.10} Pi_a = {:.10} Pi_b = {:.10}",
        tip[0][0], tip[1][0], tip[2][0], tip[3][0], tip[4][0], e.total, e.axial, e.bending
    );
    Ok(Outcome::ok(
        vec![
            ("profile.csv".into(), prof),
            ("energies.csv".into(), energies),
            ("field.txt".into(), f.to_text()),
        ],
        summary,
    ))
}

fn solve3d(cfg: &ExperimentConfig, _: &Common) -> Result<Outcome, CliError> {
    check_moduli(&cfg.moduli)?;
    let eps = cfg.eps.unwrap_or(*cfg.eps_grid.last().expect("grid is non-empty"));
    let basis = Arc::new(RitzBasis3D::new(cfg.section.clone(), cfg.length, cfg.degrees)?);
    let sys = assemble(basis, &cfg.moduli, eps, cfg.eps_r, &cfg.loads)?;
    let sol = solve_min(&sys)?;
    if sol.ill_conditioned() {
        return Err(beam_gamma::Error::IllConditioned {
            estimate: sol.diagnostics.cond_estimate,
            limit: CONDITION_LIMIT,
        }
        .into());
    }
    let u = sol.field.as_ref().expect("assembled systems carry their basis");
    let mut axis = String::from("x3,u1,u2,u3\n");
    for i in 0..PROFILE_POINTS {
        let x = cfg.length * i as f64 / (PROFILE_POINTS - 1) as f64;
        let v = u.value([0.0, 0.0, x]);
        writeln!(axis, "{x:.16e},{:.16e},{:.16e},{:.16e}", v[0], v[1], v[2]).unwrap();
    }
    let penalty = sys.penalty_energy(&sol.coeffs);
    let d = sol.diagnostics;
    let summary_csv = format!(
        "eps,energy,penalty,cond_est,residual\n{eps:.16e},{:.16e},{penalty:.16e},{:.16e},{:.16e}\n",
        sol.energy, d.cond_estimate, d.residual
    );
    let tip = u.value([0.0, 0.0, cfg.length]);
    let summary = format!(
        "eps = {eps:.6e}: energy = {:.10}, tip axis displacement ({:.10}, {:.10}, {:.10}), cond = {:.3e}",
        sol.energy, tip[0], tip[1], tip[2], d.cond_estimate
    );
    Ok(Outcome::ok(
        vec![("axis.csv".into(), axis), ("solve3d.csv".into(), summary_csv)],
        summary,
    ))
}

fn sweep(cfg: &ExperimentConfig, common: &Common) -> Result<Outcome, CliError> {
    let rep = run_sweep(&cfg.sweep())?;
    let mut files = vec![
        ("report.csv".to_string(), rep.report_csv()),
        ("rates.csv".to_string(), rep.rates_csv()),
    ];
    if common.plot {
        let pts = |g: &dyn Fn(&beam_gamma::harness::SweepRow) -> f64| -> Vec<(f64, f64)> {
            rep.rows.iter().map(|r| (r.eps, g(r))).collect()
        };
        let svg = plot::loglog_svg(
            "energy gap",
            "eps",
            &[
                plot::Series { label: "|Pi_eps(u_eps) - Pi(u)|", points: pts(&|r| r.gap) },
                plot::Series {
                    label: "|Pi_eps(recovery) - Pi(u)|",
                    points: pts(&|r| (r.recovery_energy - r.energy1d).abs()),
                },
                plot::Series { label: "|u_eps - u|_H1", points: pts(&|r| r.h1_dist) },
            ],
        );
        files.push(("gap.svg".into(), svg));
    }
    let last = rep.rows.last().expect("grid is non-empty");
    let rel = rep.relative_gaps();
    let slope = |q: &str| {
        rep.rate(q)
            .and_then(|r| r.slope)
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
    };
    let summary = format!(
        "{} rows; Pi(u_min) = {:.10}; final eps {:.3e}: relative gap {:.3e}, H1 distance {:.3e}; slopes gap {} s11 {}",
        rep.rows.len(),
        rep.energy1d,
        last.eps,
        rel.last().copied().unwrap_or(0.0),
        last.h1_dist,
        slope("gap"),
        slope("s11"),
    );
    Ok(Outcome::ok(files, summary))
}

fn recovery_check(cfg: &ExperimentConfig, _: &Common) -> Result<Outcome, CliError> {
    let m = &cfg.moduli;
    check_moduli(m)?;
    let f = match &cfg.recovery_field {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
            TimoshenkoField::from_text(&text).map_err(|e| CliError::Config(format!("{path}: {e}")))?
        }
        None => {
            let (st, rl, basis) = beam(cfg)?;
            solve_timoshenko(&st, &rl, &basis)?
        }
    };
    let domain = BeamDomain::new(cfg.section.clone(), f.basis.length)?;
    let p = f.basis.degree;
    let rule = domain.volume_rule(6, 2 * p + 2)?;
    let w_tau = limit_elastic_energy(&f, cfg.eps_r, m, &rule);
    let mut csv = String::from("eps,energy_eps,energy_limit,gap,identity_residual\n");
    let mut pts = Vec::new();
    for &eps in &cfg.eps_grid {
        let r = recovery_field(&f, eps, m);
        let w = elastic_energy_eps(&r, eps, cfg.eps_r, m, &rule)?.total();
        let ident = rule
            .points
            .iter()
            .flat_map(|&x| r.identity_residuals(x))
            .fold(0.0f64, |a, v| a.max(v.abs()));
        let gap = (w - w_tau).abs();
        pts.push((eps, gap));
        writeln!(csv, "{eps:.16e},{w:.16e},{w_tau:.16e},{gap:.16e},{ident:.16e}").unwrap();
    }
    let slope = fit_loglog(&pts).map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    let summary = format!(
        "limit energy {w_tau:.10}; recovery gap at eps {:.3e}: {:.3e}; fitted slope {slope}",
        pts.last().map_or(0.0, |p| p.0),
        pts.last().map_or(0.0, |p| p.1),
    );
    Ok(Outcome::ok(vec![("recovery.csv".into(), csv)], summary))
}

fn bn_limit(cfg: &ExperimentConfig, _: &Common) -> Result<Outcome, CliError> {
    let (_, rl, basis) = beam(cfg)?;
    let rows = bernoulli_navier_limit(&cfg.moduli, &cfg.section, &rl, &cfg.bn_grid, &basis)?;
    let mut csv = String::from("eps_r,tip1,tip2,bn_tip1,bn_tip2,shear_measure,shear_fraction\n");
    for r in &rows {
        writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.eps_r, r.tip[0], r.tip[1], r.bn_tip[0], r.bn_tip[1], r.shear_measure, r.shear_fraction
        )
        .unwrap();
    }
    let last = rows.last().expect("grid is non-empty");
    let summary = format!(
        "eps_r {:.3e}: tip ({:.10}, {:.10}), shear-rigid tip ({:.10}, {:.10}), shear fraction {:.3e}",
        last.eps_r, last.tip[0], last.tip[1], last.bn_tip[0], last.bn_tip[1], last.shear_fraction
    );
    Ok(Outcome::ok(vec![("bn.csv".into(), csv)], summary))
}
