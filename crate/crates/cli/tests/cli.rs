use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beam-gamma"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_cfg(dir: &TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("exp.cfg");
    fs::write(&p, text).unwrap();
    p
}

const CANTILEVER_1D: &str = "\
moduli.mu = 1
moduli.lambda = 1
moduli.tau1 = 3
moduli.tau2 = 1
moduli.gamma = 1
section.kind = rectangle
section.width = 1
section.height = 1
geometry.eps_r = 0.1
loads.end.1 = (1, 0, 0, 0)
";

#[test]
fn solve1d_reports_the_cantilever_tip() {
    let dir = TempDir::new().unwrap();
    let o = run(&["solve1d"], &config("cantilever.cfg"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("tip u1 = 1.6100000000"), "{}", stdout(&o));
    let prof = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(prof.lines().next(), Some("x3,u1,u2,u3,psi1,psi2"));
    assert_eq!(prof.lines().count(), 102);
    let en = fs::read_to_string(dir.path().join("energies.csv")).unwrap();
    assert_eq!(en.lines().next(), Some("pi,pi_a,pi_b"));
    assert!(!fs::read_to_string(dir.path().join("field.txt")).unwrap().is_empty());
}

#[test]
fn zero_load_sweep_gives_zero_rows() {
    let dir = TempDir::new().unwrap();
    let o = run(&["sweep"], &config("zero.cfg"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(
        lines.next(),
        Some("eps,energy3d,energy1d,gap,h1_dist,s11,s12,s22,penalty,recovery_energy,cond_est")
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(v[1..10].iter().all(|&x| x == 0.0), "{row}");
        assert!(v[10] >= 1.0);
    }
    let rates = fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    assert_eq!(rates.lines().next(), Some("quantity,slope,points"));
}

#[test]
fn sweep_is_deterministic_and_plots() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["sweep", "--eps-grid", "0.3, 0.1, 0.03", "--plot"];
    for d in [&a, &b] {
        let o = run(&args, &config("zero.cfg"), d.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["report.csv", "rates.csv", "gap.svg"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let report = fs::read_to_string(a.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 4);
}

#[test]
fn invalid_moduli_name_the_inequality() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, &CANTILEVER_1D.replace("moduli.mu = 1", "moduli.mu = 0"));
    let o = run(&["material-check"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL mu > 0"), "{}", stdout(&o));

    let o = run(&["solve1d"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mu"), "{}", stderr(&o));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, &format!("{CANTILEVER_1D}moduli.nu = 3\n"));
    let o = run(&["solve1d"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("moduli.nu"), "{}", stderr(&o));

    let cfg = write_cfg(&dir, "moduli.mu = 1\n");
    assert_eq!(run(&["solve1d"], &cfg, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn non_decreasing_grids_are_rejected() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["sweep", "--eps-grid", "0.01, 0.1"], &config("zero.cfg"), &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let cfg = write_cfg(&dir, &format!("{CANTILEVER_1D}sweep.eps = 0.1 0.1\n"));
    assert_eq!(run(&["sweep"], &cfg, &out).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn failures_leave_no_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, &CANTILEVER_1D.replace("moduli.gamma = 1", "moduli.gamma = -1"));
    let out = dir.path().join("fresh");
    let o = run(&["sweep"], &cfg, &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    // the output directory cannot be created beneath a regular file
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&["solve1d"], &config("cantilever.cfg"), &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn isotropic_material_check() {
    let dir = TempDir::new().unwrap();
    let o = run(&["material-check"], &config("isotropic.cfg"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.contains("Young modulus identity residual")).expect(&s);
    let r: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(r <= 1e-14, "{line}");
    assert!(s.contains(">= C"), "{s}");
}

#[test]
fn material_check_is_seeded() {
    let dir = TempDir::new().unwrap();
    let go = |seed: &str| {
        let o = bin()
            .args(["material-check", "--seed", seed, "--config"])
            .arg(config("cantilever.cfg"))
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        stdout(&o)
    };
    assert_eq!(go("5"), go("5"));
    assert_ne!(go("5"), go("6"));
}

#[test]
fn recovery_check_without_coupling_has_no_correction() {
    // with tau2 = 0 the corrector vanishes and the energies agree exactly
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, &CANTILEVER_1D.replace("moduli.tau2 = 1", "moduli.tau2 = 0"));
    let out = dir.path().join("out");
    let o = run(&["recovery-check", "--eps-grid", "0.1 0.01"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("recovery.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,energy_eps,energy_limit,gap,identity_residual"));
    for row in lines {
        let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() <= 1e-13 * v[2].abs(), "{row}");
        assert!(v[4] <= 1e-12, "{row}");
    }
}

#[test]
fn recovery_check_reads_a_saved_field() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first");
    assert!(run(&["solve1d"], &config("cantilever.cfg"), &first).status.success());
    let cfg = write_cfg(
        &dir,
        &format!("{CANTILEVER_1D}recovery.field = {}\n", first.join("field.txt").display()),
    );
    let out = dir.path().join("out");
    let o = run(&["recovery-check"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("fitted slope"));
    assert_eq!(fs::read_to_string(out.join("recovery.csv")).unwrap().lines().count(), 6);
}

#[test]
fn bn_limit_approaches_the_shear_rigid_tip() {
    let dir = TempDir::new().unwrap();
    let o = run(&["bn-limit"], &config("cantilever.cfg"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("bn.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        // tip = 1.6 + eps_r² for the unit square
        assert!((r[1] - 1.6 - r[0] * r[0]).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn solve3d_writes_axis_and_diagnostics() {
    let dir = TempDir::new().unwrap();
    let o = run(&["solve3d", "--eps-grid", "0.05"], &config("zero.cfg"), dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let diag = fs::read_to_string(dir.path().join("solve3d.csv")).unwrap();
    assert_eq!(diag.lines().next(), Some("eps,energy,penalty,cond_est,residual"));
    let axis = fs::read_to_string(dir.path().join("axis.csv")).unwrap();
    assert_eq!(axis.lines().count(), 102);
}
