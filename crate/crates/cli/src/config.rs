//! Flat `block.key = value` experiment files.

use std::collections::BTreeMap;

use beam_gamma::harness::{check_grid, default_eps_grid, SweepConfig};
use beam_gamma::loads::{scale_real_loads, LoadSpec, Monomial, Poly3};
use beam_gamma::material::{isotropic_moduli, MaterialModuli};
use beam_gamma::section::{build_section, CrossSection, SectionShape};

use crate::CliError;

const KEYS: &[&str] = &[
    "moduli.kind",
    "moduli.mu",
    "moduli.lambda",
    "moduli.tau1",
    "moduli.tau2",
    "moduli.gamma",
    "section.kind",
    "section.width",
    "section.height",
    "section.a",
    "section.b",
    "section.vertices",
    "geometry.length",
    "geometry.eps_r",
    "loads.frame",
    "loads.body.1",
    "loads.body.2",
    "loads.body.3",
    "loads.lateral.1",
    "loads.lateral.2",
    "loads.lateral.3",
    "loads.end.1",
    "loads.end.2",
    "loads.end.3",
    "solver.degrees",
    "solver.degree_1d",
    "solver.tau_r",
    "solver.eps",
    "sweep.eps",
    "bn.eps_r",
    "recovery.field",
    "output.dir",
];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub moduli: MaterialModuli,
    /// Set when the moduli block was given as `kind = isotropic`.
    pub isotropic: Option<(f64, f64)>,
    pub section: CrossSection,
    pub length: f64,
    pub eps_r: f64,
    /// Loads on the scaled cylinder.
    pub loads: LoadSpec,
    pub degrees: [usize; 3],
    pub degree_1d: usize,
    pub eps_grid: Vec<f64>,
    /// ε of a single `solve3d`; defaults to the last grid value.
    pub eps: Option<f64>,
    pub bn_grid: Vec<f64>,
    pub recovery_field: Option<String>,
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn sweep(&self) -> SweepConfig {
        SweepConfig {
            moduli: self.moduli,
            section: self.section.clone(),
            length: self.length,
            eps_r: self.eps_r,
            loads: self.loads.clone(),
            degrees: self.degrees,
            eps_grid: self.eps_grid.clone(),
        }
    }
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Raw key-value pairs; rejects unknown and repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("line {}: expected `key = value`", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(parse_err(format!("line {}: unknown key `{k}`", n + 1)));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(parse_err(format!("line {}: repeated key `{k}`", n + 1)));
        }
    }
    Ok(map)
}

struct Pairs(BTreeMap<String, String>);

impl Pairs {
    fn str(&self, k: &str) -> Option<&str> {
        self.0.get(k).map(|s| s.as_str())
    }

    fn num(&self, k: &str) -> Result<Option<f64>, CliError> {
        self.str(k).map(|v| number(k, v)).transpose()
    }

    fn need(&self, k: &str) -> Result<f64, CliError> {
        self.num(k)?.ok_or_else(|| parse_err(format!("missing key `{k}`")))
    }

    fn list(&self, k: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.str(k).map(|v| number_list(k, v)).transpose()
    }

    fn has_block(&self, block: &str) -> bool {
        self.0.keys().any(|k| k.starts_with(block) && k[block.len()..].starts_with('.'))
    }
}

fn number(k: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .parse()
        .map_err(|_| parse_err(format!("`{k}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(format!("`{k}`: `{v}` is not finite")));
    }
    Ok(x)
}

/// Whitespace or comma separated numbers.
pub fn number_list(k: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| number(k, s))
        .collect()
}

/// `(c, p1, p2, p3) (c, p1, p2, p3) ...`
pub fn parse_monomials(k: &str, v: &str) -> Result<Poly3, CliError> {
    let mut terms = Vec::new();
    let mut rest = v.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| parse_err(format!("`{k}`: expected `(` in `{v}`")))?;
        let end = body
            .find(')')
            .ok_or_else(|| parse_err(format!("`{k}`: unclosed `(` in `{v}`")))?;
        let parts: Vec<&str> = body[..end].split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(parse_err(format!("`{k}`: a term needs `(c, p1, p2, p3)`")));
        }
        let c = number(k, parts[0])?;
        let mut p = [0u32; 3];
        for (slot, s) in p.iter_mut().zip(&parts[1..]) {
            *slot = s
                .parse()
                .map_err(|_| parse_err(format!("`{k}`: power `{s}` is not a non-negative integer")))?;
        }
        terms.push(Monomial::new(c, p[0], p[1], p[2]));
        rest = body[end + 1..].trim_start();
    }
    Ok(Poly3::from_terms(terms))
}

fn parse_vertices(v: &str) -> Result<Vec<[f64; 2]>, CliError> {
    v.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            let xs = number_list("section.vertices", p)?;
            match xs[..] {
                [x, y] => Ok([x, y]),
                _ => Err(parse_err(format!("section.vertices: `{p}` is not a point `x, y`"))),
            }
        })
        .collect()
}

fn degree(k: &str, x: f64) -> Result<usize, CliError> {
    if x < 0.0 || x.fract() != 0.0 {
        return Err(parse_err(format!("`{k}`: {x} is not a non-negative integer")));
    }
    Ok(x as usize)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let p = Pairs(parse_pairs(text)?);
    for block in ["moduli", "section", "geometry"] {
        if !p.has_block(block) {
            return Err(parse_err(format!("missing block `{block}`")));
        }
    }

    let tau_r = p.num("solver.tau_r")?.unwrap_or(1.0);
    let (moduli, isotropic) = match p.str("moduli.kind").unwrap_or("transverse") {
        "transverse" => (
            MaterialModuli::new(
                p.need("moduli.mu")?,
                p.need("moduli.lambda")?,
                p.need("moduli.tau1")?,
                p.need("moduli.tau2")?,
                p.need("moduli.gamma")?,
                tau_r,
            ),
            None,
        ),
        "isotropic" => {
            let (l, mu) = (p.need("moduli.lambda")?, p.need("moduli.mu")?);
            let m = isotropic_moduli(l, mu, tau_r).map_err(CliError::Solver)?;
            (m, Some((l, mu)))
        }
        other => return Err(parse_err(format!("moduli.kind: unknown kind `{other}`"))),
    };

    let shape = match p.str("section.kind") {
        Some("rectangle") => SectionShape::Rectangle {
            w: p.need("section.width")?,
            h: p.need("section.height")?,
        },
        Some("ellipse") => SectionShape::Ellipse {
            a: p.need("section.a")?,
            b: p.need("section.b")?,
        },
        Some("polygon") => SectionShape::Polygon(parse_vertices(
            p.str("section.vertices")
                .ok_or_else(|| parse_err("missing key `section.vertices`"))?,
        )?),
        Some(other) => return Err(parse_err(format!("section.kind: unknown kind `{other}`"))),
        None => return Err(parse_err("missing key `section.kind`")),
    };
    let section = build_section(shape).map_err(|e| parse_err(e.to_string()))?;

    let length = p.num("geometry.length")?.unwrap_or(1.0);
    let eps_r = p.need("geometry.eps_r")?;
    if !(length > 0.0) {
        return Err(parse_err("geometry.length must be positive"));
    }
    if !(eps_r > 0.0 && eps_r < 1.0) {
        return Err(parse_err("geometry.eps_r must lie in (0, 1)"));
    }

    let mut loads = LoadSpec::zero();
    for (name, slot) in [("body", &mut loads.body), ("lateral", &mut loads.lateral), ("end", &mut loads.end)] {
        for (i, poly) in slot.iter_mut().enumerate() {
            let k = format!("loads.{name}.{}", i + 1);
            if let Some(v) = p.str(&k) {
                *poly = parse_monomials(&k, v)?;
            }
        }
    }
    loads.validate().map_err(|e| parse_err(e.to_string()))?;
    match p.str("loads.frame").unwrap_or("scaled") {
        "scaled" => {}
        "real" => loads = scale_real_loads(&loads, eps_r).map_err(|e| parse_err(e.to_string()))?,
        other => return Err(parse_err(format!("loads.frame: unknown frame `{other}`"))),
    }

    let degrees = match p.list("solver.degrees")? {
        None => [4, 4, 10],
        Some(v) if v.len() == 3 => [
            degree("solver.degrees", v[0])?,
            degree("solver.degrees", v[1])?,
            degree("solver.degrees", v[2])?,
        ],
        Some(_) => return Err(parse_err("solver.degrees needs three integers")),
    };
    let degree_1d = match p.num("solver.degree_1d")? {
        Some(x) => degree("solver.degree_1d", x)?,
        None => 10,
    };
    if degree_1d == 0 {
        return Err(parse_err("solver.degree_1d must be positive"));
    }

    let eps_grid = p.list("sweep.eps")?.unwrap_or_else(default_eps_grid);
    check_grid(&eps_grid).map_err(|e| parse_err(format!("sweep.eps: {e}")))?;
    let bn_grid = p.list("bn.eps_r")?.unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
    check_grid(&bn_grid).map_err(|e| parse_err(format!("bn.eps_r: {e}")))?;
    if bn_grid.iter().any(|&e| e >= 1.0) {
        return Err(parse_err("bn.eps_r values must lie in (0, 1)"));
    }
    let eps = p.num("solver.eps")?;
    if eps.is_some_and(|e| !(e > 0.0)) {
        return Err(parse_err("solver.eps must be positive"));
    }

    Ok(ExperimentConfig {
        moduli,
        isotropic,
        section,
        length,
        eps_r,
        loads,
        degrees,
        degree_1d,
        eps_grid,
        eps,
        bn_grid,
        recovery_field: p.str("recovery.field").map(String::from),
        out_dir: p.str("output.dir").map(String::from),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTILEVER: &str = "
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
    fn reads_the_cantilever() {
        let c = parse_config(CANTILEVER).unwrap();
        assert_eq!(c.moduli.tau1, 3.0);
        assert_eq!(c.degrees, [4, 4, 10]);
        assert_eq!(c.loads.end[0].eval([0.3, 0.2, 1.0]), 1.0);
        assert_eq!(c.eps_grid.len(), 5);
    }

    #[test]
    fn monomial_lists() {
        let p = parse_monomials("k", "(2, 1, 0, 0) (0.5,0,0,2)").unwrap();
        assert_eq!(p.eval([3.0, 1.0, 2.0]), 2.0 * 3.0 + 0.5 * 4.0);
        assert!(parse_monomials("k", "(1, 0, 0)").is_err());
        assert!(parse_monomials("k", "1, 0, 0, 0").is_err());
        assert!(parse_monomials("k", "(1, -1, 0, 0)").is_err());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_config(&format!("{CANTILEVER}\nmoduli.mu = 2")).is_err());
        assert!(parse_config(&format!("{CANTILEVER}\nmoduli.nu = 2")).is_err());
        assert!(parse_config(&format!("{CANTILEVER}\nsweep.eps = 0.01 0.1")).is_err());
        assert!(parse_config("moduli.mu = 1").is_err());
        assert!(parse_config(&CANTILEVER.replace("geometry.eps_r = 0.1", "geometry.eps_r = x")).is_err());
    }

    #[test]
    fn isotropic_block() {
        let text = CANTILEVER
            .replace("moduli.tau1 = 3", "moduli.kind = isotropic")
            .replace("moduli.tau2 = 1", "")
            .replace("moduli.gamma = 1", "");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.isotropic, Some((1.0, 1.0)));
        assert_eq!(c.moduli.tau1, 3.0);
    }
}
