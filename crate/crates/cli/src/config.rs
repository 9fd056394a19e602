//! Flat `key = value` run configuration. `#` starts a comment; unknown keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rfh_core::symplectic::{HamiltonianFamily, Monomial};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    Round,
    /// Complex radii, one per plane.
    Ellipsoid(Vec<f64>),
    /// `ρ = 1 + Σ c_m θ^{e_m}`.
    Polynomial(Vec<Monomial>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    TimeSplit,
    Plain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub samples: usize,
    pub surface: SurfaceSpec,
    pub hamiltonian: Option<HamiltonianFamily>,
    pub amplitude: f64,
    pub window: (f64, f64),
    pub margin: f64,
    pub seeds: Vec<i64>,
    pub seed_starts: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub tol_gradient: f64,
    pub tol_verify: f64,
    pub tol_dedup: Option<f64>,
    pub leaf_t_max: Option<f64>,
    pub probe_t_max: Option<f64>,
    pub integrator_step: f64,
    pub quantum: f64,
    pub algebra_window: i64,
    pub out: PathBuf,
    pub mode: Mode,
    pub points: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            samples: 256,
            surface: SurfaceSpec::Round,
            hamiltonian: None,
            amplitude: 1e-2,
            window: (0.02, 0.48),
            margin: 0.05,
            seeds: vec![1, 2, 3],
            seed_starts: 8,
            initial_step: 1.0 / 16.0,
            min_step: 1e-6,
            tol_gradient: 1e-8,
            tol_verify: 1e-4,
            tol_dedup: None,
            leaf_t_max: None,
            probe_t_max: None,
            integrator_step: 1e-2,
            quantum: std::f64::consts::TAU,
            algebra_window: 2,
            out: PathBuf::from("out"),
            mode: Mode::TimeSplit,
            points: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "n",
    "samples",
    "surface",
    "surface.axes",
    "surface.terms",
    "hamiltonian",
    "hamiltonian.amplitude",
    "hamiltonian.window",
    "hamiltonian.margin",
    "seeds",
    "seed.starts",
    "continuation.initial_step",
    "continuation.min_step",
    "tol.gradient",
    "tol.verify",
    "tol.dedup",
    "leaf.t_max",
    "leaf.probe_t_max",
    "integrator.step",
    "quantum",
    "window",
    "out",
    "mode",
    "points",
];

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key} = {value}`: {why}"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad(key, value, e))
}

fn positive(key: &str, value: &str) -> Result<f64, CliError> {
    let v: f64 = parse(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, value, "must be positive"))
    }
}

fn reals(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|s| parse(key, s.trim())).collect()
}

/// `1,2,5` or `1..5` or a mix such as `-2..-1, 3`.
fn seeds(value: &str) -> Result<Vec<i64>, CliError> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (i64, i64) = (parse("seeds", a.trim())?, parse("seeds", b.trim())?);
                if a > b {
                    return Err(bad("seeds", value, "empty range"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse("seeds", part)?),
        }
    }
    Ok(out)
}

/// `c:e_1,…,e_2n; …`.
fn terms(value: &str, dim: usize) -> Result<Vec<Monomial>, CliError> {
    let mut out = Vec::new();
    for term in value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (c, e) = term.split_once(':').ok_or_else(|| bad("surface.terms", term, "expected `coeff:exponents`"))?;
        let coeff: f64 = parse("surface.terms", c.trim())?;
        let exponents: Vec<u32> = e.split(',').map(|s| parse("surface.terms", s.trim())).collect::<Result<_, _>>()?;
        if exponents.len() != dim {
            return Err(bad("surface.terms", term, format!("needs {dim} exponents")));
        }
        out.push(Monomial { coeff, exponents });
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("line {}: unknown key `{k}`", lineno + 1)));
            }
            if raw.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
            }
        }
        let mut c = Self::default();
        let get = |k: &str| raw.get(k).map(String::as_str);
        if let Some(v) = get("n") {
            c.n = parse("n", v)?;
            if c.n == 0 {
                return Err(bad("n", v, "must be at least 1"));
            }
        }
        if let Some(v) = get("samples") {
            c.samples = parse("samples", v)?;
        }
        let dim = 2 * c.n;
        c.surface = match get("surface").unwrap_or("round") {
            "round" => SurfaceSpec::Round,
            "ellipsoid" => {
                let v = get("surface.axes").ok_or_else(|| CliError::Config("ellipsoid needs `surface.axes`".into()))?;
                let axes = reals("surface.axes", v)?;
                if axes.len() != c.n && axes.len() != dim {
                    return Err(bad("surface.axes", v, format!("needs {} complex radii or {dim} real semi-axes", c.n)));
                }
                SurfaceSpec::Ellipsoid(axes)
            }
            "polynomial" => {
                let v = get("surface.terms").ok_or_else(|| CliError::Config("polynomial surface needs `surface.terms`".into()))?;
                SurfaceSpec::Polynomial(terms(v, dim)?)
            }
            other => return Err(bad("surface", other, "expected round, ellipsoid or polynomial")),
        };
        c.hamiltonian = match get("hamiltonian").unwrap_or("none") {
            "none" => None,
            other => Some(other.parse().map_err(|e| bad("hamiltonian", other, e))?),
        };
        if let Some(v) = get("hamiltonian.amplitude") {
            c.amplitude = parse("hamiltonian.amplitude", v)?;
        }
        if let Some(v) = get("hamiltonian.window") {
            match reals("hamiltonian.window", v)?.as_slice() {
                &[a, b] => c.window = (a, b),
                _ => return Err(bad("hamiltonian.window", v, "expected `start, end`")),
            }
        }
        if let Some(v) = get("hamiltonian.margin") {
            c.margin = positive("hamiltonian.margin", v)?;
        }
        if let Some(v) = get("seeds") {
            c.seeds = seeds(v)?;
            if c.seeds.is_empty() {
                return Err(bad("seeds", v, "empty seed list"));
            }
        }
        if let Some(v) = get("seed.starts") {
            c.seed_starts = parse("seed.starts", v)?;
        }
        if let Some(v) = get("continuation.initial_step") {
            c.initial_step = positive("continuation.initial_step", v)?;
        }
        if let Some(v) = get("continuation.min_step") {
            c.min_step = positive("continuation.min_step", v)?;
        }
        if let Some(v) = get("tol.gradient") {
            c.tol_gradient = positive("tol.gradient", v)?;
        }
        if let Some(v) = get("tol.verify") {
            c.tol_verify = positive("tol.verify", v)?;
        }
        if let Some(v) = get("tol.dedup") {
            c.tol_dedup = Some(positive("tol.dedup", v)?);
        }
        if let Some(v) = get("leaf.t_max") {
            c.leaf_t_max = Some(positive("leaf.t_max", v)?);
        }
        if let Some(v) = get("leaf.probe_t_max") {
            c.probe_t_max = Some(positive("leaf.probe_t_max", v)?);
        }
        if let Some(v) = get("integrator.step") {
            c.integrator_step = positive("integrator.step", v)?;
        }
        if let Some(v) = get("quantum") {
            c.quantum = positive("quantum", v)?;
        }
        if let Some(v) = get("window") {
            c.algebra_window = parse("window", v)?;
            if c.algebra_window < 1 {
                return Err(bad("window", v, "must be at least 1"));
            }
        }
        if let Some(v) = get("out") {
            c.out = PathBuf::from(v);
        }
        c.mode = match get("mode").unwrap_or("time-split") {
            "time-split" => Mode::TimeSplit,
            "plain" => Mode::Plain,
            other => return Err(bad("mode", other, "expected time-split or plain")),
        };
        if let Some(v) = get("points") {
            c.points = Some(PathBuf::from(v));
        }
        Ok(c)
    }
}
