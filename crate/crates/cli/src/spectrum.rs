//! Algebraic action spectrum, plus an affine fit of observed critical actions against `k`.

use std::f64::consts::TAU;
use std::path::Path;

use rfh_core::algebra::action_spectrum;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{real, write_json, CsvOut};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `max |a_i − (slope·k_i + intercept)|`.
    pub max_residual: f64,
    /// `−slope`.
    pub quantum: f64,
    pub ratio_to_two_pi: f64,
}

/// Least squares `a ≈ slope·k + intercept`; `None` with fewer than two distinct `k`.
pub fn fit_actions(data: &[(i64, f64)]) -> Option<LinearFit> {
    let m = data.len() as f64;
    let mean_k = data.iter().map(|d| d.0 as f64).sum::<f64>() / m;
    let mean_a = data.iter().map(|d| d.1).sum::<f64>() / m;
    let skk: f64 = data.iter().map(|d| (d.0 as f64 - mean_k).powi(2)).sum();
    if data.len() < 2 || skk == 0.0 {
        return None;
    }
    let ska: f64 = data.iter().map(|d| (d.0 as f64 - mean_k) * (d.1 - mean_a)).sum();
    let slope = ska / skk;
    let intercept = mean_a - slope * mean_k;
    let residual = |d: &(i64, f64)| d.1 - slope * d.0 as f64 - intercept;
    let ss_res: f64 = data.iter().map(|d| residual(d).powi(2)).sum();
    let ss_tot: f64 = data.iter().map(|d| (d.1 - mean_a).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let max_residual = data.iter().map(|d| residual(d).abs()).fold(0.0, f64::max);
    Some(LinearFit { slope, intercept, r_squared, max_residual, quantum: -slope, ratio_to_two_pi: -slope / TAU })
}

#[derive(Clone, Debug)]
pub struct SpectrumOutcome {
    pub algebraic: Vec<(i64, f64)>,
    pub observed: Vec<(i64, f64)>,
    pub fit: Option<LinearFit>,
}

/// Endpoint actions of seeds that reached `r = 1` in a previous `find` run.
fn observed_actions(path: &Path) -> Result<Vec<(i64, f64)>, CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("{}: missing column `{name}`", path.display())))
    };
    let (ck, cr, ca) = (col("seed_k")?, col("r")?, col("action")?);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let parsed = (rec[ck].parse::<i64>(), rec[cr].parse::<f64>(), rec[ca].parse::<f64>());
        if let (Ok(k), Ok(r), Ok(a)) = parsed {
            if r == 1.0 {
                out.push((k, a));
            }
        }
    }
    Ok(out)
}

pub fn run_spectrum(c: &RunConfig, dir: &Path) -> Result<SpectrumOutcome, CliError> {
    let values = action_spectrum(c.n, c.algebra_window, c.quantum)?;
    let algebraic = values.iter().map(|&a| ((-a / c.quantum).round() as i64, a)).collect();
    let cps = dir.join("critical_points.csv");
    let observed = if cps.is_file() { observed_actions(&cps)? } else { Vec::new() };
    let fit = fit_actions(&observed);
    Ok(SpectrumOutcome { algebraic, observed, fit })
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    command: &'static str,
    window: i64,
    quantum: f64,
    algebraic: Vec<f64>,
    observed: usize,
    fit: Option<&'a LinearFit>,
}

pub fn write_spectrum(o: &SpectrumOutcome, c: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let mut w = CsvOut::create(&dir.join("spectrum.csv"), &["source", "k", "action"])?;
    for (source, rows) in [("algebraic", &o.algebraic), ("observed", &o.observed)] {
        for (k, a) in rows {
            w.row(&[source.to_string(), k.to_string(), real(*a)])?;
        }
    }
    w.finish()?;
    let summary = SpectrumSummary {
        command: "spectrum",
        window: c.algebra_window,
        quantum: c.quantum,
        algebraic: o.algebraic.iter().map(|p| p.1).collect(),
        observed: o.observed.len(),
        fit: o.fit.as_ref(),
    };
    write_json(&dir.join("spectrum.json"), &summary)
}
