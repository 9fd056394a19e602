//! Re-verification of externally supplied points with the flow-only oracle.

use std::f64::consts::TAU;
use std::path::Path;

use rfh_core::symplectic::{leafwise_check, SymplecticError};
use serde::Serialize;

use crate::config::RunConfig;
use crate::find::coordinate_headers;
use crate::output::{real, write_json, CsvOut};
use crate::setup::{build_hamiltonian, build_surface, leaf_options};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct InputPoint {
    pub coords: Vec<f64>,
    /// Leaf time claimed by whoever produced the point; widens the search window.
    pub leaf_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub point: InputPoint,
    pub verified: bool,
    pub off_surface: bool,
    pub leaf_time: Option<f64>,
    pub leaf_residual: Option<f64>,
    pub surface_residual: f64,
    pub message: String,
}

/// Reads `x1..xn, y1..yn` and an optional `leaf_time` column by name. An empty file has no points.
pub fn read_points(path: &Path, n: usize) -> Result<Vec<InputPoint>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let cols: Vec<usize> = coordinate_headers(n)
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| CliError::Config(format!("{}: missing column `{name}`", path.display())))
        })
        .collect::<Result<_, _>>()?;
    let lt = headers.iter().position(|h| h.trim() == "leaf_time");
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| {
            rec.get(i)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{}: row {}: {e}", path.display(), line + 1)))
        };
        let coords = cols.iter().map(|&i| field(i)).collect::<Result<Vec<_>, _>>()?;
        let leaf_time = lt.and_then(|i| field(i).ok());
        out.push(InputPoint { coords, leaf_time });
    }
    Ok(out)
}

pub fn points_path(c: &RunConfig, dir: &Path) -> std::path::PathBuf {
    c.points.clone().unwrap_or_else(|| dir.join("reports.csv"))
}

pub fn run_verify(c: &RunConfig, points: Vec<InputPoint>) -> Result<Vec<Verification>, CliError> {
    let surface = build_surface(c)?;
    let h = build_hamiltonian(c, &surface)?;
    let opts = leaf_options(c);
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let t_max = c.leaf_t_max.unwrap_or_else(|| p.leaf_time.map_or(10.0 * TAU, |s| 1.25 * s.abs() + TAU));
        let surface_residual = surface.value(1.0, &p.coords).map_or(f64::NAN, f64::abs);
        let mut v = Verification {
            point: p,
            verified: false,
            off_surface: false,
            leaf_time: None,
            leaf_residual: None,
            surface_residual,
            message: String::new(),
        };
        match leafwise_check(&surface, &h, &v.point.coords, t_max, c.tol_verify, opts) {
            Ok(check) => {
                v.verified = check.verified;
                v.leaf_time = Some(check.leaf_time);
                v.leaf_residual = Some(check.residual);
            }
            Err(e) => {
                v.off_surface = matches!(e, SymplecticError::NotOnSurface(_) | SymplecticError::DimensionMismatch { .. });
                v.message = e.to_string();
            }
        }
        out.push(v);
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifySummary {
    command: &'static str,
    points: usize,
    verified: usize,
    off_surface: usize,
    pass_rate: Option<f64>,
    tolerance: f64,
}

pub fn write_verify(results: &[Verification], c: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let mut header: Vec<String> = ["index", "verified", "off_surface", "leaf_time", "leaf_residual", "surface_residual", "message"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(coordinate_headers(c.n));
    let mut w = CsvOut::create(&dir.join("verification.csv"), &header)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), real);
    for (i, v) in results.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            v.verified.to_string(),
            v.off_surface.to_string(),
            opt(v.leaf_time),
            opt(v.leaf_residual),
            real(v.surface_residual),
            v.message.clone(),
        ];
        row.extend(v.point.coords.iter().map(|&x| real(x)));
        w.row(&row)?;
    }
    w.finish()?;
    let verified = results.iter().filter(|v| v.verified).count();
    let summary = VerifySummary {
        command: "verify",
        points: results.len(),
        verified,
        off_surface: results.iter().filter(|v| v.off_surface).count(),
        pass_rate: (!results.is_empty()).then(|| verified as f64 / results.len() as f64),
        tolerance: c.tol_verify,
    };
    write_json(&dir.join("verification.json"), &summary)
}
