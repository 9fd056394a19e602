//! From critical points of `A_1` to verified leaf-wise intersection points.

use crate::symplectic::{
    closed_characteristic_probe, leafwise_check, LeafOptions, LeafwiseReport, PhasePoint, Residuals,
};

use super::functional::RabinowitzProblem;
use super::newton::CriticalPoint;
use super::{Result, SolverError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractOptions {
    pub tol: f64,
    /// Leaf-time search range; `None` uses `1.25 |η| + 2π`.
    pub t_max: Option<f64>,
    /// Horizon for the closed-characteristic probe; `None` uses `2 |η| + 4π`.
    pub probe_t_max: Option<f64>,
    pub leaf: LeafOptions,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { tol: 1e-4, t_max: None, probe_t_max: None, leaf: LeafOptions::default() }
    }
}

/// Reads off `x = v(0)`. On a time-split critical loop `v(½) = ψ_1(x)` and the second half
/// runs along the leaf, so `ψ_1(x)` sits on `L_S(x)` at leaf time `≈ −η`. The claim is then
/// checked by the flow-only oracle.
pub fn extract_leafwise_point(problem: &RabinowitzProblem, cp: &CriticalPoint, opts: ExtractOptions) -> Result<LeafwiseReport> {
    if !problem.weights().is_time_split() {
        return Err(SolverError::PlainExtraction);
    }
    if cp.r != 1.0 {
        return Err(SolverError::InvalidState(format!("critical point is at r = {}, not 1", cp.r)));
    }
    let surface = problem.surface();
    let x = cp.state.point(0).to_vec();
    let eta = cp.state.eta.abs();
    let t_max = opts.t_max.unwrap_or(1.25 * eta + std::f64::consts::TAU);
    let probe_t_max = opts.probe_t_max.unwrap_or(2.0 * eta + 2.0 * std::f64::consts::TAU);
    let surface_residual = surface.value(1.0, &x)?.abs();
    let check = leafwise_check(surface, problem.hamiltonian(), &x, t_max, opts.tol, opts.leaf)?;
    let probe = closed_characteristic_probe(surface, &x, probe_t_max, opts.tol, opts.leaf)?;
    let report = LeafwiseReport {
        point: PhasePoint::new(x)?,
        leaf_time: check.leaf_time,
        action: cp.action,
        k_seed: cp.seed_k,
        residuals: Residuals { leaf: check.residual, surface: surface_residual, gradient: cp.gradient_norm },
        on_closed_characteristic: probe.closed,
        period: probe.period,
    };
    if !check.verified {
        return Err(SolverError::ExtractionInvalid { report: Box::new(report) });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportCluster {
    pub representative: LeafwiseReport,
    /// Indices into the input list.
    pub members: Vec<usize>,
    /// Sorted, without repeats.
    pub seeds: Vec<i64>,
    /// Different seeds landed on one point of a closed leaf.
    pub flagged: bool,
}

/// Single-linkage clustering by point distance. The representative is the member with the
/// smallest `|k_seed|`, earliest on ties.
pub fn dedup_reports(reports: &[LeafwiseReport], radius: f64) -> Vec<ReportCluster> {
    let n = reports.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut c = i;
        while label[c] != r {
            let next = label[c];
            label[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if reports[i].point.distance(&reports[j].point) <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match order.iter().position(|&r| r == root) {
            Some(g) => groups[g].push(i),
            None => {
                order.push(root);
                groups.push(vec![i]);
            }
        }
    }
    groups
        .into_iter()
        .map(|members| {
            let rep = *members
                .iter()
                .min_by_key(|&&i| (reports[i].k_seed.unsigned_abs(), i))
                .expect("nonempty cluster");
            let mut seeds: Vec<i64> = members.iter().map(|&i| reports[i].k_seed).collect();
            seeds.sort_unstable();
            seeds.dedup();
            let closed = members.iter().any(|&i| reports[i].on_closed_characteristic);
            let flagged = closed && seeds.len() > 1;
            let mut representative = reports[rep].clone();
            representative.on_closed_characteristic |= flagged;
            ReportCluster { representative, members, seeds, flagged }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryCheck {
    /// `|A(−v, η) − A(v, η)|`.
    pub action_difference: f64,
    pub reflected_gradient_norm: f64,
    pub min_radius: f64,
    /// `min_t |v(t)| / min ρ`.
    pub radius_ratio: f64,
}

impl SymmetryCheck {
    pub fn holds(&self, tol: f64, gradient_tol: f64) -> bool {
        self.action_difference <= tol && self.reflected_gradient_norm <= gradient_tol && self.radius_ratio > 0.5
    }
}

/// The involution `v ↦ −v` applied to a critical point.
pub fn check_reflection_symmetry(problem: &RabinowitzProblem, cp: &CriticalPoint) -> Result<SymmetryCheck> {
    let reflected = cp.state.reflect();
    let a = problem.action(&cp.state, cp.r)?;
    let b = problem.action(&reflected, cp.r)?;
    let min_radius = cp.state.min_radius();
    Ok(SymmetryCheck {
        action_difference: (a - b).abs(),
        reflected_gradient_norm: problem.gradient_norm(&reflected, cp.r)?,
        min_radius,
        radius_ratio: min_radius / problem.surface().min_rho(),
    })
}
