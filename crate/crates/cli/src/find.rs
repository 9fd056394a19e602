//! Seeds → continuation → extraction → verification → dedup.

use std::path::Path;

use rayon::prelude::*;
use rfh_core::solver::{
    check_reflection_symmetry, continue_to_target, dedup_reports, extract_leafwise_point, seed_loop, select_seed_base,
    CriticalPoint, RabinowitzProblem, ReportCluster, SolverError, SymmetryCheck,
};
use rfh_core::symplectic::LeafwiseReport;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{real, write_json, CsvOut};
use crate::setup::{build_problem, continuation_options, extract_options};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStatus {
    Verified,
    ExtractionInvalid,
    ContinuationFailed,
    SolverFailed,
}

impl SeedStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Verified => "verified",
            Self::ExtractionInvalid => "extraction_invalid",
            Self::ContinuationFailed => "continuation_failed",
            Self::SolverFailed => "solver_failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeedOutcome {
    pub seed_k: i64,
    pub base: Vec<f64>,
    pub status: SeedStatus,
    pub message: String,
    /// Action of the refined seed at `r = 0`.
    pub seed_action: Option<f64>,
    /// Last accepted critical point; at `r = 1` unless continuation failed.
    pub endpoint: Option<CriticalPoint>,
    pub steps: usize,
    pub rejected: usize,
    pub symmetry: Option<SymmetryCheck>,
    pub report: Option<LeafwiseReport>,
}

#[derive(Clone, Debug)]
pub struct FindOutcome {
    pub seeds: Vec<SeedOutcome>,
    pub reports: Vec<LeafwiseReport>,
    pub clusters: Vec<ReportCluster>,
    pub dedup_radius: f64,
}

impl FindOutcome {
    pub fn verified(&self) -> usize {
        self.reports.len()
    }

    pub fn closed_flags(&self) -> usize {
        self.clusters.iter().filter(|c| c.representative.on_closed_characteristic).count()
    }
}

fn run_seed(problem: &RabinowitzProblem, c: &RunConfig, k: i64) -> SeedOutcome {
    let mut out = SeedOutcome {
        seed_k: k,
        base: Vec::new(),
        status: SeedStatus::SolverFailed,
        message: String::new(),
        seed_action: None,
        endpoint: None,
        steps: 0,
        rejected: 0,
        symmetry: None,
        report: None,
    };
    let fail = |mut out: SeedOutcome, status, e: &dyn std::fmt::Display| {
        out.status = status;
        out.message = e.to_string();
        out
    };
    let selection = match select_seed_base(problem, k, c.seed_starts) {
        Ok(s) => s,
        Err(e) => return fail(out, SeedStatus::SolverFailed, &e),
    };
    out.base = selection.base;
    let seed = match seed_loop(k, &out.base, problem.num_samples(), problem.weights()) {
        Ok(s) => s,
        Err(e) => return fail(out, SeedStatus::SolverFailed, &e),
    };
    let trace = match continue_to_target(problem, k, &seed, continuation_options(c)) {
        Ok(t) => t,
        Err(SolverError::StepUnderflow { r, trace }) => {
            out.seed_action = trace.steps.first().map(|s| s.point.action);
            out.steps = trace.steps.len();
            out.rejected = trace.rejected;
            out.endpoint = Some(trace.endpoint().clone());
            return fail(out, SeedStatus::ContinuationFailed, &format!("step underflow at r = {r}"));
        }
        Err(e) => return fail(out, SeedStatus::ContinuationFailed, &e),
    };
    out.seed_action = trace.steps.first().map(|s| s.point.action);
    out.steps = trace.steps.len();
    out.rejected = trace.rejected;
    let cp = trace.endpoint().clone();
    out.symmetry = check_reflection_symmetry(problem, &cp).ok();
    let extracted = extract_leafwise_point(problem, &cp, extract_options(c));
    out.endpoint = Some(cp);
    match extracted {
        Ok(report) => {
            out.status = SeedStatus::Verified;
            out.report = Some(report);
            out
        }
        Err(SolverError::ExtractionInvalid { report }) => {
            let msg = format!("leaf residual {}", report.residuals.leaf);
            fail(out, SeedStatus::ExtractionInvalid, &msg)
        }
        Err(e) => fail(out, SeedStatus::ExtractionInvalid, &e),
    }
}

pub fn run_find(c: &RunConfig, jobs: Option<usize>) -> Result<FindOutcome, CliError> {
    if c.seeds.is_empty() {
        return Err(CliError::Config("`find` needs a nonempty seed list".into()));
    }
    let problem = build_problem(c)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let mut seeds: Vec<SeedOutcome> = pool.install(|| c.seeds.par_iter().map(|&k| run_seed(&problem, c, k)).collect());
    let action = |s: &SeedOutcome| s.endpoint.as_ref().map_or(f64::NAN, |e| e.action);
    seeds.sort_by(|a, b| a.seed_k.cmp(&b.seed_k).then(action(a).total_cmp(&action(b))));
    let reports: Vec<LeafwiseReport> = seeds.iter().filter_map(|s| s.report.clone()).collect();
    let dedup_radius = c.tol_dedup.unwrap_or(1e-3 * problem.surface().min_rho());
    let clusters = dedup_reports(&reports, dedup_radius);
    Ok(FindOutcome { seeds, reports, clusters, dedup_radius })
}

#[derive(Serialize)]
struct FindSummary<'a> {
    command: &'static str,
    n: usize,
    samples: usize,
    seeds: Vec<i64>,
    verified_reports: usize,
    distinct_points: usize,
    closed_characteristic_clusters: usize,
    flagged_clusters: usize,
    failures: Vec<Failure<'a>>,
    dedup_radius: f64,
    verification_tolerance: f64,
}

#[derive(Serialize)]
struct Failure<'a> {
    seed_k: i64,
    status: &'a SeedStatus,
    message: &'a str,
}

pub fn coordinate_headers(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("y{i}"))).collect()
}

fn representative_index(outcome: &FindOutcome, cl: &ReportCluster) -> usize {
    cl.members
        .iter()
        .copied()
        .find(|&i| outcome.reports[i].point == cl.representative.point)
        .unwrap_or(cl.members[0])
}

pub fn write_find(outcome: &FindOutcome, c: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let mut header: Vec<String> = [
        "index",
        "seed_k",
        "action",
        "leaf_time",
        "leaf_residual",
        "surface_residual",
        "gradient_norm",
        "on_closed_characteristic",
        "period",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(coordinate_headers(c.n));
    let mut reports = CsvOut::create(&dir.join("reports.csv"), &header)?;
    for (i, r) in outcome.reports.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            r.k_seed.to_string(),
            real(r.action),
            real(r.leaf_time),
            real(r.residuals.leaf),
            real(r.residuals.surface),
            real(r.residuals.gradient),
            r.on_closed_characteristic.to_string(),
            r.period.map_or(String::new(), real),
        ];
        row.extend(r.point.coords().iter().map(|&x| real(x)));
        reports.row(&row)?;
    }
    reports.finish()?;

    let mut clusters = CsvOut::create(
        &dir.join("clusters.csv"),
        &["cluster", "representative", "members", "seeds", "flagged", "on_closed_characteristic"],
    )?;
    for (i, cl) in outcome.clusters.iter().enumerate() {
        let join = |v: Vec<String>| v.join(";");
        clusters.row(&[
            i.to_string(),
            representative_index(outcome, cl).to_string(),
            join(cl.members.iter().map(usize::to_string).collect()),
            join(cl.seeds.iter().map(i64::to_string).collect()),
            cl.flagged.to_string(),
            cl.representative.on_closed_characteristic.to_string(),
        ])?;
    }
    clusters.finish()?;

    let mut cps = CsvOut::create(
        &dir.join("critical_points.csv"),
        &[
            "seed_k",
            "status",
            "r",
            "seed_action",
            "action",
            "eta",
            "gradient_norm",
            "steps",
            "rejected",
            "reflection_action_difference",
            "reflected_gradient_norm",
            "min_radius_ratio",
            "message",
        ],
    )?;
    let opt = |v: Option<f64>| v.map_or(String::new(), real);
    for s in &outcome.seeds {
        let e = s.endpoint.as_ref();
        cps.row(&[
            s.seed_k.to_string(),
            s.status.as_str().to_string(),
            opt(e.map(|e| e.r)),
            opt(s.seed_action),
            opt(e.map(|e| e.action)),
            opt(e.map(|e| e.state.eta)),
            opt(e.map(|e| e.gradient_norm)),
            s.steps.to_string(),
            s.rejected.to_string(),
            opt(s.symmetry.map(|y| y.action_difference)),
            opt(s.symmetry.map(|y| y.reflected_gradient_norm)),
            opt(s.symmetry.map(|y| y.radius_ratio)),
            s.message.clone(),
        ])?;
    }
    cps.finish()?;

    let summary = FindSummary {
        command: "find",
        n: c.n,
        samples: c.samples,
        seeds: c.seeds.clone(),
        verified_reports: outcome.verified(),
        distinct_points: outcome.clusters.len(),
        closed_characteristic_clusters: outcome.closed_flags(),
        flagged_clusters: outcome.clusters.iter().filter(|c| c.flagged).count(),
        failures: outcome
            .seeds
            .iter()
            .filter(|s| s.status != SeedStatus::Verified)
            .map(|s| Failure { seed_k: s.seed_k, status: &s.status, message: &s.message })
            .collect(),
        dedup_radius: outcome.dedup_radius,
        verification_tolerance: c.tol_verify,
    };
    write_json(&dir.join("summary.json"), &summary)
}
