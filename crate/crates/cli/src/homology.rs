//! Ladder and equivariant homology tables, checked against the expected rank pattern.

use std::path::Path;

use rfh_core::algebra::{
    edges_csv, generators_csv, gf2_homology, homology_csv, quotient_by_involution, rabinowitz_ladder_with,
    GradedComplexGF2, HomologyTable, LadderOptions,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{write_json, write_text};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct HomologyOutcome {
    pub ladder: GradedComplexGF2,
    pub quotient: GradedComplexGF2,
    pub ladder_homology: HomologyTable,
    pub equivariant_homology: HomologyTable,
    pub mismatches: Vec<String>,
}

impl HomologyOutcome {
    pub fn pattern_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Degrees `[−2nK, 2nK + 2n − 1]` covered by the window.
pub fn window_degrees(n: usize, window: i64) -> (i64, i64) {
    let two_n = 2 * n as i64;
    (-two_n * window, two_n * window + two_n - 1)
}

/// Equivariant rank 1 throughout the window; ladder rank 0 except 1 at each truncation boundary.
pub fn pattern_mismatches(n: usize, window: i64, ladder: &HomologyTable, equivariant: &HomologyTable, boundary: &[i64]) -> Vec<String> {
    let (lo, hi) = window_degrees(n, window);
    let mut out = Vec::new();
    for d in lo..=hi {
        let r = equivariant.rank(d);
        if r != 1 {
            out.push(format!("equivariant rank {r} in degree {d}, expected 1"));
        }
    }
    for e in &equivariant.entries {
        if (e.degree < lo || e.degree > hi) && e.rank != 0 {
            out.push(format!("equivariant rank {} in degree {} outside the window", e.rank, e.degree));
        }
    }
    for &d in boundary {
        if ladder.rank(d) != 1 {
            out.push(format!("ladder rank {} in boundary degree {d}, expected 1", ladder.rank(d)));
        }
    }
    for e in &ladder.entries {
        if !boundary.contains(&e.degree) && e.rank != 0 {
            out.push(format!("ladder rank {} in interior degree {}, expected 0", e.rank, e.degree));
        }
    }
    out
}

pub fn run_homology(c: &RunConfig) -> Result<HomologyOutcome, CliError> {
    let opts = LadderOptions { quantum: c.quantum, ..LadderOptions::default() };
    let ladder = rabinowitz_ladder_with(c.n, c.algebra_window, opts)?;
    let quotient = quotient_by_involution(&ladder)?;
    let ladder_homology = gf2_homology(&ladder)?;
    let equivariant_homology = gf2_homology(&quotient)?;
    let mismatches =
        pattern_mismatches(c.n, c.algebra_window, &ladder_homology, &equivariant_homology, ladder.boundary_degrees());
    Ok(HomologyOutcome { ladder, quotient, ladder_homology, equivariant_homology, mismatches })
}

#[derive(Serialize)]
struct Ranks {
    degree: i64,
    rank: usize,
}

#[derive(Serialize)]
struct HomologySummary<'a> {
    command: &'static str,
    n: usize,
    window: i64,
    quantum: f64,
    degree_range: (i64, i64),
    ladder_generators: usize,
    equivariant_generators: usize,
    boundary_degrees: &'a [i64],
    ladder_ranks: Vec<Ranks>,
    equivariant_ranks: Vec<Ranks>,
    pattern_ok: bool,
    mismatches: &'a [String],
}

fn ranks(t: &HomologyTable) -> Vec<Ranks> {
    t.ranks().into_iter().map(|(degree, rank)| Ranks { degree, rank }).collect()
}

pub fn write_homology(o: &HomologyOutcome, c: &RunConfig, dir: &Path) -> Result<(), CliError> {
    write_text(&dir.join("ladder_generators.csv"), &generators_csv(&o.ladder))?;
    write_text(&dir.join("ladder_edges.csv"), &edges_csv(&o.ladder))?;
    write_text(&dir.join("homology.csv"), &homology_csv(&o.ladder_homology))?;
    write_text(&dir.join("equivariant_generators.csv"), &generators_csv(&o.quotient))?;
    write_text(&dir.join("equivariant_edges.csv"), &edges_csv(&o.quotient))?;
    write_text(&dir.join("equivariant_homology.csv"), &homology_csv(&o.equivariant_homology))?;
    let summary = HomologySummary {
        command: "homology",
        n: c.n,
        window: c.algebra_window,
        quantum: c.quantum,
        degree_range: window_degrees(c.n, c.algebra_window),
        ladder_generators: o.ladder.len(),
        equivariant_generators: o.quotient.len(),
        boundary_degrees: o.ladder.boundary_degrees(),
        ladder_ranks: ranks(&o.ladder_homology),
        equivariant_ranks: ranks(&o.equivariant_homology),
        pattern_ok: o.pattern_ok(),
        mismatches: &o.mismatches,
    };
    write_json(&dir.join("homology.json"), &summary)
}
