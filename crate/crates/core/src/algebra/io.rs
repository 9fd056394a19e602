use std::fmt::Write;

use super::{GradedComplexGF2, HomologyTable};

/// `id,k,l,branch,degree,action_label`.
pub fn generators_csv(complex: &GradedComplexGF2) -> String {
    let mut s = String::from("id,k,l,branch,degree,action_label\n");
    for (i, g) in complex.generators().iter().enumerate() {
        writeln!(s, "{i},{},{},{},{},{}", g.k, g.l, g.branch.as_str(), g.degree, g.action_label).unwrap();
    }
    s
}

/// `source,target,source_label,target_label`, one row per nonzero entry of `∂`.
pub fn edges_csv(complex: &GradedComplexGF2) -> String {
    let gens = complex.generators();
    let mut s = String::from("source,target,source_label,target_label\n");
    for (j, i) in complex.edges() {
        writeln!(s, "{j},{i},{},{}", gens[j], gens[i]).unwrap();
    }
    s
}

/// `degree,rank,generators,boundary_affected`.
pub fn homology_csv(table: &HomologyTable) -> String {
    let mut s = String::from("degree,rank,generators,boundary_affected\n");
    for e in &table.entries {
        writeln!(s, "{},{},{},{}", e.degree, e.rank, e.generators, e.boundary_affected).unwrap();
    }
    s
}
