use std::collections::BTreeMap;

use super::{GradedComplexGF2, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyEntry {
    pub degree: i64,
    pub rank: usize,
    pub generators: usize,
    /// Truncation of the `k`-window can create homology here.
    pub boundary_affected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyTable {
    pub entries: Vec<HomologyEntry>,
    pub window: Option<i64>,
}

impl HomologyTable {
    pub fn rank(&self, degree: i64) -> usize {
        self.entries.iter().find(|e| e.degree == degree).map_or(0, |e| e.rank)
    }

    pub fn ranks(&self) -> Vec<(i64, usize)> {
        self.entries.iter().map(|e| (e.degree, e.rank)).collect()
    }

    pub fn total_rank(&self) -> usize {
        self.entries.iter().map(|e| e.rank).sum()
    }
}

/// Rank of a GF(2) matrix given as bit-packed rows.
fn rank_gf2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let words = rows.first().map_or(0, Vec::len);
    for col in 0..words * 64 {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[w] & bit != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix of `∂ : C_d → C_{d−1}` as rows indexed by `C_d`.
fn rank_of_differential(complex: &GradedComplexGF2, by_degree: &BTreeMap<i64, Vec<usize>>, d: i64) -> usize {
    let (Some(src), Some(dst)) = (by_degree.get(&d), by_degree.get(&(d - 1))) else {
        return 0;
    };
    let position: BTreeMap<usize, usize> = dst.iter().enumerate().map(|(p, &g)| (g, p)).collect();
    let words = dst.len().div_ceil(64);
    let rows = src
        .iter()
        .map(|&g| {
            let mut row = vec![0u64; words];
            for i in complex.boundary(g) {
                let p = position[i];
                row[p / 64] ^= 1 << (p % 64);
            }
            row
        })
        .collect();
    rank_gf2(rows)
}

/// `rank H_d = dim C_d − rank ∂_d − rank ∂_{d+1}` over GF(2).
pub fn gf2_homology(complex: &GradedComplexGF2) -> Result<HomologyTable> {
    complex.check_square_zero()?;
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in complex.generators().iter().enumerate() {
        by_degree.entry(g.degree).or_default().push(i);
    }
    let entries = by_degree
        .iter()
        .map(|(&d, gens)| {
            let out = rank_of_differential(complex, &by_degree, d);
            let inc = rank_of_differential(complex, &by_degree, d + 1);
            HomologyEntry {
                degree: d,
                rank: gens.len() - out - inc,
                generators: gens.len(),
                boundary_affected: complex.boundary_degrees().contains(&d),
            }
        })
        .collect();
    Ok(HomologyTable { entries, window: complex.window() })
}
