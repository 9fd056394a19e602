//! GF(2) chain complexes: the Morse complex of `f = Σ i x_i²` on `S^{2n−1}`, the
//! Rabinowitz ladder over the critical manifolds `C_k`, their `Z/2` quotients, and homology.

mod complexes;
mod homology;
mod io;
mod morse;

pub use complexes::{quotient_by_involution, rabinowitz_ladder, rabinowitz_ladder_with, sphere_morse_complex, LadderOptions};
pub use homology::{gf2_homology, HomologyEntry, HomologyTable};
pub use io::{edges_csv, generators_csv, homology_csv};
pub use morse::morse_index_oracle;

use std::f64::consts::TAU;
use std::fmt;

use thiserror::Error;

/// Default action quantum for labels and the spectrum.
pub const PAPER_QUANTUM: f64 = TAU;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("∂∘∂ ≠ 0: generator {0} has nonzero ∂²")]
    NotAComplex(String),
    #[error("differential of {from} lands in degree {to}, expected one lower")]
    BadDegree { from: String, to: i64 },
    #[error("involution is not free on {0}")]
    NotFree(String),
    #[error("involution does not commute with ∂ at {0}")]
    NotChainMap(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Y,
    Z,
    Xi,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Y => "y",
            Self::Z => "z",
            Self::Xi => "xi",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub k: i64,
    pub l: usize,
    pub branch: Branch,
    pub degree: i64,
    pub action_label: f64,
}

impl Generator {
    pub fn new(n: usize, k: i64, l: usize, branch: Branch, quantum: f64) -> Self {
        Self { k, l, branch, degree: l as i64 + 2 * n as i64 * k, action_label: -quantum * k as f64 + 0.0 }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}^{}", self.branch.as_str(), self.l, self.k)
    }
}

/// Generators with a sparse GF(2) differential: `boundary[j]` lists, sorted and without
/// repeats, the generators whose coefficient in `∂ g_j` is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedComplexGF2 {
    n: usize,
    generators: Vec<Generator>,
    boundary: Vec<Vec<usize>>,
    window: Option<i64>,
    boundary_degrees: Vec<i64>,
}

impl GradedComplexGF2 {
    /// Coefficients are reduced mod 2.
    pub fn new(n: usize, generators: Vec<Generator>, boundary: Vec<Vec<usize>>) -> Result<Self> {
        if boundary.len() != generators.len() {
            return Err(AlgebraError::InvalidParameter("one boundary list per generator".into()));
        }
        let mut reduced = Vec::with_capacity(boundary.len());
        for (j, b) in boundary.into_iter().enumerate() {
            let b = mod2(b);
            for &i in &b {
                if i >= generators.len() {
                    return Err(AlgebraError::InvalidParameter(format!("boundary index {i} out of range")));
                }
                if generators[i].degree != generators[j].degree - 1 {
                    return Err(AlgebraError::BadDegree { from: generators[j].to_string(), to: generators[i].degree });
                }
            }
            reduced.push(b);
        }
        Ok(Self { n, generators, boundary: reduced, window: None, boundary_degrees: Vec::new() })
    }

    pub(crate) fn with_window(mut self, k: i64, boundary_degrees: Vec<i64>) -> Self {
        self.window = Some(k);
        self.boundary_degrees = boundary_degrees;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn boundary(&self, j: usize) -> &[usize] {
        &self.boundary[j]
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Half-width `K` of the `k`-window, if truncated.
    pub fn window(&self) -> Option<i64> {
        self.window
    }

    /// Degrees whose homology is an artefact of truncating the window.
    pub fn boundary_degrees(&self) -> &[i64] {
        &self.boundary_degrees
    }

    /// `(source, target)` pairs of the differential.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.boundary.iter().enumerate().flat_map(|(j, b)| b.iter().map(move |&i| (j, i))).collect()
    }

    pub fn is_differential_zero(&self) -> bool {
        self.boundary.iter().all(Vec::is_empty)
    }

    /// Sorted distinct degrees.
    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.generators.iter().map(|g| g.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn count_in_degree(&self, d: i64) -> usize {
        self.generators.iter().filter(|g| g.degree == d).count()
    }

    /// `∂(∂ g_j)` as a sorted list.
    pub fn boundary_squared(&self, j: usize) -> Vec<usize> {
        mod2(self.boundary[j].iter().flat_map(|&i| self.boundary[i].iter().copied()).collect())
    }

    pub fn check_square_zero(&self) -> Result<()> {
        for j in 0..self.len() {
            if !self.boundary_squared(j).is_empty() {
                return Err(AlgebraError::NotAComplex(self.generators[j].to_string()));
            }
        }
        Ok(())
    }

    pub fn find(&self, k: i64, l: usize, branch: Branch) -> Option<usize> {
        self.generators.iter().position(|g| g.k == k && g.l == l && g.branch == branch)
    }
}

fn mod2(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(v[i]);
        }
        i = j;
    }
    out
}

/// `{−quantum·k : k ∈ [−K, K]}` read off the generators of the equivariant ladder, sorted.
pub fn action_spectrum(n: usize, window: i64, quantum: f64) -> Result<Vec<f64>> {
    let ladder = rabinowitz_ladder_with(n, window, LadderOptions { quantum, ..LadderOptions::default() })?;
    let quotient = quotient_by_involution(&ladder)?;
    let mut values: Vec<f64> = quotient.generators().iter().map(|g| g.action_label).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}
