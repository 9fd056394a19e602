//! Discretised perturbed Rabinowitz action functional, explicit sphere seeds,
//! Newton refinement, continuation in `r`, and extraction of leaf-wise points.
//!
//! In time-split mode the constraint term carries a bump `χ` supported in `(½, 1)` and the
//! Hamiltonian lives in `(0, ½)`. A critical loop then solves `∂_t v = ηχ X_{F_r}(v) + r X_H(t, v)`:
//! it first follows `ψ` and then runs along a leaf of `F_r^{-1}(0)` back to its start.

mod continuation;
mod extract;
mod functional;
mod newton;
mod seed;
mod state;

pub use continuation::{continue_to_target, ContinuationOptions, ContinuationStep, ContinuationTrace};
pub use extract::{check_reflection_symmetry, dedup_reports, extract_leafwise_point, ExtractOptions, ReportCluster, SymmetryCheck};
pub use functional::{Differentiator, RabinowitzProblem, StateGradient};
pub use newton::{refine_critical_point, CriticalPoint, NewtonOptions};
pub use seed::{constant_seed, reduced_function, seed_loop, seed_reeb_orbit, select_seed_base, BaseSelection};
pub use state::{DiscreteLoopState, TimeWeights, WeightMode, MIN_SAMPLES};

use thiserror::Error;

use crate::symplectic::{LeafwiseReport, SymplecticError};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error("k = 0 has no Reeb orbit; constant loops are seeded separately")]
    ZeroSeed,
    #[error("no convergence after {iterations} iterations, best gradient norm {}", best.gradient_norm)]
    NoConvergence { best: Box<CriticalPoint>, iterations: usize },
    #[error("continuation step underflow at r = {r}")]
    StepUnderflow { r: f64, trace: Box<ContinuationTrace> },
    #[error("leaf-wise extraction needs the time-split functional")]
    PlainExtraction,
    #[error("extracted point fails verification: residual {}", report.residuals.leaf)]
    ExtractionInvalid { report: Box<LeafwiseReport> },
    #[error("linear solve failed: {0}")]
    Linear(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
