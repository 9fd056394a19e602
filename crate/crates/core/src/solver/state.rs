use crate::symplectic::TimeBump;

use super::{Result, SolverError};

pub const MIN_SAMPLES: usize = 64;

/// A loop `v: S^1 → R^{2n}` sampled at `t_j = j/N`, together with the multiplier `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLoopState {
    dim: usize,
    samples: Vec<f64>,
    pub eta: f64,
}

impl DiscreteLoopState {
    /// `samples` is row major, `N × dim`.
    pub fn new(dim: usize, samples: Vec<f64>, eta: f64) -> Result<Self> {
        if dim < 2 || dim % 2 != 0 {
            return Err(SolverError::InvalidState(format!("phase dimension {dim} is not even")));
        }
        if samples.len() % dim != 0 {
            return Err(SolverError::InvalidState("sample buffer is not a multiple of the dimension".into()));
        }
        let n = samples.len() / dim;
        if n < MIN_SAMPLES || n % 4 != 0 {
            return Err(SolverError::InvalidState(format!(
                "{n} samples; need at least {MIN_SAMPLES} and a multiple of 4"
            )));
        }
        if !eta.is_finite() || samples.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidState("non-finite sample".into()));
        }
        Ok(Self { dim, samples, eta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.samples[j * self.dim..(j + 1) * self.dim]
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 / self.num_samples() as f64
    }

    /// `(−v, η)`.
    pub fn reflect(&self) -> Self {
        Self { dim: self.dim, samples: self.samples.iter().map(|c| -c).collect(), eta: self.eta }
    }

    pub fn min_radius(&self) -> f64 {
        self.samples
            .chunks(self.dim)
            .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    /// `(1/N) Σ |v_j − w_j|² + (η − η')²`, square rooted.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let n = self.num_samples() as f64;
        let loop_part: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
        (loop_part + (self.eta - other.eta).powi(2)).sqrt()
    }

    /// Flattened scaled coordinates `w = (v_j / √N, η)` in which the L² metric is Euclidean.
    pub(crate) fn to_scaled(&self) -> Vec<f64> {
        let s = 1.0 / (self.num_samples() as f64).sqrt();
        let mut w: Vec<f64> = self.samples.iter().map(|v| v * s).collect();
        w.push(self.eta);
        w
    }

    pub(crate) fn from_scaled(dim: usize, w: &[f64]) -> Result<Self> {
        let n = (w.len() - 1) / dim;
        let s = (n as f64).sqrt();
        Self::new(dim, w[..w.len() - 1].iter().map(|v| v * s).collect(), w[w.len() - 1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// `χ` on `(½, 1)`, Hamiltonian confined to `(0, ½)`.
    TimeSplit,
    /// `χ ≡ 1`: the functional exactly as printed, used for parity checks.
    Plain,
}

/// The carrier `χ` of the constraint term and the window reserved for `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeWeights {
    mode: WeightMode,
    chi: Option<TimeBump>,
    hamiltonian_window: (f64, f64),
}

impl TimeWeights {
    pub fn time_split() -> Self {
        Self::time_split_with(TimeBump::new(0.52, 0.98).expect("static window"), (0.02, 0.48))
            .expect("static windows are disjoint")
    }

    pub fn time_split_with(chi: TimeBump, hamiltonian_window: (f64, f64)) -> Result<Self> {
        let (a, b) = hamiltonian_window;
        if !(0.0 < a && a < b && b <= 0.5) {
            return Err(SolverError::InvalidProblem(format!("hamiltonian window [{a}, {b}] not inside (0, 1/2]")));
        }
        if !(chi.start() >= 0.5 && chi.end() < 1.0) {
            return Err(SolverError::InvalidProblem("carrier must be supported in [1/2, 1)".into()));
        }
        Ok(Self { mode: WeightMode::TimeSplit, chi: Some(chi), hamiltonian_window })
    }

    pub fn plain() -> Self {
        Self { mode: WeightMode::Plain, chi: None, hamiltonian_window: (0.0, 1.0) }
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn is_time_split(&self) -> bool {
        self.mode == WeightMode::TimeSplit
    }

    pub fn hamiltonian_window(&self) -> (f64, f64) {
        self.hamiltonian_window
    }

    pub fn chi(&self, t: f64) -> f64 {
        self.chi.map_or(1.0, |b| b.value(t))
    }

    /// `∫_0^t χ`.
    pub fn chi_cumulative(&self, t: f64) -> f64 {
        self.chi.map_or(t, |b| b.cumulative(t))
    }

    pub fn chi_support(&self) -> (f64, f64) {
        self.chi.map_or((0.0, 1.0), |b| (b.start(), b.end()))
    }
}
