//! The discretised functional
//! `A_r(v, η) = −∫ v*λ0 − η ∫ χ(t) F_r(v) dt − r ∫ H(t, v) dt`
//! with its exact discrete gradient and Hessian.

use nalgebra::DMatrix;

use crate::symplectic::{apply_j, omega, Hamiltonian, PerturbationHamiltonian, RadialSurface};

use super::state::{DiscreteLoopState, TimeWeights, MIN_SAMPLES};
use super::{Result, SolverError};

/// Periodic first-derivative operator on the uniform grid of `[0, 1)`.
/// Both variants are antisymmetric matrices, which makes the discrete gradient exact.
#[derive(Clone, Debug)]
pub enum Differentiator {
    /// Fourier differentiation, `D_ij = π (−1)^{i−j} cot(π (i − j) / N)`.
    Spectral(Vec<f64>),
    /// `(v_{j+1} − v_{j−1}) N / 2`.
    Centered,
}

impl Differentiator {
    pub fn for_samples(n: usize) -> Self {
        if n.is_power_of_two() {
            Self::spectral(n)
        } else {
            Self::Centered
        }
    }

    pub fn spectral(n: usize) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let k = i as isize - j as isize;
                    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    d[i * n + j] = std::f64::consts::PI * sign / (std::f64::consts::PI * k as f64 / n as f64).tan();
                }
            }
        }
        Self::Spectral(d)
    }

    /// Entry `D_ij` for an `n`-point grid.
    pub fn entry(&self, n: usize, i: usize, j: usize) -> f64 {
        match self {
            Self::Spectral(d) => d[i * n + j],
            Self::Centered => {
                if j == (i + 1) % n {
                    0.5 * n as f64
                } else if j == (i + n - 1) % n {
                    -0.5 * n as f64
                } else {
                    0.0
                }
            }
        }
    }

    /// `out = D v` columnwise, for `v` row major `n × dim`.
    pub fn apply(&self, v: &[f64], dim: usize, out: &mut [f64]) {
        let n = v.len() / dim;
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            Self::Spectral(d) => {
                for i in 0..n {
                    let row = &d[i * n..(i + 1) * n];
                    let oi = &mut out[i * dim..(i + 1) * dim];
                    for (j, &dij) in row.iter().enumerate() {
                        if dij == 0.0 {
                            continue;
                        }
                        let vj = &v[j * dim..(j + 1) * dim];
                        for c in 0..dim {
                            oi[c] += dij * vj[c];
                        }
                    }
                }
            }
            Self::Centered => {
                let half = 0.5 * n as f64;
                for i in 0..n {
                    let next = (i + 1) % n;
                    let prev = (i + n - 1) % n;
                    for c in 0..dim {
                        out[i * dim + c] = half * (v[next * dim + c] - v[prev * dim + c]);
                    }
                }
            }
        }
    }
}

/// L² gradient `(J ∂_t v − ηχ∇F_r(v) − r∇H(t, v),  −∫χ F_r(v))`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateGradient {
    pub loop_part: Vec<f64>,
    pub eta_part: f64,
}

impl StateGradient {
    /// `√((1/N) Σ |g_j|² + g_η²)`.
    pub fn norm(&self, num_samples: usize) -> f64 {
        let l: f64 = self.loop_part.iter().map(|g| g * g).sum::<f64>() / num_samples as f64;
        (l + self.eta_part * self.eta_part).sqrt()
    }

    /// L² pairing with a tangent state `(d_j, d_η)`.
    pub fn pair(&self, dir: &DiscreteLoopState) -> f64 {
        let n = dir.num_samples() as f64;
        self.loop_part.iter().zip(dir.samples()).map(|(g, d)| g * d).sum::<f64>() / n + self.eta_part * dir.eta
    }
}

/// Everything the functional depends on besides the state and `r`.
#[derive(Clone, Debug)]
pub struct RabinowitzProblem {
    surface: RadialSurface,
    hamiltonian: PerturbationHamiltonian,
    weights: TimeWeights,
    num_samples: usize,
    diff: Differentiator,
    chi: Vec<f64>,
}

impl RabinowitzProblem {
    pub fn new(
        surface: RadialSurface,
        hamiltonian: PerturbationHamiltonian,
        weights: TimeWeights,
        num_samples: usize,
    ) -> Result<Self> {
        if num_samples < MIN_SAMPLES || num_samples % 4 != 0 {
            return Err(SolverError::InvalidProblem(format!(
                "{num_samples} samples; need at least {MIN_SAMPLES} and a multiple of 4"
            )));
        }
        if hamiltonian.dim() != surface.dim() {
            return Err(SolverError::InvalidProblem("hamiltonian and surface dimensions differ".into()));
        }
        if weights.is_time_split() && !hamiltonian.is_zero() {
            let (a, b) = hamiltonian.time_support();
            let (wa, wb) = weights.hamiltonian_window();
            if a < wa || b > wb {
                return Err(SolverError::InvalidProblem(format!(
                    "hamiltonian support [{a}, {b}] leaves the reserved window [{wa}, {wb}]"
                )));
            }
        }
        let chi = (0..num_samples).map(|j| weights.chi(j as f64 / num_samples as f64)).collect();
        let diff = Differentiator::for_samples(num_samples);
        Ok(Self { surface, hamiltonian, weights, num_samples, diff, chi })
    }

    pub fn with_differentiator(mut self, diff: Differentiator) -> Self {
        self.diff = diff;
        self
    }

    pub fn surface(&self) -> &RadialSurface {
        &self.surface
    }

    pub fn hamiltonian(&self) -> &PerturbationHamiltonian {
        &self.hamiltonian
    }

    pub fn weights(&self) -> &TimeWeights {
        &self.weights
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn dim(&self) -> usize {
        self.surface.dim()
    }

    pub fn chi_samples(&self) -> &[f64] {
        &self.chi
    }

    fn check(&self, state: &DiscreteLoopState) -> Result<()> {
        if state.dim() != self.dim() || state.num_samples() != self.num_samples {
            return Err(SolverError::InvalidState(format!(
                "state is {} × {}, problem expects {} × {}",
                state.num_samples(),
                state.dim(),
                self.num_samples,
                self.dim()
            )));
        }
        Ok(())
    }

    fn time(&self, j: usize) -> f64 {
        j as f64 / self.num_samples as f64
    }

    pub fn action(&self, state: &DiscreteLoopState, r: f64) -> Result<f64> {
        self.check(state)?;
        let d = self.dim();
        let n = self.num_samples;
        let mut dv = vec![0.0; n * d];
        self.diff.apply(state.samples(), d, &mut dv);
        let mut liouville = 0.0;
        let mut constraint = 0.0;
        let mut perturbation = 0.0;
        for j in 0..n {
            let p = state.point(j);
            liouville += 0.5 * omega(p, &dv[j * d..(j + 1) * d]);
            let f = self.surface.value(r, p)?;
            constraint += self.chi[j] * f;
            if r != 0.0 && !self.hamiltonian.is_zero() {
                perturbation += self.hamiltonian.value(self.time(j), p);
            }
        }
        let inv = 1.0 / n as f64;
        Ok(-liouville * inv - state.eta * constraint * inv - r * perturbation * inv)
    }

    /// `∂A_r/∂r` at fixed state.
    pub fn action_r_derivative(&self, state: &DiscreteLoopState, r: f64) -> Result<f64> {
        self.check(state)?;
        let n = self.num_samples;
        let mut acc = 0.0;
        for j in 0..n {
            let p = state.point(j);
            if self.chi[j] != 0.0 {
                acc -= state.eta * self.chi[j] * self.surface.r_derivative(r, p)?;
            }
            if !self.hamiltonian.is_zero() {
                acc -= self.hamiltonian.value(self.time(j), p);
            }
        }
        Ok(acc / n as f64)
    }

    pub fn gradient(&self, state: &DiscreteLoopState, r: f64) -> Result<StateGradient> {
        self.check(state)?;
        let d = self.dim();
        let n = self.num_samples;
        let mut dv = vec![0.0; n * d];
        self.diff.apply(state.samples(), d, &mut dv);
        let mut loop_part = vec![0.0; n * d];
        let mut grad_f = vec![0.0; d];
        let mut grad_h = vec![0.0; d];
        let mut constraint = 0.0;
        for j in 0..n {
            let p = state.point(j);
            let gj = &mut loop_part[j * d..(j + 1) * d];
            apply_j(&dv[j * d..(j + 1) * d], gj);
            let f = self.surface.eval_into(r, p, &mut grad_f)?;
            constraint += self.chi[j] * f;
            let c = state.eta * self.chi[j];
            if c != 0.0 {
                for (g, df) in gj.iter_mut().zip(&grad_f) {
                    *g -= c * df;
                }
            }
            if r != 0.0 && !self.hamiltonian.is_zero() {
                self.hamiltonian.gradient(self.time(j), p, &mut grad_h);
                for (g, dh) in gj.iter_mut().zip(&grad_h) {
                    *g -= r * dh;
                }
            }
        }
        Ok(StateGradient { loop_part, eta_part: -constraint / n as f64 })
    }

    pub fn gradient_norm(&self, state: &DiscreteLoopState, r: f64) -> Result<f64> {
        Ok(self.gradient(state, r)?.norm(self.num_samples))
    }

    /// Gradient in the scaled coordinates `w = (v/√N, η)`.
    pub(crate) fn scaled_gradient(&self, state: &DiscreteLoopState, r: f64) -> Result<Vec<f64>> {
        let g = self.gradient(state, r)?;
        let s = 1.0 / (self.num_samples as f64).sqrt();
        let mut e: Vec<f64> = g.loop_part.iter().map(|v| v * s).collect();
        e.push(g.eta_part);
        Ok(e)
    }

    fn hamiltonian_hessian(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let h = 1e-6 * crate::symplectic::norm(x).max(1.0);
        let mut hess = vec![0.0; d * d];
        let mut gp = vec![0.0; d];
        let mut gm = vec![0.0; d];
        let mut xs = x.to_vec();
        for j in 0..d {
            xs[j] = x[j] + h;
            self.hamiltonian.gradient(t, &xs, &mut gp);
            xs[j] = x[j] - h;
            self.hamiltonian.gradient(t, &xs, &mut gm);
            xs[j] = x[j];
            for i in 0..d {
                hess[i * d + j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        hess
    }

    /// Hessian of `A_r` in the scaled coordinates. The `J ⊗ D` part and the `η` border
    /// are exact; the pointwise Hessians of `F_r` and `H` come from central differences
    /// of their analytic gradients.
    pub fn hessian(&self, state: &DiscreteLoopState, r: f64) -> Result<DMatrix<f64>> {
        self.check(state)?;
        let d = self.dim();
        let half = d / 2;
        let n = self.num_samples;
        let m = n * d + 1;
        let mut hess = DMatrix::<f64>::zeros(m, m);
        // (J)_{i, half+i} = −1, (J)_{half+i, i} = 1
        for j in 0..n {
            for k in 0..n {
                let djk = self.diff.entry(n, j, k);
                if djk == 0.0 {
                    continue;
                }
                for i in 0..half {
                    hess[(j * d + i, k * d + half + i)] = -djk;
                    hess[(j * d + half + i, k * d + i)] = djk;
                }
            }
        }
        let inv_sqrt = 1.0 / (n as f64).sqrt();
        let mut grad_f = vec![0.0; d];
        for j in 0..n {
            let p = state.point(j);
            self.surface.eval_into(r, p, &mut grad_f)?;
            let c = state.eta * self.chi[j];
            if c != 0.0 {
                let hf = self.surface.hessian(r, p)?;
                for a in 0..d {
                    for b in 0..d {
                        hess[(j * d + a, j * d + b)] -= c * hf[a * d + b];
                    }
                }
            }
            if r != 0.0 && !self.hamiltonian.is_zero() {
                let t = self.time(j);
                let (ta, tb) = self.hamiltonian.time_support();
                if t >= ta && t <= tb {
                    let hh = self.hamiltonian_hessian(t, p);
                    for a in 0..d {
                        for b in 0..d {
                            let v = 0.5 * (hh[a * d + b] + hh[b * d + a]);
                            hess[(j * d + a, j * d + b)] -= r * v;
                        }
                    }
                }
            }
            for a in 0..d {
                let v = -self.chi[j] * grad_f[a] * inv_sqrt;
                hess[(j * d + a, m - 1)] = v;
                hess[(m - 1, j * d + a)] = v;
            }
        }
        Ok(hess)
    }

    /// Brute-force forward differences of the scaled gradient, column by column.
    pub fn numerical_jacobian(&self, state: &DiscreteLoopState, r: f64, step: f64) -> Result<DMatrix<f64>> {
        let w0 = state.to_scaled();
        let e0 = self.scaled_gradient(state, r)?;
        let m = w0.len();
        let mut jac = DMatrix::<f64>::zeros(m, m);
        let mut w = w0.clone();
        for c in 0..m {
            w[c] = w0[c] + step;
            let s = DiscreteLoopState::from_scaled(self.dim(), &w)?;
            let e = self.scaled_gradient(&s, r)?;
            for (row, (a, b)) in e.iter().zip(&e0).enumerate() {
                jac[(row, c)] = (a - b) / step;
            }
            w[c] = w0[c];
        }
        Ok(jac)
    }
}
