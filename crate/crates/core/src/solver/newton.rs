//! Levenberg–Marquardt on the critical-point equations `∇A_r = 0`.
//!
//! Critical sets are Morse–Bott, so the Hessian is singular along them. Steps solve
//! `(H² + λ I) δ = −H e` in the scaled coordinates through the eigendecomposition of the
//! symmetric `H`: Newton off the kernel, bounded along it, and no squared condition number.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::functional::RabinowitzProblem;
use super::state::DiscreteLoopState;
use super::{Result, SolverError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial damping relative to `max μ²` over the Hessian eigenvalues.
    pub damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 50, damping: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub state: DiscreteLoopState,
    pub r: f64,
    pub action: f64,
    pub gradient_norm: f64,
    pub seed_k: i64,
    pub iterations: usize,
}

fn norm(e: &[f64]) -> f64 {
    e.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn refine_critical_point(
    problem: &RabinowitzProblem,
    initial: &DiscreteLoopState,
    r: f64,
    seed_k: i64,
    opts: NewtonOptions,
) -> Result<CriticalPoint> {
    let eval = |w: &[f64]| -> Option<(DiscreteLoopState, Vec<f64>)> {
        let state = DiscreteLoopState::from_scaled(problem.dim(), w).ok()?;
        let e = problem.scaled_gradient(&state, r).ok()?;
        e.iter().all(|v| v.is_finite()).then_some((state, e))
    };
    let mut w = initial.to_scaled();
    let mut e = problem.scaled_gradient(initial, r)?;
    let mut state = initial.clone();
    let mut en = norm(&e);
    if !en.is_finite() {
        return Err(SolverError::InvalidState("initial gradient is not finite".into()));
    }
    let m = w.len();
    let mut lambda = opts.damping;
    let finish = |state: DiscreteLoopState, en: f64, iterations: usize| -> Result<CriticalPoint> {
        let action = problem.action(&state, r)?;
        Ok(CriticalPoint { state, r, action, gradient_norm: en, seed_k, iterations })
    };

    for iter in 0..opts.max_iter {
        if en <= opts.tol {
            return finish(state, en, iter);
        }
        let h = problem.hessian(&state, r)?;
        let eig = SymmetricEigen::new(h.clone());
        let coeffs = eig.eigenvectors.tr_mul(&DVector::from_column_slice(&e));
        let top = eig.eigenvalues.amax();
        let cut = 1e-13 * top;
        let scale = top * top;
        let mut accepted = false;
        while lambda <= 1e6 {
            let weights = DVector::from_iterator(
                m,
                eig.eigenvalues.iter().zip(coeffs.iter()).map(|(&mu, &c)| {
                    if mu.abs() <= cut {
                        0.0
                    } else {
                        -mu * c / (mu * mu + lambda * scale)
                    }
                }),
            );
            let delta = &eig.eigenvectors * weights;
            let trial: Vec<f64> = w.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            if let Some((ts, te)) = eval(&trial) {
                let tn = norm(&te);
                if tn < en {
                    w = trial;
                    state = ts;
                    e = te;
                    en = tn;
                    lambda /= 10.0;
                    accepted = true;
                    break;
                }
            }
            lambda = if lambda < 1e-24 { 1e-24 } else { lambda * 10.0 };
        }
        if !accepted {
            lambda = opts.damping;
            accepted = gradient_step(&eval, &h, &mut w, &mut state, &mut e, &mut en);
        }
        if !accepted {
            let best = finish(state, en, iter + 1)?;
            return Err(SolverError::NoConvergence { best: Box::new(best), iterations: iter + 1 });
        }
    }
    if en <= opts.tol {
        return finish(state, en, opts.max_iter);
    }
    let best = finish(state, en, opts.max_iter)?;
    Err(SolverError::NoConvergence { best: Box::new(best), iterations: opts.max_iter })
}

/// Backtracking descent on `½|e|²` along `−H e`, starting from the minimiser of the
/// linear model.
fn gradient_step(
    eval: &dyn Fn(&[f64]) -> Option<(DiscreteLoopState, Vec<f64>)>,
    h: &DMatrix<f64>,
    w: &mut Vec<f64>,
    state: &mut DiscreteLoopState,
    e: &mut Vec<f64>,
    en: &mut f64,
) -> bool {
    let dir = -(h * DVector::from_column_slice(e));
    let hd = h * &dir;
    let denom = hd.norm_squared();
    if !(denom > 0.0) {
        return false;
    }
    let mut t = dir.norm_squared() / denom;
    for _ in 0..60 {
        let trial: Vec<f64> = w.iter().zip(dir.iter()).map(|(a, b)| a + t * b).collect();
        if let Some((ts, te)) = eval(&trial) {
            let tn = norm(&te);
            if tn < *en {
                *w = trial;
                *state = ts;
                *e = te;
                *en = tn;
                return true;
            }
        }
        t *= 0.5;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{seed_reeb_orbit, TimeWeights};
    use crate::symplectic::{PerturbationHamiltonian, RadialSurface};

    #[test]
    fn time_split_seed_polishes() {
        let p = RabinowitzProblem::new(RadialSurface::round(1), PerturbationHamiltonian::zero(1), TimeWeights::time_split(), 128).unwrap();
        let s = seed_reeb_orbit(2, &[1.0, 0.0], 128, p.weights()).unwrap();
        let cp = refine_critical_point(&p, &s, 0.0, 2, NewtonOptions::default()).unwrap();
        assert!(cp.gradient_norm <= 1e-8);
        assert!((cp.action + 2.0 * std::f64::consts::PI).abs() < 1e-6);
    }
}
