//! Explicit critical points of `A_0` on the round sphere.

use std::f64::consts::TAU;

use crate::symplectic::{apply_j, norm};

use super::functional::RabinowitzProblem;
use super::state::{DiscreteLoopState, TimeWeights};
use super::{Result, SolverError};

/// The `k`-fold closed characteristic of `S^{2n−1}` through `base`, traversed at the speed
/// prescribed by the carrier: `v(t) = exp(2πk X(t) J) base` with `X(t) = ∫_0^t χ`, and
/// `η = −2πk`. In plain mode `X(t) = t`.
pub fn seed_reeb_orbit(k: i64, base: &[f64], num_samples: usize, weights: &TimeWeights) -> Result<DiscreteLoopState> {
    if k == 0 {
        return Err(SolverError::ZeroSeed);
    }
    let dim = base.len();
    if (norm(base) - 1.0).abs() > 1e-12 {
        return Err(SolverError::InvalidState(format!("seed base has norm {}", norm(base))));
    }
    let mut jb = vec![0.0; dim];
    apply_j(base, &mut jb);
    let mut samples = Vec::with_capacity(num_samples * dim);
    for j in 0..num_samples {
        let theta = TAU * k as f64 * weights.chi_cumulative(j as f64 / num_samples as f64);
        let (s, c) = theta.sin_cos();
        samples.extend(base.iter().zip(&jb).map(|(b, jb)| c * b + s * jb));
    }
    DiscreteLoopState::new(dim, samples, -TAU * k as f64)
}

/// A constant loop at `base` with `η = 0`: a point of the `k = 0` critical manifold.
pub fn constant_seed(base: &[f64], num_samples: usize) -> Result<DiscreteLoopState> {
    let samples = base.iter().cycle().take(base.len() * num_samples).copied().collect();
    DiscreteLoopState::new(base.len(), samples, 0.0)
}

/// The `k`-fold orbit through `base`, or the constant loop for `k = 0`.
pub fn seed_loop(k: i64, base: &[f64], num_samples: usize, weights: &TimeWeights) -> Result<DiscreteLoopState> {
    if k == 0 {
        constant_seed(base, num_samples)
    } else {
        seed_reeb_orbit(k, base, num_samples, weights)
    }
}

/// `∂_r A_r` at `r = 0` along the seed through `base`. Its critical points on the sphere
/// pick out the seeds that survive the deformation.
pub fn reduced_function(problem: &RabinowitzProblem, k: i64, base: &[f64]) -> Result<f64> {
    let seed = seed_loop(k, base, problem.num_samples(), problem.weights())?;
    problem.action_r_derivative(&seed, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseSelection {
    pub base: Vec<f64>,
    pub value: f64,
    pub start: usize,
}

fn normalize(x: &mut [f64]) {
    let s = norm(x);
    x.iter_mut().for_each(|c| *c /= s);
}

fn descend(problem: &RabinowitzProblem, k: i64, start: &[f64]) -> Result<(Vec<f64>, f64)> {
    let dim = start.len();
    let mut x = start.to_vec();
    let mut fx = reduced_function(problem, k, &x)?;
    let mut step = 0.1;
    let h = 1e-6;
    let mut trial = vec![0.0; dim];
    for _ in 0..200 {
        let mut grad = vec![0.0; dim];
        for i in 0..dim {
            trial.copy_from_slice(&x);
            trial[i] += h;
            normalize(&mut trial);
            let fp = reduced_function(problem, k, &trial)?;
            trial.copy_from_slice(&x);
            trial[i] -= h;
            normalize(&mut trial);
            let fm = reduced_function(problem, k, &trial)?;
            grad[i] = (fp - fm) / (2.0 * h);
        }
        let radial: f64 = grad.iter().zip(&x).map(|(g, x)| g * x).sum();
        grad.iter_mut().zip(&x).for_each(|(g, x)| *g -= radial * x);
        let gnorm = norm(&grad);
        if gnorm < 1e-9 {
            break;
        }
        let mut improved = false;
        while step > 1e-12 {
            for i in 0..dim {
                trial[i] = x[i] - step * grad[i] / gnorm;
            }
            normalize(&mut trial);
            let ft = reduced_function(problem, k, &trial)?;
            if ft < fx {
                x.copy_from_slice(&trial);
                fx = ft;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((x, fx))
}

/// Minimises the reduced function over the unit sphere from the starts `±e_i` followed by
/// `extra` fixed pseudo-random points. Values within `1e-12` of the incumbent do not replace it.
pub fn select_seed_base(problem: &RabinowitzProblem, k: i64, extra: usize) -> Result<BaseSelection> {
    let dim = problem.dim();
    let mut starts = Vec::with_capacity(2 * dim + extra);
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = sign;
            starts.push(e);
        }
    }
    starts.extend(crate::symplectic::sphere_samples(dim, extra, 0x5eed));
    let mut best: Option<BaseSelection> = None;
    for (i, s) in starts.iter().enumerate() {
        let (x, v) = descend(problem, k, s)?;
        if best.as_ref().is_none_or(|b| v < b.value - 1e-12) {
            best = Some(BaseSelection { base: x, value: v, start: i });
        }
    }
    Ok(best.expect("at least one start"))
}
