//! Natural-parameter continuation of critical points from `r = 0` to `r = 1`.

use super::functional::RabinowitzProblem;
use super::newton::{refine_critical_point, CriticalPoint, NewtonOptions};
use super::state::DiscreteLoopState;
use super::{Result, SolverError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub growth: f64,
    /// A corrector may move the state at most this many times the displacement
    /// extrapolated from the previous step.
    pub jump_factor: f64,
    pub newton: NewtonOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            initial_step: 1.0 / 16.0,
            min_step: 1e-6,
            max_step: 0.25,
            growth: 1.5,
            jump_factor: 10.0,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationStep {
    pub point: CriticalPoint,
    /// L² distance to the previous accepted state.
    pub displacement: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationTrace {
    pub seed_k: i64,
    pub steps: Vec<ContinuationStep>,
    pub rejected: usize,
}

impl ContinuationTrace {
    pub fn schedule(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.point.r).collect()
    }

    pub fn actions(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.point.action).collect()
    }

    pub fn endpoint(&self) -> &CriticalPoint {
        &self.steps.last().expect("trace starts with the refined seed").point
    }

    pub fn is_complete(&self) -> bool {
        self.steps.last().is_some_and(|s| s.point.r == 1.0)
    }
}

/// Refines `seed` at `r = 0`, then steps `r` up to 1 using the previous critical point as
/// predictor. Failed or jumping correctors halve the step.
pub fn continue_to_target(
    problem: &RabinowitzProblem,
    seed_k: i64,
    seed: &DiscreteLoopState,
    opts: ContinuationOptions,
) -> Result<ContinuationTrace> {
    let start = refine_critical_point(problem, seed, 0.0, seed_k, opts.newton)?;
    let mut trace = ContinuationTrace {
        seed_k,
        steps: vec![ContinuationStep { point: start, displacement: 0.0 }],
        rejected: 0,
    };
    let mut dr = opts.initial_step;
    let mut rate: Option<f64> = None;
    loop {
        let prev = trace.endpoint();
        let r = prev.r;
        if r >= 1.0 {
            return Ok(trace);
        }
        if dr < opts.min_step {
            return Err(SolverError::StepUnderflow { r, trace: Box::new(trace) });
        }
        let r_next = (r + dr).min(1.0);
        let span = r_next - r;
        let accepted = match refine_critical_point(problem, &prev.state, r_next, seed_k, opts.newton) {
            Ok(cp) => {
                let displacement = cp.state.l2_distance(&prev.state);
                let floor = span * 1e-2 * (1.0 + prev.state.eta.abs());
                let ok = rate.is_none_or(|q| displacement <= opts.jump_factor * (q * span).max(floor));
                ok.then_some(ContinuationStep { point: cp, displacement })
            }
            Err(SolverError::NoConvergence { .. }) | Err(SolverError::Symplectic(_)) => None,
            Err(e) => return Err(e),
        };
        match accepted {
            Some(step) => {
                rate = Some(step.displacement / span);
                trace.steps.push(step);
                dr = (dr * opts.growth).min(opts.max_step);
            }
            None => {
                trace.rejected += 1;
                dr *= 0.5;
            }
        }
    }
}
