use std::sync::Arc;

use rfh_core::solver::{ContinuationOptions, ExtractOptions, NewtonOptions, RabinowitzProblem, TimeWeights};
use rfh_core::symplectic::{
    cutoff_hamiltonian, CutoffOptions, EvenPolynomial, LeafOptions, PerturbationHamiltonian, PolynomialHamiltonian,
    RadialSurface, TimeBump,
};

use crate::config::{Mode, RunConfig, SurfaceSpec};
use crate::CliError;

pub fn build_surface(c: &RunConfig) -> Result<RadialSurface, CliError> {
    let s = match &c.surface {
        SurfaceSpec::Round => RadialSurface::round(c.n),
        SurfaceSpec::Ellipsoid(axes) if axes.len() == c.n => RadialSurface::complex_ellipsoid(axes)?,
        SurfaceSpec::Ellipsoid(axes) => RadialSurface::ellipsoid(axes.clone())?,
        SurfaceSpec::Polynomial(terms) => RadialSurface::polynomial(c.n, EvenPolynomial::new(2 * c.n, terms.clone())?)?,
    };
    Ok(s)
}

/// The configured family, cut off outside the sweep of the surface.
pub fn build_hamiltonian(c: &RunConfig, surface: &RadialSurface) -> Result<PerturbationHamiltonian, CliError> {
    let Some(family) = c.hamiltonian else {
        return Ok(PerturbationHamiltonian::zero(c.n));
    };
    if c.amplitude == 0.0 {
        return Ok(PerturbationHamiltonian::zero(c.n));
    }
    let bump = TimeBump::new(c.window.0, c.window.1)?;
    let raw = PolynomialHamiltonian::family(family, c.n, c.amplitude, bump);
    let opts = CutoffOptions { step: c.integrator_step, ..CutoffOptions::default() };
    Ok(cutoff_hamiltonian(Arc::new(raw), surface, c.margin, opts)?)
}

pub fn weights(c: &RunConfig) -> TimeWeights {
    match c.mode {
        Mode::TimeSplit => TimeWeights::time_split(),
        Mode::Plain => TimeWeights::plain(),
    }
}

pub fn build_problem(c: &RunConfig) -> Result<RabinowitzProblem, CliError> {
    let surface = build_surface(c)?;
    let h = build_hamiltonian(c, &surface)?;
    Ok(RabinowitzProblem::new(surface, h, weights(c), c.samples)?)
}

pub fn continuation_options(c: &RunConfig) -> ContinuationOptions {
    ContinuationOptions {
        initial_step: c.initial_step,
        min_step: c.min_step,
        newton: NewtonOptions { tol: c.tol_gradient, ..NewtonOptions::default() },
        ..ContinuationOptions::default()
    }
}

pub fn leaf_options(c: &RunConfig) -> LeafOptions {
    LeafOptions { step: c.integrator_step }
}

pub fn extract_options(c: &RunConfig) -> ExtractOptions {
    ExtractOptions { tol: c.tol_verify, t_max: c.leaf_t_max, probe_t_max: c.probe_t_max, leaf: leaf_options(c) }
}
