//! Linear symplectic structure of R^{2n} and the objects living on it.
//!
//! Coordinates are stored as `(x_1..x_n, y_1..y_n)`. The fixed conventions:
//!
//! - `ω(u, w) = Σ_i (u_{x_i} w_{y_i} − u_{y_i} w_{x_i}) = ⟨J u, w⟩`
//! - `J(x, y) = (−y, x)`, so `ω(u, J u) = |u|²`
//! - `λ0_p(u) = ½ ω(p, u)`, hence `dλ0 = ω`
//! - Hamiltonian vector fields satisfy `ω(X_G, ·) = dG`, i.e. `X_G = −J ∇G`
//!
//! With these choices the critical points of `−∫v*λ0 − η∫F(v) − ∫H(t,v)` solve
//! `∂_t v = η X_F(v) + X_H(t, v)`, so the Hamiltonian segment of a critical loop
//! runs forward along `ψ_t`.

mod flow;
mod hamiltonian;
mod leaf;
mod polynomial;
mod surface;

pub use flow::{integrate_flow, FlowError, FlowStepper};
pub use hamiltonian::{
    cutoff_hamiltonian, CutoffOptions, Hamiltonian, HamiltonianFamily, PerturbationHamiltonian,
    PolynomialHamiltonian, RadialCutoff, TimeBump,
};
pub use leaf::{
    closed_characteristic_probe, leafwise_check, time_one_map, ClosedProbe, LeafCheck, LeafOptions,
    LeafwiseReport, Residuals,
};
pub use polynomial::{EvenPolynomial, Monomial};
pub use surface::{LevelValue, RadialProfile, RadialSurface};
pub(crate) use surface::sphere_samples;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SymplecticError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("phase space dimension must be even and at least 2, got {0}")]
    OddDimension(usize),
    #[error("monomial of odd total degree {0} is not invariant under x -> -x")]
    OddMonomial(u32),
    #[error("radial profile is not positive: sampled minimum {min} below margin {margin}")]
    NonPositiveProfile { min: f64, margin: f64 },
    #[error("point at radius {radius} lies inside the guard ball of radius {guard}")]
    InsideGuard { radius: f64, guard: f64 },
    #[error("point is not on the surface: |F| = {0}")]
    NotOnSurface(f64),
    #[error("hamiltonian is not even: |H(t,-x) - H(t,x)| = {0}")]
    NotEven(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("flow of the unbounded hamiltonian escapes to radius {0}")]
    KEscapes(f64),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

pub type Result<T> = std::result::Result<T, SymplecticError>;

/// A point of R^{2n}, ordered `(x_1..x_n, y_1..y_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint(Vec<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 || coords.len() % 2 != 0 {
            return Err(SymplecticError::OddDimension(coords.len()));
        }
        Ok(Self(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![0.0; 2 * n])
    }

    /// Standard basis vector `e_i`, zero based.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; 2 * n];
        c[i] = 1.0;
        Self(c)
    }

    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// The involution `I(x) = −x`.
    pub fn reflect(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        distance(&self.0, &other.0)
    }
}

impl AsRef<[f64]> for PhasePoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The conventions above, bound to a dimension `2n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticConvention {
    n: usize,
}

impl SymplecticConvention {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SymplecticError::OddDimension(0));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(SymplecticError::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    pub fn omega(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(w)?;
        Ok(omega(u, w))
    }

    pub fn liouville(&self, p: &[f64], u: &[f64]) -> Result<f64> {
        self.check(p)?;
        self.check(u)?;
        Ok(0.5 * omega(p, u))
    }

    pub fn complex_structure(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let mut out = vec![0.0; u.len()];
        apply_j(u, &mut out);
        Ok(out)
    }

    /// `X_G(x)` from `∇G(x)`.
    pub fn hamiltonian_vector_field(&self, gradient: &[f64]) -> Result<Vec<f64>> {
        self.check(gradient)?;
        let mut out = vec![0.0; gradient.len()];
        vector_field_from_gradient(gradient, &mut out);
        Ok(out)
    }

    pub fn involution(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(x.iter().map(|c| -c).collect())
    }
}

// Unchecked kernels used in the hot loops. Callers guarantee equal even lengths.

pub(crate) fn omega(u: &[f64], w: &[f64]) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|i| u[i] * w[n + i] - u[n + i] * w[i]).sum()
}

/// `out = J u`.
pub(crate) fn apply_j(u: &[f64], out: &mut [f64]) {
    let n = u.len() / 2;
    for i in 0..n {
        out[i] = -u[n + i];
        out[n + i] = u[i];
    }
}

/// `out = −J grad`.
pub(crate) fn vector_field_from_gradient(grad: &[f64], out: &mut [f64]) {
    let n = grad.len() / 2;
    for i in 0..n {
        out[i] = grad[n + i];
        out[n + i] = -grad[i];
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
