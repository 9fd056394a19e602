//! Star-shaped, centrally symmetric hypersurfaces as radial graphs over the unit sphere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{dot, norm, EvenPolynomial, Result, SymplecticError};

/// Minimum admissible sampled value of a polynomial profile.
const PROFILE_MARGIN: f64 = 1e-2;
const PROFILE_SAMPLES: usize = 4096;

/// The radial function `ρ` on `S^{2n−1}`. Every variant is even in `θ` by construction.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile {
    /// `ρ ≡ 1`.
    Round,
    /// `ρ(θ) = 1 + p(θ)` with `p` an even polynomial.
    Polynomial(EvenPolynomial),
    /// `ρ(θ) = (Σ θ_i² / a_i²)^{−1/2}`: the ellipsoid with semi-axes `a_i`.
    Ellipsoid(Vec<f64>),
}

/// Value and gradient of a defining function at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// `S = {ρ(θ)θ}` together with the interpolating family
/// `F_r(x) = ½(|x|²/ρ_r(x/|x|)² − 1)`, `ρ_r = (1 − r) + rρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSurface {
    n: usize,
    profile: RadialProfile,
    min_rho: f64,
    max_rho: f64,
}

impl RadialSurface {
    pub fn round(n: usize) -> Self {
        Self { n, profile: RadialProfile::Round, min_rho: 1.0, max_rho: 1.0 }
    }

    pub fn polynomial(n: usize, p: EvenPolynomial) -> Result<Self> {
        if p.dim() != 2 * n {
            return Err(SymplecticError::DimensionMismatch { expected: 2 * n, got: p.dim() });
        }
        let mut min_rho = f64::INFINITY;
        let mut max_rho = f64::NEG_INFINITY;
        for theta in sphere_samples(2 * n, PROFILE_SAMPLES, 0x5eed) {
            let rho = 1.0 + p.eval(&theta);
            min_rho = min_rho.min(rho);
            max_rho = max_rho.max(rho);
        }
        for i in 0..2 * n {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; 2 * n];
                e[i] = sign;
                let rho = 1.0 + p.eval(&e);
                min_rho = min_rho.min(rho);
                max_rho = max_rho.max(rho);
            }
        }
        if min_rho < PROFILE_MARGIN {
            return Err(SymplecticError::NonPositiveProfile { min: min_rho, margin: PROFILE_MARGIN });
        }
        Ok(Self { n, profile: RadialProfile::Polynomial(p), min_rho, max_rho })
    }

    /// Ellipsoid with one semi-axis per real coordinate.
    pub fn ellipsoid(axes: Vec<f64>) -> Result<Self> {
        if axes.len() < 2 || axes.len() % 2 != 0 {
            return Err(SymplecticError::OddDimension(axes.len()));
        }
        if axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(SymplecticError::InvalidParameter("ellipsoid axes must be positive".into()));
        }
        let min_rho = axes.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_rho = axes.iter().cloned().fold(0.0, f64::max);
        Ok(Self { n: axes.len() / 2, profile: RadialProfile::Ellipsoid(axes), min_rho, max_rho })
    }

    /// `Σ_j |z_j|²/R_j² = 1`, one radius per complex plane `(x_j, y_j)`.
    pub fn complex_ellipsoid(radii: &[f64]) -> Result<Self> {
        let mut axes = radii.to_vec();
        axes.extend_from_slice(radii);
        Self::ellipsoid(axes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn is_round(&self) -> bool {
        match &self.profile {
            RadialProfile::Round => true,
            RadialProfile::Polynomial(p) => p.is_zero(),
            RadialProfile::Ellipsoid(a) => a.iter().all(|&v| v == 1.0),
        }
    }

    pub fn min_rho(&self) -> f64 {
        self.min_rho
    }

    pub fn max_rho(&self) -> f64 {
        self.max_rho
    }

    /// No defining function is evaluated inside this radius.
    pub fn guard_radius(&self) -> f64 {
        0.1 * self.min_rho.min(1.0)
    }

    /// `ρ(θ)` and its ambient gradient at a unit vector `θ`.
    fn rho_with_gradient(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        match &self.profile {
            RadialProfile::Round => 1.0,
            RadialProfile::Polynomial(p) => {
                p.add_gradient(theta, 1.0, grad);
                1.0 + p.eval(theta)
            }
            RadialProfile::Ellipsoid(axes) => {
                let q: f64 = theta.iter().zip(axes).map(|(t, a)| t * t / (a * a)).sum();
                let rho = q.powf(-0.5);
                let c = -rho / q;
                for ((g, t), a) in grad.iter_mut().zip(theta).zip(axes) {
                    *g = c * t / (a * a);
                }
                rho
            }
        }
    }

    /// `ρ(θ)` at a unit vector `θ`.
    pub fn rho(&self, theta: &[f64]) -> f64 {
        match &self.profile {
            RadialProfile::Round => 1.0,
            RadialProfile::Polynomial(p) => 1.0 + p.eval(theta),
            RadialProfile::Ellipsoid(axes) => {
                let q: f64 = theta.iter().zip(axes).map(|(t, a)| t * t / (a * a)).sum();
                q.powf(-0.5)
            }
        }
    }

    pub fn rho_r(&self, r: f64, theta: &[f64]) -> f64 {
        1.0 + r * (self.rho(theta) - 1.0)
    }

    /// The graph point `ρ_r(θ)θ` over a (not necessarily normalised) direction.
    pub fn graph_point(&self, r: f64, direction: &[f64]) -> Vec<f64> {
        let s = norm(direction);
        let theta: Vec<f64> = direction.iter().map(|c| c / s).collect();
        let rho = self.rho_r(r, &theta);
        theta.iter().map(|t| rho * t).collect()
    }

    fn guard(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(SymplecticError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let s = norm(x);
        if !(s >= self.guard_radius()) {
            return Err(SymplecticError::InsideGuard { radius: s, guard: self.guard_radius() });
        }
        Ok(s)
    }

    /// Writes `∇F_r(x)` into `grad` and returns `F_r(x)`.
    pub fn eval_into(&self, r: f64, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        let s = self.guard(x)?;
        let theta: Vec<f64> = x.iter().map(|c| c / s).collect();
        let rho = self.rho_with_gradient(&theta, grad);
        let rho_r = 1.0 + r * (rho - 1.0);
        let radial = dot(&theta, grad);
        let inv2 = 1.0 / (rho_r * rho_r);
        let value = 0.5 * (s * s * inv2 - 1.0);
        // ∇F = x/ρ_r² − (s²/ρ_r³) · r(∇ρ − (θ·∇ρ)θ)/s
        let c = s * r * inv2 / rho_r;
        for ((g, &xi), &ti) in grad.iter_mut().zip(x).zip(&theta) {
            *g = xi * inv2 - c * (*g - radial * ti);
        }
        Ok(value)
    }

    pub fn defining_function(&self, r: f64, x: &[f64]) -> Result<LevelValue> {
        let mut gradient = vec![0.0; self.dim()];
        let value = self.eval_into(r, x, &mut gradient)?;
        Ok(LevelValue { value, gradient })
    }

    pub fn value(&self, r: f64, x: &[f64]) -> Result<f64> {
        let s = self.guard(x)?;
        let theta: Vec<f64> = x.iter().map(|c| c / s).collect();
        let rho_r = self.rho_r(r, &theta);
        Ok(0.5 * (s * s / (rho_r * rho_r) - 1.0))
    }

    /// `∂F_r/∂r (x)`.
    pub fn r_derivative(&self, r: f64, x: &[f64]) -> Result<f64> {
        let s = self.guard(x)?;
        let theta: Vec<f64> = x.iter().map(|c| c / s).collect();
        let rho = self.rho(&theta);
        let rho_r = 1.0 + r * (rho - 1.0);
        Ok(-s * s * (rho - 1.0) / (rho_r * rho_r * rho_r))
    }

    /// Hessian of `F_r` by central differences of the analytic gradient, row major.
    pub fn hessian(&self, r: f64, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        let h = 1e-6 * norm(x).max(1.0);
        let mut hess = vec![0.0; d * d];
        let mut gp = vec![0.0; d];
        let mut gm = vec![0.0; d];
        let mut xs = x.to_vec();
        for j in 0..d {
            xs[j] = x[j] + h;
            self.eval_into(r, &xs, &mut gp)?;
            xs[j] = x[j] - h;
            self.eval_into(r, &xs, &mut gm)?;
            xs[j] = x[j];
            for i in 0..d {
                hess[i * d + j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        symmetrize(&mut hess, d);
        Ok(hess)
    }
}

pub(crate) fn symmetrize(m: &mut [f64], d: usize) {
    for i in 0..d {
        for j in 0..i {
            let a = 0.5 * (m[i * d + j] + m[j * d + i]);
            m[i * d + j] = a;
            m[j * d + i] = a;
        }
    }
}

/// Deterministic pseudo-random points on the unit sphere of R^dim.
pub(crate) fn sphere_samples(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let s = norm(&v);
            if s > 1e-8 {
                break v.into_iter().map(|c| c / s).collect();
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::Monomial;
    use rand::Rng;

    fn wobbly(n: usize) -> RadialSurface {
        let d = 2 * n;
        let mut e1 = vec![0; d];
        e1[0] = 2;
        let mut e2 = vec![0; d];
        e2[0] = 1;
        e2[d - 1] = 1;
        let mut e3 = vec![0; d];
        e3[1] = 2;
        e3[n] = 2;
        let p = EvenPolynomial::new(
            d,
            vec![
                Monomial { coeff: 0.15, exponents: e1 },
                Monomial { coeff: -0.1, exponents: e2 },
                Monomial { coeff: 0.3, exponents: e3 },
            ],
        )
        .unwrap();
        RadialSurface::polynomial(n, p).unwrap()
    }

    #[test]
    fn round_profile_reduces_to_f0() {
        let s = RadialSurface::round(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let theta = sphere_samples(4, 1, rng.random()).remove(0);
            for r in [0.0, 0.5, 1.0] {
                let lv = s.defining_function(r, &theta).unwrap();
                assert!(lv.value.abs() < 1e-15);
                for (g, t) in lv.gradient.iter().zip(&theta) {
                    assert!((g - t).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn r_zero_is_f0_for_any_profile() {
        let s = wobbly(2);
        let x = [0.3, -0.2, 1.1, 0.4];
        let lv = s.defining_function(0.0, &x).unwrap();
        let expected = 0.5 * (dot(&x, &x) - 1.0);
        assert!((lv.value - expected).abs() < 1e-15);
        for (g, xi) in lv.gradient.iter().zip(&x) {
            assert!((g - xi).abs() < 1e-15);
        }
    }

    #[test]
    fn graph_points_lie_on_level_sets() {
        let surfaces = [wobbly(2), RadialSurface::complex_ellipsoid(&[1.0, 1.2]).unwrap()];
        for s in &surfaces {
            for theta in sphere_samples(4, 50, 11) {
                for r in [0.0, 0.3, 1.0] {
                    let p = s.graph_point(r, &theta);
                    assert!(s.value(r, &p).unwrap().abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let s = wobbly(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for theta in sphere_samples(4, 50, 13) {
            let r: f64 = rng.random_range(0.0..1.0);
            let scale: f64 = rng.random_range(0.6..1.5);
            let x: Vec<f64> = theta.iter().map(|t| t * scale).collect();
            let lv = s.defining_function(r, &x).unwrap();
            let h = 1e-6;
            let mut fd = vec![0.0; 4];
            for i in 0..4 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                fd[i] = (s.value(r, &xp).unwrap() - s.value(r, &xm).unwrap()) / (2.0 * h);
            }
            let err: f64 = fd.iter().zip(&lv.gradient).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(err / norm(&lv.gradient) < 1e-6, "relative error {}", err / norm(&lv.gradient));
        }
    }

    #[test]
    fn r_derivative_matches_finite_differences() {
        let s = wobbly(2);
        let x = [0.5, 0.6, -0.4, 0.3];
        for r in [0.0, 0.4, 0.9] {
            let fd = (s.value(r + 1e-6, &x).unwrap() - s.value(r - 1e-6, &x).unwrap()) / 2e-6;
            assert!((fd - s.r_derivative(r, &x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn defining_function_is_even() {
        let s = wobbly(3);
        for theta in sphere_samples(6, 20, 17) {
            let neg: Vec<f64> = theta.iter().map(|t| -1.3 * t).collect();
            let pos: Vec<f64> = theta.iter().map(|t| 1.3 * t).collect();
            let a = s.defining_function(0.7, &pos).unwrap();
            let b = s.defining_function(0.7, &neg).unwrap();
            assert_eq!(a.value, b.value);
            for (ga, gb) in a.gradient.iter().zip(&b.gradient) {
                assert_eq!(*ga, -*gb);
            }
        }
    }

    #[test]
    fn ellipsoid_endpoint_is_the_quadratic_form() {
        let s = RadialSurface::complex_ellipsoid(&[1.0, 1.2]).unwrap();
        let x = [0.4, 0.9, -0.3, 0.2];
        let q = x[0] * x[0] + x[2] * x[2] + (x[1] * x[1] + x[3] * x[3]) / 1.44;
        assert!((s.value(1.0, &x).unwrap() - 0.5 * (q - 1.0)).abs() < 1e-14);
        assert_eq!(s.min_rho(), 1.0);
        assert_eq!(s.max_rho(), 1.2);
    }

    #[test]
    fn guard_ball_and_positivity() {
        let s = RadialSurface::round(1);
        assert!(matches!(s.value(0.0, &[0.01, 0.0]), Err(SymplecticError::InsideGuard { .. })));
        let p = EvenPolynomial::new(
            2,
            vec![Monomial { coeff: -1.5, exponents: vec![2, 0] }],
        )
        .unwrap();
        assert!(matches!(RadialSurface::polynomial(1, p), Err(SymplecticError::NonPositiveProfile { .. })));
    }

    #[test]
    fn leaf_direction_spans_the_characteristic_line() {
        // At x ∈ F_r^{-1}(0), X_{F_r}(x) ω-annihilates every tangent vector of the level set.
        let s = wobbly(2);
        for theta in sphere_samples(4, 20, 19) {
            let x = s.graph_point(0.8, &theta);
            let lv = s.defining_function(0.8, &x).unwrap();
            let mut xf = vec![0.0; 4];
            crate::symplectic::vector_field_from_gradient(&lv.gradient, &mut xf);
            let g = &lv.gradient;
            let gg = dot(g, g);
            for w0 in sphere_samples(4, 4, 23) {
                // project w0 onto the tangent space
                let c = dot(&w0, g) / gg;
                let w: Vec<f64> = w0.iter().zip(g).map(|(a, b)| a - c * b).collect();
                assert!(crate::symplectic::omega(&xf, &w).abs() < 1e-8);
            }
        }
    }
}
