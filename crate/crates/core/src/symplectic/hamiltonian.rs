//! Time-dependent, centrally symmetric perturbations `H(t, x)` and their radial cut-off.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::flow::{FlowError, FlowStepper};
use super::surface::sphere_samples;
use super::{norm, vector_field_from_gradient, EvenPolynomial, Monomial, RadialSurface, Result, SymplecticError};

pub trait Hamiltonian: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, t: f64, x: &[f64]) -> f64;
    /// Overwrites `grad` with `∇_x H(t, x)`.
    fn gradient(&self, t: f64, x: &[f64], grad: &mut [f64]);
    /// Closed interval outside of which `H(t, ·) ≡ 0`.
    fn time_support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    /// `X_{H_t}(x) = −J ∇H(t, x)`.
    fn vector_field(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let mut g = vec![0.0; x.len()];
        self.gradient(t, x, &mut g);
        vector_field_from_gradient(&g, out);
    }
}

/// `w(t) = C sin^p(π(t − a)/(b − a))` on `[a, b]`, zero elsewhere, `∫w = 1`. `p` is even.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeBump {
    start: f64,
    end: f64,
    power: u32,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl TimeBump {
    pub const DEFAULT_POWER: u32 = 8;

    pub fn new(start: f64, end: f64) -> Result<Self> {
        Self::with_power(start, end, Self::DEFAULT_POWER)
    }

    pub fn with_power(start: f64, end: f64, power: u32) -> Result<Self> {
        if !(0.0 <= start && start < end && end <= 1.0) {
            return Err(SymplecticError::InvalidParameter(format!("bump window [{start}, {end}] not inside [0, 1]")));
        }
        if power == 0 || power % 2 != 0 {
            return Err(SymplecticError::InvalidParameter(format!("bump power {power} must be even and positive")));
        }
        Ok(Self { start, end, power })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// `∫_0^1 sin^p(πu) du = C(p, p/2) / 2^p`.
    fn unit_mass(&self) -> f64 {
        binomial(self.power, self.power / 2) / 2f64.powi(self.power as i32)
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.start || t >= self.end {
            return 0.0;
        }
        let width = self.end - self.start;
        let u = (t - self.start) / width;
        (PI * u).sin().powi(self.power as i32) / (width * self.unit_mass())
    }

    /// `∫_0^t w`, exact via the power-reduction formula.
    pub fn cumulative(&self, t: f64) -> f64 {
        if t <= self.start {
            return 0.0;
        }
        if t >= self.end {
            return 1.0;
        }
        let u = (t - self.start) / (self.end - self.start);
        let m = self.power / 2;
        let mut acc = binomial(self.power, m) * u;
        for j in 1..=m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let w = 2.0 * j as f64 * PI;
            acc += 2.0 * sign * binomial(self.power, m - j) * (w * u).sin() / w;
        }
        acc / 4f64.powi(m as i32) / self.unit_mass()
    }
}

/// Built-in even spatial profiles for `H̃(t, x) = ε w(t) P(x)`. Both restrict to a
/// nonconstant function on every circle of each complex coordinate plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianFamily {
    /// `P = x_1² + Σ_{i<2n} q_i q_{i+1} + Σ_i x_i y_i` in storage order `q = (x, y)`.
    Quadratic,
    /// `P = Σ_i q_i² q_{i+1}² + Σ_i x_i³ y_i`, the first sum cyclic.
    Quartic,
}

impl HamiltonianFamily {
    pub fn polynomial(&self, n: usize) -> EvenPolynomial {
        let d = 2 * n;
        let mono = |pairs: &[(usize, u32)], coeff: f64| {
            let mut exponents = vec![0; d];
            for &(i, e) in pairs {
                exponents[i] += e;
            }
            Monomial { coeff, exponents }
        };
        let mut terms = Vec::new();
        match self {
            Self::Quadratic => {
                terms.push(mono(&[(0, 2)], 1.0));
                for i in 0..d - 1 {
                    terms.push(mono(&[(i, 1), (i + 1, 1)], 1.0));
                }
                for i in 0..n {
                    terms.push(mono(&[(i, 1), (n + i, 1)], 1.0));
                }
            }
            Self::Quartic => {
                for i in 0..d {
                    terms.push(mono(&[(i, 2), ((i + 1) % d, 2)], 1.0));
                }
                for i in 0..n {
                    terms.push(mono(&[(i, 3), (n + i, 1)], 1.0));
                }
            }
        }
        EvenPolynomial::new(d, terms).expect("built-in families have even degree")
    }
}

impl std::str::FromStr for HamiltonianFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quadratic" => Ok(Self::Quadratic),
            "quartic" => Ok(Self::Quartic),
            other => Err(format!("unknown hamiltonian family `{other}`")),
        }
    }
}

/// `H̃(t, x) = ε w(t) P(x)`, even and unbounded.
#[derive(Clone, Debug)]
pub struct PolynomialHamiltonian {
    amplitude: f64,
    bump: TimeBump,
    poly: EvenPolynomial,
}

impl PolynomialHamiltonian {
    pub fn new(amplitude: f64, bump: TimeBump, poly: EvenPolynomial) -> Self {
        Self { amplitude, bump, poly }
    }

    pub fn family(family: HamiltonianFamily, n: usize, amplitude: f64, bump: TimeBump) -> Self {
        Self::new(amplitude, bump, family.polynomial(n))
    }
}

impl Hamiltonian for PolynomialHamiltonian {
    fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn value(&self, t: f64, x: &[f64]) -> f64 {
        let w = self.bump.value(t);
        if w == 0.0 {
            return 0.0;
        }
        self.amplitude * w * self.poly.eval(x)
    }

    fn gradient(&self, t: f64, x: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let w = self.bump.value(t);
        if w != 0.0 {
            self.poly.add_gradient(x, self.amplitude * w, grad);
        }
    }

    fn time_support(&self) -> (f64, f64) {
        (self.bump.start(), self.bump.end())
    }
}

fn smoothstep(u: f64) -> (f64, f64) {
    // 6u⁵ − 15u⁴ + 10u³ and its derivative; C² at both ends.
    let u = u.clamp(0.0, 1.0);
    (u * u * u * (u * (6.0 * u - 15.0) + 10.0), 30.0 * u * u * (u - 1.0) * (u - 1.0))
}

/// Factor `c(|x|²)`: 1 on `[s1, s2]`, 0 outside `[s0, s3]`, C² quintic ramps between.
/// `s1 == 0` disables the inner ramp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialCutoff {
    s0: f64,
    s1: f64,
    s2: f64,
    s3: f64,
}

impl RadialCutoff {
    /// Radii (not squared) `inner_zero ≤ inner_one < outer_one < outer_zero`.
    pub fn new(inner_zero: f64, inner_one: f64, outer_one: f64, outer_zero: f64) -> Result<Self> {
        if !(0.0 <= inner_zero && inner_zero <= inner_one && inner_one < outer_one && outer_one < outer_zero) {
            return Err(SymplecticError::InvalidParameter(format!(
                "cutoff radii must satisfy 0 <= {inner_zero} <= {inner_one} < {outer_one} < {outer_zero}"
            )));
        }
        if inner_one > 0.0 && inner_zero == inner_one {
            return Err(SymplecticError::InvalidParameter("inner ramp has zero width".into()));
        }
        Ok(Self { s0: inner_zero.powi(2), s1: inner_one.powi(2), s2: outer_one.powi(2), s3: outer_zero.powi(2) })
    }

    pub fn outer_radius(&self) -> f64 {
        self.s3.sqrt()
    }

    pub fn plateau(&self) -> (f64, f64) {
        (self.s1.sqrt(), self.s2.sqrt())
    }

    /// `(c(s), c'(s))` at squared radius `s`.
    pub fn factor(&self, s: f64) -> (f64, f64) {
        if s >= self.s3 {
            (0.0, 0.0)
        } else if s > self.s2 {
            let w = self.s3 - self.s2;
            let (v, d) = smoothstep((self.s3 - s) / w);
            (v, -d / w)
        } else if s >= self.s1 {
            (1.0, 0.0)
        } else if s > self.s0 {
            let w = self.s1 - self.s0;
            let (v, d) = smoothstep((s - self.s0) / w);
            (v, d / w)
        } else {
            (0.0, 0.0)
        }
    }
}

/// The perturbation actually fed to the functional: an even `H̃`, switched off outside a
/// time window and (optionally) outside a radial annulus.
#[derive(Clone)]
pub struct PerturbationHamiltonian {
    dim: usize,
    inner: Option<Arc<dyn Hamiltonian>>,
    window: (f64, f64),
    cutoff: Option<RadialCutoff>,
}

impl fmt::Debug for PerturbationHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationHamiltonian")
            .field("dim", &self.dim)
            .field("zero", &self.inner.is_none())
            .field("window", &self.window)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

const EVENNESS_SAMPLES: usize = 64;

impl PerturbationHamiltonian {
    pub fn zero(n: usize) -> Self {
        Self { dim: 2 * n, inner: None, window: (0.0, 0.0), cutoff: None }
    }

    /// Wraps `inner`, checking `H(t, −x) = H(t, x)` on sampled points.
    pub fn new(inner: Arc<dyn Hamiltonian>, window: (f64, f64), cutoff: Option<RadialCutoff>) -> Result<Self> {
        let (a, b) = window;
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(SymplecticError::InvalidParameter(format!("time window [{a}, {b}] not inside [0, 1]")));
        }
        let dim = inner.dim();
        let h = Self { dim, inner: Some(inner), window, cutoff };
        let radius = cutoff.map(|c| c.outer_radius()).unwrap_or(2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0x0e7e);
        let mut worst = 0.0f64;
        for dir in sphere_samples(dim, EVENNESS_SAMPLES, 0x1e1e) {
            let t = rng.random_range(a..=b);
            let s = rng.random_range(0.0..radius);
            let x: Vec<f64> = dir.iter().map(|c| c * s).collect();
            let neg: Vec<f64> = x.iter().map(|c| -c).collect();
            let d = (h.value(t, &x) - h.value(t, &neg)).abs();
            let scale = h.value(t, &x).abs().max(1.0);
            worst = worst.max(d / scale);
        }
        if worst > 1e-12 {
            return Err(SymplecticError::NotEven(worst));
        }
        Ok(h)
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_none()
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn cutoff(&self) -> Option<RadialCutoff> {
        self.cutoff
    }

    fn active(&self, t: f64) -> Option<&Arc<dyn Hamiltonian>> {
        let inner = self.inner.as_ref()?;
        if t < self.window.0 || t > self.window.1 {
            return None;
        }
        Some(inner)
    }
}

impl Hamiltonian for PerturbationHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, t: f64, x: &[f64]) -> f64 {
        let Some(inner) = self.active(t) else { return 0.0 };
        match self.cutoff {
            None => inner.value(t, x),
            Some(c) => {
                let (f, _) = c.factor(x.iter().map(|v| v * v).sum());
                if f == 0.0 {
                    0.0
                } else {
                    f * inner.value(t, x)
                }
            }
        }
    }

    fn gradient(&self, t: f64, x: &[f64], grad: &mut [f64]) {
        let Some(inner) = self.active(t) else {
            grad.iter_mut().for_each(|g| *g = 0.0);
            return;
        };
        match self.cutoff {
            None => inner.gradient(t, x, grad),
            Some(c) => {
                let (f, df) = c.factor(x.iter().map(|v| v * v).sum());
                if f == 0.0 && df == 0.0 {
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    return;
                }
                inner.gradient(t, x, grad);
                let hv = if df != 0.0 { inner.value(t, x) } else { 0.0 };
                for (g, xi) in grad.iter_mut().zip(x) {
                    *g = f * *g + hv * df * 2.0 * xi;
                }
            }
        }
    }

    fn time_support(&self) -> (f64, f64) {
        self.window
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffOptions {
    /// Number of points of `S` flowed to estimate `K`.
    pub samples: usize,
    pub step: f64,
    /// Flow escaping beyond this multiple of `max ρ` is reported.
    pub escape_factor: f64,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        Self { samples: 256, step: 1e-2, escape_factor: 1e3 }
    }
}

/// Estimates `K = {ψ_t(x) | x ∈ S, t ∈ [0, 1]}` by flowing samples of `S` under `H̃` and
/// returns `H̃` cut off to zero outside the bounding annulus of `K` widened by `margin`.
pub fn cutoff_hamiltonian(
    raw: Arc<dyn Hamiltonian>,
    surface: &RadialSurface,
    margin: f64,
    opts: CutoffOptions,
) -> Result<PerturbationHamiltonian> {
    if !(margin > 0.0) {
        return Err(SymplecticError::InvalidParameter(format!("cutoff margin must be positive, got {margin}")));
    }
    if raw.dim() != surface.dim() {
        return Err(SymplecticError::DimensionMismatch { expected: surface.dim(), got: raw.dim() });
    }
    let (a, b) = raw.time_support();
    let escape = opts.escape_factor * surface.max_rho();
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0f64;
    let mut stepper = FlowStepper::new(surface.dim());
    let mut field = |t: f64, x: &[f64], out: &mut [f64]| -> std::result::Result<(), FlowError> {
        raw.vector_field(t, x, out);
        Ok(())
    };
    let m = ((b - a) / opts.step).ceil().max(1.0) as usize;
    let h = (b - a) / m as f64;
    for dir in sphere_samples(surface.dim(), opts.samples, 0xc0ffee) {
        let mut x = surface.graph_point(1.0, &dir);
        let r0 = norm(&x);
        r_min = r_min.min(r0);
        r_max = r_max.max(r0);
        for i in 0..m {
            stepper.step(&mut field, a + i as f64 * h, h, &mut x)?;
            let s = norm(&x);
            if s > escape {
                return Err(SymplecticError::KEscapes(s));
            }
            r_min = r_min.min(s);
            r_max = r_max.max(s);
        }
    }
    let outer_one = r_max + margin;
    let outer_zero = r_max + 2.0 * margin;
    let inner_one = r_min - margin;
    let cutoff = if inner_one - margin > 0.0 {
        RadialCutoff::new(inner_one - margin, inner_one, outer_one, outer_zero)?
    } else {
        RadialCutoff::new(0.0, 0.0, outer_one, outer_zero)?
    };
    PerturbationHamiltonian::new(raw, (a, b), Some(cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_integrates_to_one() {
        let b = TimeBump::new(0.02, 0.48).unwrap();
        let m = 20000;
        let q: f64 = (0..m).map(|j| b.value((j as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64;
        assert!((q - 1.0).abs() < 1e-10);
        assert_eq!(b.cumulative(0.0), 0.0);
        assert_eq!(b.cumulative(0.7), 1.0);
        assert!((b.cumulative(0.25) - 0.5).abs() < 1e-14);
        // cumulative is an antiderivative
        for t in [0.05, 0.13, 0.31, 0.44] {
            let fd = (b.cumulative(t + 1e-6) - b.cumulative(t - 1e-6)) / 2e-6;
            assert!((fd - b.value(t)).abs() < 1e-6);
        }
        assert!(TimeBump::with_power(0.1, 0.2, 3).is_err());
        assert!(TimeBump::new(0.4, 0.2).is_err());
    }

    #[test]
    fn cutoff_profile_is_c1_and_bounded() {
        let c = RadialCutoff::new(0.5, 0.7, 1.5, 2.0).unwrap();
        assert_eq!(c.factor(0.0).0, 0.0);
        assert_eq!(c.factor(1.0).0, 1.0);
        assert_eq!(c.factor(4.5).0, 0.0);
        for s in [0.3, 0.4, 2.5, 3.2] {
            let fd = (c.factor(s + 1e-7).0 - c.factor(s - 1e-7).0) / 2e-7;
            assert!((fd - c.factor(s).1).abs() < 1e-5);
        }
    }

    fn quadratic(n: usize, eps: f64) -> Arc<dyn Hamiltonian> {
        Arc::new(PolynomialHamiltonian::family(HamiltonianFamily::Quadratic, n, eps, TimeBump::new(0.02, 0.48).unwrap()))
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let surf = RadialSurface::complex_ellipsoid(&[1.0, 1.2]).unwrap();
        let h = cutoff_hamiltonian(quadratic(2, 0.3), &surf, 0.2, CutoffOptions::default()).unwrap();
        let (r_in, r_out) = h.cutoff().unwrap().plateau();
        for dir in sphere_samples(4, 40, 3) {
            for s in [0.5 * r_in, r_out + 0.1, 1.1] {
                let x: Vec<f64> = dir.iter().map(|c| c * s).collect();
                let t = 0.2;
                let mut g = vec![0.0; 4];
                h.gradient(t, &x, &mut g);
                for i in 0..4 {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += 1e-6;
                    xm[i] -= 1e-6;
                    let fd = (h.value(t, &xp) - h.value(t, &xm)) / 2e-6;
                    assert!((fd - g[i]).abs() < 1e-7, "{fd} vs {}", g[i]);
                }
            }
        }
    }

    #[test]
    fn unbounded_hamiltonian_is_cut_off_outside_k() {
        // H̃(t, x) = c w(t) |x|²
        let surf = RadialSurface::round(2);
        let bump = TimeBump::new(0.1, 0.4).unwrap();
        let p = EvenPolynomial::new(
            4,
            (0..4)
                .map(|i| {
                    let mut e = vec![0; 4];
                    e[i] = 2;
                    Monomial { coeff: 1.0, exponents: e }
                })
                .collect(),
        )
        .unwrap();
        let raw: Arc<dyn Hamiltonian> = Arc::new(PolynomialHamiltonian::new(0.5, bump, p));
        let h = cutoff_hamiltonian(raw.clone(), &surf, 0.25, CutoffOptions::default()).unwrap();
        let outer = h.cutoff().unwrap().outer_radius();
        for dir in sphere_samples(4, 16, 5) {
            let far: Vec<f64> = dir.iter().map(|c| c * (outer + 0.5)).collect();
            assert_eq!(h.value(0.25, &far), 0.0);
            // |x|² flow is a rotation, so K is the unit sphere itself
            let near: Vec<f64> = dir.iter().map(|c| c * 1.05).collect();
            assert_eq!(h.value(0.25, &near), raw.value(0.25, &near));
            assert_eq!(h.value(0.05, &near), 0.0);
        }
    }

    #[test]
    fn compactly_supported_input_is_returned_on_its_support() {
        struct Shell;
        impl Hamiltonian for Shell {
            fn dim(&self) -> usize {
                4
            }
            fn value(&self, _t: f64, x: &[f64]) -> f64 {
                let s: f64 = x.iter().map(|v| v * v).sum();
                let u = (s - 1.0) / 0.01;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - u * u).powi(3) * x[0] * x[1]
                }
            }
            fn gradient(&self, t: f64, x: &[f64], grad: &mut [f64]) {
                for i in 0..4 {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[i] += 1e-7;
                    xm[i] -= 1e-7;
                    grad[i] = (self.value(t, &xp) - self.value(t, &xm)) / 2e-7;
                }
            }
        }
        let raw: Arc<dyn Hamiltonian> = Arc::new(Shell);
        let h = cutoff_hamiltonian(raw.clone(), &RadialSurface::round(2), 0.1, CutoffOptions { samples: 32, ..Default::default() })
            .unwrap();
        for dir in sphere_samples(4, 32, 8) {
            for s in [0.97, 1.0, 1.003] {
                let x: Vec<f64> = dir.iter().map(|c| c * s).collect();
                assert_eq!(h.value(0.5, &x), raw.value(0.5, &x));
            }
        }
    }

    #[test]
    fn evenness_is_enforced() {
        struct Odd;
        impl Hamiltonian for Odd {
            fn dim(&self) -> usize {
                2
            }
            fn value(&self, _t: f64, x: &[f64]) -> f64 {
                x[0]
            }
            fn gradient(&self, _t: f64, _x: &[f64], grad: &mut [f64]) {
                grad[0] = 1.0;
                grad[1] = 0.0;
            }
        }
        let err = PerturbationHamiltonian::new(Arc::new(Odd), (0.0, 0.5), None).unwrap_err();
        assert!(matches!(err, SymplecticError::NotEven(_)));

        let h = cutoff_hamiltonian(quadratic(2, 1.0), &RadialSurface::round(2), 0.3, CutoffOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dir in sphere_samples(4, 100, 9) {
            let s = rng.random_range(0.0..3.0);
            let t = rng.random_range(0.0..1.0);
            let x: Vec<f64> = dir.iter().map(|c| c * s).collect();
            let neg: Vec<f64> = x.iter().map(|c| -c).collect();
            assert_eq!(h.value(t, &x) - h.value(t, &neg), 0.0);
        }
    }

    #[test]
    fn escaping_flow_is_reported() {
        let surf = RadialSurface::round(1);
        let p = EvenPolynomial::new(2, vec![Monomial { coeff: 1.0, exponents: vec![3, 1] }]).unwrap();
        let raw: Arc<dyn Hamiltonian> = Arc::new(PolynomialHamiltonian::new(200.0, TimeBump::new(0.0, 1.0).unwrap(), p));
        let err = cutoff_hamiltonian(raw, &surf, 0.1, CutoffOptions { escape_factor: 5.0, ..Default::default() }).unwrap_err();
        assert!(matches!(err, SymplecticError::KEscapes(_) | SymplecticError::Flow(_)));
    }
}
