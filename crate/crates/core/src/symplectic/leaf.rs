//! Independent, flow-only verification of leaf-wise intersection points.
//!
//! Nothing here touches the variational solver: `ψ_1` is the time-one map of `X_H`,
//! and the leaf through `x` is traced by integrating `X_{F_1}`.

use super::flow::{FlowError, FlowStepper};
use super::{distance, vector_field_from_gradient, Hamiltonian, PhasePoint, RadialSurface, Result, SymplecticError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafOptions {
    /// Fixed RK4 step for both `ψ_t` and the characteristic flow.
    pub step: f64,
}

impl Default for LeafOptions {
    fn default() -> Self {
        Self { step: 1e-2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafCheck {
    pub verified: bool,
    /// `s` minimising `|φ^s_{F_1}(x) − ψ_1(x)|`.
    pub leaf_time: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedProbe {
    pub closed: bool,
    pub period: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// Distance from `ψ_1(x)` to the leaf through `x`.
    pub leaf: f64,
    /// `|F_1(x)|`.
    pub surface: f64,
    /// Gradient norm of the critical point the report came from, if any.
    pub gradient: f64,
}

/// A verified leaf-wise intersection point.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafwiseReport {
    pub point: PhasePoint,
    pub leaf_time: f64,
    pub action: f64,
    pub k_seed: i64,
    pub residuals: Residuals,
    pub on_closed_characteristic: bool,
    pub period: Option<f64>,
}

fn characteristic_field(surface: &RadialSurface) -> impl FnMut(f64, &[f64], &mut [f64]) -> std::result::Result<(), FlowError> + '_ {
    let mut grad = vec![0.0; surface.dim()];
    move |t, x, out| {
        surface
            .eval_into(1.0, x, &mut grad)
            .map_err(|e| FlowError::Field { t, reason: e.to_string() })?;
        vector_field_from_gradient(&grad, out);
        Ok(())
    }
}

/// `ψ_1(x)`: integrates `X_H` across the time support of `H`.
pub fn time_one_map(h: &dyn Hamiltonian, x: &[f64], step: f64) -> Result<Vec<f64>> {
    let (a, b) = h.time_support();
    let mut y = x.to_vec();
    if b <= a {
        return Ok(y);
    }
    let mut field = |t: f64, p: &[f64], out: &mut [f64]| -> std::result::Result<(), FlowError> {
        h.vector_field(t, p, out);
        Ok(())
    };
    FlowStepper::new(x.len()).integrate(&mut field, &mut y, a, b, step)?;
    Ok(y)
}

fn on_surface(surface: &RadialSurface, x: &[f64], tol: f64) -> Result<f64> {
    let f = surface.value(1.0, x)?.abs();
    if f > tol {
        return Err(SymplecticError::NotOnSurface(f));
    }
    Ok(f)
}

/// Golden-section minimisation of `d(σ) = |φ^{σ − s0}(p0) − target|` on `[lo, hi]`.
fn refine_minimum(
    surface: &RadialSurface,
    p0: &[f64],
    s0: f64,
    target: &[f64],
    (lo, hi): (f64, f64),
    step: f64,
) -> Result<(f64, f64)> {
    let mut field = characteristic_field(surface);
    let mut stepper = FlowStepper::new(p0.len());
    let mut eval = |s: f64| -> Result<f64> {
        let mut p = p0.to_vec();
        stepper.integrate(&mut field, &mut p, s0, s, step)?;
        Ok(distance(&p, target))
    };
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..60 {
        if (b - a).abs() < 1e-13 * (1.0 + s0.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Decides whether `ψ_1(x)` lies on the leaf `L_S(x)` within `tol`, searching leaf
/// times `s ∈ [−t_max, t_max]`.
pub fn leafwise_check(
    surface: &RadialSurface,
    h: &dyn Hamiltonian,
    x: &[f64],
    t_max: f64,
    tol: f64,
    opts: LeafOptions,
) -> Result<LeafCheck> {
    on_surface(surface, x, tol)?;
    let target = time_one_map(h, x, opts.step)?;

    let mut best_s = 0.0;
    let mut best_d = distance(x, &target);
    let mut best_p = x.to_vec();
    if best_d > 0.0 && t_max > 0.0 {
        let m = (t_max / opts.step).ceil() as usize;
        let hstep = t_max / m as f64;
        let mut field = characteristic_field(surface);
        let mut stepper = FlowStepper::new(x.len());
        for sign in [1.0, -1.0] {
            let mut p = x.to_vec();
            for i in 0..m {
                stepper.step(&mut field, sign * i as f64 * hstep, sign * hstep, &mut p)?;
                let d = distance(&p, &target);
                if d < best_d {
                    best_d = d;
                    best_s = sign * (i + 1) as f64 * hstep;
                    best_p.copy_from_slice(&p);
                }
            }
        }
        let bracket = ((best_s - hstep).max(-t_max), (best_s + hstep).min(t_max));
        let (s, d) = refine_minimum(surface, &best_p, best_s, &target, bracket, opts.step)?;
        if d < best_d {
            best_s = s;
            best_d = d;
        }
    }
    Ok(LeafCheck { verified: best_d <= tol, leaf_time: best_s, residual: best_d })
}

/// Looks for a return `φ^s_{F_1}(x) ≈ x` with `0 < s ≤ t_max`.
pub fn closed_characteristic_probe(
    surface: &RadialSurface,
    x: &[f64],
    t_max: f64,
    tol: f64,
    opts: LeafOptions,
) -> Result<ClosedProbe> {
    on_surface(surface, x, tol)?;
    let not_closed = ClosedProbe { closed: false, period: None };
    if !(t_max > 0.0) {
        return Ok(not_closed);
    }
    let mut field = characteristic_field(surface);
    let mut v = vec![0.0; x.len()];
    field(0.0, x, &mut v)?;
    let speed = super::norm(&v);
    let m = (t_max / opts.step).ceil() as usize;
    let hstep = t_max / m as f64;
    // A genuine return has a sample within half a step of x.
    let near = speed * hstep + tol;
    let mut left = false;

    let mut stepper = FlowStepper::new(x.len());
    let mut prev = x.to_vec();
    let mut cur = x.to_vec();
    stepper.step(&mut field, 0.0, hstep, &mut cur)?;
    let mut d_prev = 0.0;
    let mut d_cur = distance(&cur, x);
    for i in 1..=m {
        let mut next = cur.clone();
        stepper.step(&mut field, i as f64 * hstep, hstep, &mut next)?;
        let d_next = distance(&next, x);
        if d_cur > 4.0 * near {
            left = true;
        }
        if left && d_cur <= d_prev && d_cur <= d_next && d_cur <= near {
            let s = i as f64 * hstep;
            let (ps, pd) = refine_minimum(surface, &prev, s - hstep, x, (s - hstep, s + hstep), opts.step)?;
            if pd <= tol {
                return Ok(ClosedProbe { closed: true, period: Some(ps) });
            }
        }
        prev = std::mem::replace(&mut cur, next);
        d_prev = d_cur;
        d_cur = d_next;
    }
    Ok(not_closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::surface::sphere_samples;
    use crate::symplectic::{cutoff_hamiltonian, CutoffOptions, HamiltonianFamily, PerturbationHamiltonian, PolynomialHamiltonian, TimeBump};
    use std::f64::consts::TAU;
    use std::sync::Arc;

    #[test]
    fn unperturbed_points_verify_trivially() {
        let s = RadialSurface::complex_ellipsoid(&[1.0, 1.2]).unwrap();
        let h = PerturbationHamiltonian::zero(2);
        for dir in sphere_samples(4, 10, 1) {
            let x = s.graph_point(1.0, &dir);
            let c = leafwise_check(&s, &h, &x, 10.0, 1e-8, LeafOptions::default()).unwrap();
            assert!(c.verified);
            assert_eq!(c.leaf_time, 0.0);
            assert_eq!(c.residual, 0.0);
        }
    }

    #[test]
    fn off_surface_point_is_rejected() {
        let s = RadialSurface::round(2);
        let h = PerturbationHamiltonian::zero(2);
        let err = leafwise_check(&s, &h, &[1.1, 0.0, 0.0, 0.0], 1.0, 1e-6, LeafOptions::default()).unwrap_err();
        assert!(matches!(err, SymplecticError::NotOnSurface(_)));
    }

    #[test]
    fn large_perturbation_moves_generic_points_off_their_leaf() {
        let s = RadialSurface::complex_ellipsoid(&[1.0, 1.2]).unwrap();
        let raw = Arc::new(PolynomialHamiltonian::family(
            HamiltonianFamily::Quartic,
            2,
            0.3,
            TimeBump::new(0.02, 0.48).unwrap(),
        ));
        let h = cutoff_hamiltonian(raw, &s, 0.3, CutoffOptions::default()).unwrap();
        let mut failures = 0;
        for dir in sphere_samples(4, 10, 4) {
            let x = s.graph_point(1.0, &dir);
            let c = leafwise_check(&s, &h, &x, 20.0, 1e-4, LeafOptions::default()).unwrap();
            if !c.verified {
                failures += 1;
            }
        }
        assert!(failures >= 8, "only {failures} of 10 rejected");
    }

    #[test]
    fn leaf_time_is_recovered_for_a_leaf_preserving_map() {
        // H = c·F_0 generates a rotation along the leaves of the round sphere: X_H = c X_{F_0}.
        let s = RadialSurface::round(2);
        let c = 0.7;
        let sq = crate::symplectic::EvenPolynomial::new(
            4,
            (0..4)
                .map(|i| {
                    let mut e = vec![0; 4];
                    e[i] = 2;
                    crate::symplectic::Monomial { coeff: 0.5 * c, exponents: e }
                })
                .collect(),
        )
        .unwrap();
        let raw = Arc::new(PolynomialHamiltonian::new(1.0, TimeBump::new(0.1, 0.4).unwrap(), sq));
        let h = PerturbationHamiltonian::new(raw, (0.1, 0.4), None).unwrap();
        let x = s.graph_point(1.0, &[0.3, 0.5, -0.2, 0.7]);
        let chk = leafwise_check(&s, &h, &x, 3.0, 1e-6, LeafOptions::default()).unwrap();
        assert!(chk.verified, "{chk:?}");
        assert!((chk.leaf_time - c).abs() < 1e-6, "{chk:?}");
    }

    #[test]
    fn round_sphere_leaves_close_with_period_two_pi() {
        let s = RadialSurface::round(2);
        for dir in sphere_samples(4, 5, 2) {
            let x = s.graph_point(1.0, &dir);
            let p = closed_characteristic_probe(&s, &x, 8.0, 1e-6, LeafOptions::default()).unwrap();
            assert!(p.closed);
            assert!((p.period.unwrap() - TAU).abs() < 1e-6);
        }
        let x = s.graph_point(1.0, &[1.0, 0.0, 0.0, 0.0]);
        let p = closed_characteristic_probe(&s, &x, 0.0, 1e-6, LeafOptions::default()).unwrap();
        assert!(!p.closed);
    }

    #[test]
    fn irrational_ellipsoid_generic_leaves_do_not_close() {
        let s = RadialSurface::complex_ellipsoid(&[1.0, 2f64.sqrt().sqrt()]).unwrap();
        let x = s.graph_point(1.0, &[0.6, 0.5, 0.3, -0.4]);
        let p = closed_characteristic_probe(&s, &x, 40.0, 1e-6, LeafOptions::default()).unwrap();
        assert!(!p.closed);
        // the two distinguished planes carry closed leaves of period 2πR²
        let x = s.graph_point(1.0, &[0.0, 1.0, 0.0, 0.0]);
        let p = closed_characteristic_probe(&s, &x, 10.0, 1e-6, LeafOptions::default()).unwrap();
        assert!(p.closed);
        assert!((p.period.unwrap() - TAU * 2f64.sqrt()).abs() < 1e-6);
    }
}
