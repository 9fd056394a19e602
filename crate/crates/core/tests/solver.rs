use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfh_core::solver::{
    continue_to_target, dedup_reports, extract_leafwise_point, refine_critical_point, select_seed_base, seed_loop,
    seed_reeb_orbit, ContinuationOptions, Differentiator, DiscreteLoopState, ExtractOptions, NewtonOptions, RabinowitzProblem,
    TimeWeights,
};
use rfh_core::symplectic::{
    cutoff_hamiltonian, CutoffOptions, HamiltonianFamily, LeafwiseReport, PerturbationHamiltonian, PhasePoint,
    PolynomialHamiltonian, RadialSurface, Residuals, TimeBump,
};

fn ellipsoid_problem(amplitude: f64, samples: usize) -> RabinowitzProblem {
    let s = RadialSurface::complex_ellipsoid(&[1.0, 1.2]).unwrap();
    let h = if amplitude == 0.0 {
        PerturbationHamiltonian::zero(2)
    } else {
        let raw = PolynomialHamiltonian::family(HamiltonianFamily::Quadratic, 2, amplitude, TimeBump::new(0.02, 0.48).unwrap());
        cutoff_hamiltonian(Arc::new(raw), &s, 0.05, CutoffOptions::default()).unwrap()
    };
    RabinowitzProblem::new(s, h, TimeWeights::time_split(), samples).unwrap()
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn jitter(rng: &mut ChaCha8Rng, s: &mut DiscreteLoopState, size: f64) {
    s.samples_mut().iter_mut().for_each(|x| *x += rng.random_range(-size..size));
    s.eta += rng.random_range(-size..size);
}

/// Every partial derivative against central differences, for both differentiators.
#[test]
fn gradient_matches_central_differences_componentwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (samples, diff) in [(64, Differentiator::spectral(64)), (68, Differentiator::Centered)] {
        let p = ellipsoid_problem(0.1, samples).with_differentiator(diff);
        for _ in 0..10 {
            let k = rng.random_range(1..=2);
            let mut s = seed_reeb_orbit(k, &unit(&mut rng, 4), samples, p.weights()).unwrap();
            jitter(&mut rng, &mut s, 0.03);
            let r = rng.random_range(0.0..=1.0);
            let g = p.gradient(&s, r).unwrap();
            let mut analytic: Vec<f64> = g.loop_part.iter().map(|x| x / samples as f64).collect();
            analytic.push(g.eta_part);
            let sup = analytic.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let h = 1e-5;
            for (i, &a) in analytic.iter().enumerate() {
                let (mut plus, mut minus) = (s.clone(), s.clone());
                if i == analytic.len() - 1 {
                    plus.eta += h;
                    minus.eta -= h;
                } else {
                    plus.samples_mut()[i] += h;
                    minus.samples_mut()[i] -= h;
                }
                let fd = (p.action(&plus, r).unwrap() - p.action(&minus, r).unwrap()) / (2.0 * h);
                assert!((fd - a).abs() < 1e-7 * sup, "component {i}: fd {fd} vs {a}");
            }
        }
    }
}

#[test]
fn perturbed_seed_reconverges_to_the_same_action() {
    let p = RabinowitzProblem::new(RadialSurface::round(2), PerturbationHamiltonian::zero(2), TimeWeights::plain(), 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in [1, -2] {
        let seed = seed_reeb_orbit(k, &unit(&mut rng, 4), 64, p.weights()).unwrap();
        let mut noisy = seed.clone();
        jitter(&mut rng, &mut noisy, 1e-2);
        let cp = refine_critical_point(&p, &noisy, 0.0, k, NewtonOptions::default()).unwrap();
        assert!(cp.gradient_norm < 1e-8);
        assert!((cp.action + PI * k as f64).abs() < 1e-6, "action {}", cp.action);
    }
}

/// `dA/dr` along a smooth branch equals `∂_r A` at the seed, so `A(r) − A(0) = r f_k + O(r²)`.
#[test]
fn small_r_branch_is_first_order_in_r() {
    let p = ellipsoid_problem(1e-2, 128);
    let sel = select_seed_base(&p, 1, 4).unwrap();
    let seed = seed_loop(1, &sel.base, 128, p.weights()).unwrap();
    let a0 = p.action(&seed, 0.0).unwrap();
    let mut last = seed.clone();
    for r in [1e-3, 2e-3] {
        let cp = refine_critical_point(&p, &last, r, 1, NewtonOptions::default()).unwrap();
        assert!(cp.gradient_norm < 1e-8);
        let slope = (cp.action - a0) / r;
        assert!((slope - sel.value).abs() < 5e-3 * sel.value.abs().max(1.0), "r {r}: slope {slope} vs {}", sel.value);
        assert!(cp.state.l2_distance(&seed) < 50.0 * r);
        last = cp.state;
    }
}

#[test]
fn round_sphere_trace_is_constant_in_r() {
    let p = RabinowitzProblem::new(RadialSurface::round(2), PerturbationHamiltonian::zero(2), TimeWeights::time_split(), 256).unwrap();
    for k in [1, 3] {
        let seed = seed_reeb_orbit(k, &[0.0, 0.6, 0.8, 0.0], 256, p.weights()).unwrap();
        let trace = continue_to_target(&p, k, &seed, ContinuationOptions::default()).unwrap();
        assert!(trace.is_complete());
        assert_eq!(trace.schedule().first(), Some(&0.0));
        for a in trace.actions() {
            assert!((a + PI * k as f64).abs() < 1e-10);
        }
    }
}

#[test]
fn unperturbed_ellipsoid_reports_sit_on_closed_characteristics() {
    let p = ellipsoid_problem(0.0, 128);
    let sel = select_seed_base(&p, 1, 4).unwrap();
    let seed = seed_loop(1, &sel.base, 128, p.weights()).unwrap();
    let trace = continue_to_target(&p, 1, &seed, ContinuationOptions::default()).unwrap();
    let cp = trace.endpoint();
    // The selected orbit lies in the plane of radius 1.2.
    assert!((cp.action + PI * 1.44).abs() < 1e-3 * PI, "action {}", cp.action);
    let report = extract_leafwise_point(&p, cp, ExtractOptions::default()).unwrap();
    assert!(report.on_closed_characteristic);
    assert!(report.residuals.leaf < 1e-4);
    let period = report.period.unwrap();
    assert!((period - 2.0 * PI * 1.44).abs() < 1e-2, "period {period}");
}

#[test]
fn perturbed_ellipsoid_action_stays_near_the_plane_orbit() {
    let p = ellipsoid_problem(1e-2, 128);
    let sel = select_seed_base(&p, 1, 4).unwrap();
    let seed = seed_loop(1, &sel.base, 128, p.weights()).unwrap();
    let trace = continue_to_target(&p, 1, &seed, ContinuationOptions::default()).unwrap();
    let a = trace.endpoint().action;
    assert!((a / trace.actions()[0] - 1.44).abs() < 0.05 * 1.44, "action {a}");
    let report = extract_leafwise_point(&p, trace.endpoint(), ExtractOptions::default()).unwrap();
    assert!(report.residuals.leaf < 1e-4);
}

fn report(coords: [f64; 4], k: i64, closed: bool) -> LeafwiseReport {
    LeafwiseReport {
        point: PhasePoint::new(coords.to_vec()).unwrap(),
        leaf_time: 0.0,
        action: -PI * k as f64,
        k_seed: k,
        residuals: Residuals { leaf: 0.0, surface: 0.0, gradient: 0.0 },
        on_closed_characteristic: closed,
        period: closed.then_some(2.0 * PI),
    }
}

#[test]
fn dedup_clusters_and_flags() {
    let reports = vec![
        report([1.0, 0.0, 0.0, 0.0], 3, false),
        report([1.0, 0.0, 5e-4, 0.0], 2, false),
        report([0.0, 1.0, 0.0, 0.0], 1, true),
        report([1.0, 0.0, 9e-4, 0.0], 4, false),
        report([0.0, 1.0, 0.0, 2e-4], -1, true),
        report([0.0, 0.0, 1.0, 0.0], 5, true),
    ];
    let clusters = dedup_reports(&reports, 1e-3);
    assert_eq!(clusters.len(), 3);
    assert_eq!(clusters[0].members, vec![0, 1, 3]);
    assert_eq!(clusters[0].representative.k_seed, 2);
    assert_eq!(clusters[0].seeds, vec![2, 3, 4]);
    assert!(!clusters[0].flagged);
    assert_eq!(clusters[1].members, vec![2, 4]);
    assert_eq!(clusters[1].representative.k_seed, 1);
    assert!(clusters[1].flagged);
    assert!(!clusters[2].flagged && clusters[2].representative.on_closed_characteristic);
    // Single linkage chains through intermediate members.
    let chain: Vec<LeafwiseReport> = (0..4).map(|i| report([1.0, 0.0, 8e-4 * i as f64, 0.0], i + 1, false)).collect();
    assert_eq!(dedup_reports(&chain, 1e-3).len(), 1);
    assert!(dedup_reports(&[], 1e-3).is_empty());
}
