use proptest::prelude::*;
use rfh_core::algebra::{gf2_homology, quotient_by_involution, rabinowitz_ladder_with, Branch, LadderOptions};
use rfh_core::solver::{seed_reeb_orbit, RabinowitzProblem, TimeWeights};
use rfh_core::symplectic::{PerturbationHamiltonian, RadialSurface, SymplecticConvention};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ladder_is_a_complex_with_the_degree_formula(n in 1usize..=4, k in 1i64..=4, a: bool, b: bool, q in 0.5f64..10.0) {
        let c = rabinowitz_ladder_with(n, k, LadderOptions { a, b, quantum: q }).unwrap();
        // ∂∂ y_0^{k+1} = (a + b)(y_{2n−2}^k + z_{2n−2}^k), so squaring to zero pins a = b.
        prop_assert_eq!(c.check_square_zero().is_ok(), a == b);
        prop_assert_eq!(c.len(), 2 * 2 * n * (2 * k as usize + 1));
        for g in c.generators() {
            prop_assert_eq!(g.degree, g.l as i64 + 2 * n as i64 * g.k);
            prop_assert_eq!(g.action_label, -q * g.k as f64 + 0.0);
        }
        for (j, i) in c.edges() {
            prop_assert_eq!(c.generators()[i].degree, c.generators()[j].degree - 1);
        }
    }

    #[test]
    fn quotient_keeps_actions_and_halves_ranks(n in 1usize..=3, k in 1i64..=3) {
        let c = rabinowitz_ladder_with(n, k, LadderOptions::default()).unwrap();
        let q = quotient_by_involution(&c).unwrap();
        prop_assert!(q.check_square_zero().is_ok());
        prop_assert_eq!(2 * q.len(), c.len());
        for g in q.generators() {
            let y = c.find(g.k, g.l, Branch::Y).unwrap();
            let z = c.find(g.k, g.l, Branch::Z).unwrap();
            prop_assert_eq!(c.generators()[y].action_label, g.action_label);
            prop_assert_eq!(c.generators()[z].action_label, g.action_label);
        }
        let h = gf2_homology(&q).unwrap();
        let euler: i64 = h.entries.iter().map(|e| if e.degree % 2 == 0 { e.rank as i64 } else { -(e.rank as i64) }).sum();
        let chain: i64 = q.generators().iter().map(|g| if g.degree % 2 == 0 { 1 } else { -1 }).sum();
        prop_assert_eq!(euler, chain);
    }

    #[test]
    fn omega_is_compatible_with_j(u in prop::collection::vec(-10.0f64..10.0, 6), w in prop::collection::vec(-10.0f64..10.0, 6)) {
        let s = SymplecticConvention::new(3).unwrap();
        let ju = s.complex_structure(&u).unwrap();
        let uu: f64 = u.iter().map(|x| x * x).sum();
        prop_assert!((s.omega(&u, &ju).unwrap() - uu).abs() <= 1e-12 * uu.max(1.0));
        prop_assert!((s.omega(&u, &w).unwrap() + s.omega(&w, &u).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn action_is_invariant_under_reflection(
        k in -3i64..=3,
        theta in 0.0f64..std::f64::consts::TAU,
        eta in -20.0f64..20.0,
        r in 0.0f64..=1.0,
        bumps in prop::collection::vec(-0.05f64..0.05, 64 * 4),
    ) {
        prop_assume!(k != 0);
        let p = RabinowitzProblem::new(
            RadialSurface::complex_ellipsoid(&[1.0, 1.3]).unwrap(),
            PerturbationHamiltonian::zero(2),
            TimeWeights::time_split(),
            64,
        ).unwrap();
        let base = [theta.cos(), 0.0, 0.0, theta.sin()];
        let mut s = seed_reeb_orbit(k, &base, 64, p.weights()).unwrap();
        s.samples_mut().iter_mut().zip(&bumps).for_each(|(x, b)| *x += b);
        s.eta = eta;
        let a = p.action(&s, r).unwrap();
        let b = p.action(&s.reflect(), r).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        let ga = p.gradient_norm(&s, r).unwrap();
        let gb = p.gradient_norm(&s.reflect(), r).unwrap();
        prop_assert!((ga - gb).abs() <= 1e-12 * ga.max(1.0));
    }
}
